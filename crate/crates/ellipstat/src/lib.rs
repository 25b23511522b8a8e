//! Command-line companion to [`ellipstat-core`](ellipstat_core).
//!
//! The core crate computes electrostatic energies of charged elliptical
//! discs by three independent routes (closed form, spectral series,
//! Galerkin boundary elements) without touching the file system. This
//! crate adds everything that needs an operating system: the `ellipstat`
//! binary, mesh (de)serialization, energy reports in JSON-lines and CSV,
//! the reference tables, and convergence studies.

#![warn(missing_docs)]

pub mod cli;
pub mod convergence;
pub mod density;
pub mod meshio;
pub mod report;
pub mod tables;
