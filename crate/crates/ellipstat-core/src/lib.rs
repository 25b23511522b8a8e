//! Electrostatic energy of a charged elliptical disc.
//!
//! This crate computes the energy functional
//!
//! ```text
//! I_σ = (1/4π) ∫_A ∫_A σ(x) conj(σ(y)) / |x − y| dx dy
//! ```
//!
//! of an infinitely thin charged elliptical disc `A = {x1²/a² + x2²/b² ≤ 1}`
//! carrying an affine surface density `σ = α0 + α1 x1/a + α2 x2/b`, via three
//! independent routes that validate one another:
//!
//! * [`analytic`] — the closed form in complete elliptic integrals,
//!   `I_σ = (8ab²/15π)[(5α0² + α2²)K(ε) + (α1² − α2²)(K(ε) − E(ε))/ε²]`;
//! * [`spectral`] — diagonalization of the single-layer operator in a basis
//!   of normalized associated Legendre functions on a spheroidal chart;
//! * [`bem`] — P1 Galerkin boundary-element quadrature on triangulated
//!   discs, with regularizing transforms for the `1/|x − y|` kernel.
//!
//! A fourth, deliberately code-independent [`oracle`] module pins the circle
//! case (`i_sigma0 = 4/3`, `i_sigma1 = 2/15` on the unit disc) by separate
//! quadrature kernels.
//!
//! The crate is `no_std`-compatible (with `alloc`): disable the `std`
//! feature and enable `libm` for the float math fallback. The `parallel`
//! feature (default, implies `std`) parallelizes boundary-element assembly
//! without changing a single bit of the result.

#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_docs)]

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("enable at least one of the `std` or `libm` features");

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub(crate) mod fmath;
pub(crate) mod sum;
#[cfg(test)]
pub(crate) mod testutil;

pub mod analytic;
pub mod bem;
pub mod elliptic;
pub mod geometry;
pub mod legendre;
pub mod mesh;
pub mod oracle;
pub mod quadrature;
pub mod spectral;

pub use geometry::{AffineDensity, Ellipse};
