//! Convergence sweeps of the spectral and Galerkin routes.
//!
//! A sweep fixes the ellipse and density, varies the resolution parameter
//! (spectral truncation order or mesh refinement level), and reports each
//! energy together with its relative error against the closed form.

use ellipstat_core::bem::{self, BemError};
use ellipstat_core::mesh::generate;
use ellipstat_core::{analytic, spectral, AffineDensity, Ellipse};
use serde::Serialize;

use crate::report::fmt_sig17;

/// One point of a convergence sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    /// Truncation order `N` or refinement level `L`.
    pub parameter: u32,
    /// Computed energy.
    pub value: f64,
    /// Relative error against the closed-form energy.
    pub relative_error: f64,
}

fn rel_err(value: f64, exact: f64) -> f64 {
    (value - exact).abs() / exact.abs()
}

/// Sweeps the spectral truncation order from `from` to `to` inclusive.
pub fn spectral_sweep(e: &Ellipse, d: &AffineDensity, from: u32, to: u32) -> Vec<SweepRow> {
    let exact = analytic::theorem1_energy(e, d).total;
    (from..=to)
        .map(|n| {
            let value = spectral::energy_of_density(e, |x1, x2| d.evaluate(e, x1, x2), n);
            SweepRow { parameter: n, value, relative_error: rel_err(value, exact) }
        })
        .collect()
}

/// Sweeps the mesh refinement level from `from` to `to` inclusive.
pub fn bem_sweep(
    e: &Ellipse,
    d: &AffineDensity,
    from: u32,
    to: u32,
    q: u32,
    q_sing: u32,
) -> Result<Vec<SweepRow>, BemError> {
    let exact = analytic::theorem1_energy(e, d).total;
    (from..=to)
        .map(|level| {
            let mesh = generate(e, level);
            let value = bem::bem_energy_with(&mesh, d, q, q_sing)?;
            Ok(SweepRow { parameter: level, value, relative_error: rel_err(value, exact) })
        })
        .collect()
}

/// Renders a sweep as CSV with a `parameter,value,relative_error` header.
pub fn render_csv(rows: &[SweepRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["parameter", "value", "relative_error"]).expect("in-memory csv");
    for r in rows {
        w.write_record([
            r.parameter.to_string(),
            fmt_sig17(r.value),
            fmt_sig17(r.relative_error),
        ])
        .expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8")
}

/// Renders a sweep as JSON Lines.
pub fn render_jsonl(rows: &[SweepRow]) -> String {
    rows.iter()
        .map(|r| serde_json::to_string(r).expect("sweep rows serialize"))
        .fold(String::new(), |mut acc, line| {
            acc.push_str(&line);
            acc.push('\n');
            acc
        })
}

/// Renders a sweep as aligned text.
pub fn render_text(rows: &[SweepRow]) -> String {
    let mut out = String::from("parameter       value                    relative_error\n");
    for r in rows {
        out.push_str(&format!(
            "{:<16}{:<25}{}\n",
            r.parameter,
            fmt_sig17(r.value),
            fmt_sig17(r.relative_error)
        ));
    }
    out
}
