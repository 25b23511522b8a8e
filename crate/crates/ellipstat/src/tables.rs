//! The three reference tables: exact versus boundary-element energies.
//!
//! Table 1 tabulates the three monomial basis densities `1`, `x1`, `x2`
//! over ellipses with `b = 0.5` and `a = 0.5 … 1.5`; Table 2 the combined
//! density `x1 + 2·x2 + 3` over `a = 0.75 … 1.5`; Table 3 the maximum
//! relative BEM error over the fine sweep `a = 0.5 : 0.05 : 1.5`. Exact
//! values come from the closed form, computed values from the Galerkin
//! route at a chosen refinement level.
//!
//! The text renderer prints energies with four decimals truncated toward
//! zero — the rule under which the exact rows reproduce the reference
//! digits — and keeps the traditional `×10⁻¹`/`×10⁻²` scaling of the
//! `x1`/`x2` rows. CSV output carries full precision.

use ellipstat_core::bem::{self, BemError};
use ellipstat_core::mesh::generate;
use ellipstat_core::{analytic, AffineDensity, Ellipse};

use crate::report::{fmt_sig17, fmt_trunc4};

/// Semi-minor axis shared by all tables.
pub const TABLE_B: f64 = 0.5;
/// Table 1 semi-major axes.
pub const TABLE1_A: [f64; 6] = [0.5, 0.7, 0.9, 1.1, 1.3, 1.5];
/// Table 2 semi-major axes.
pub const TABLE2_A: [f64; 6] = [0.75, 0.9, 1.05, 1.2, 1.35, 1.5];

/// One density's pair of rows in an energy table.
pub struct TableSection {
    /// Monomial description of the density.
    pub density: String,
    /// Row label stem, e.g. `I_sigma1`.
    pub label: String,
    /// Cells print `value · 10^scale` (the row is annotated `×10⁻ˢ`).
    pub scale: i32,
    /// Galerkin values, one per column.
    pub computed: Vec<f64>,
    /// Closed-form values, one per column.
    pub exact: Vec<f64>,
}

/// A rendered-ready energy comparison table (Tables 1 and 2).
pub struct EnergyTable {
    /// Table heading.
    pub title: String,
    /// Column coordinates (semi-major axes).
    pub a_values: Vec<f64>,
    /// Shared semi-minor axis.
    pub b: f64,
    /// Refinement level of the computed rows.
    pub level: u32,
    /// Density sections in print order.
    pub sections: Vec<TableSection>,
}

/// Table 3: per-density maxima of the relative BEM error.
pub struct ErrorTable {
    /// Table heading.
    pub title: String,
    /// Refinement level of the sweep.
    pub level: u32,
    /// `(label, density, max relative error)` rows.
    pub rows: Vec<(String, String, f64)>,
}

/// The monomial basis densities of Table 1 in normalized coefficients.
fn basis_densities(e: &Ellipse) -> [(String, String, i32, AffineDensity); 3] {
    [
        (
            "1".to_string(),
            "I_sigma0".to_string(),
            0,
            AffineDensity::new(1.0, 0.0, 0.0).expect("finite"),
        ),
        (
            "x1".to_string(),
            "I_sigma1".to_string(),
            1,
            AffineDensity::new(0.0, e.a(), 0.0).expect("finite"),
        ),
        (
            "x2".to_string(),
            "I_sigma2".to_string(),
            2,
            AffineDensity::new(0.0, 0.0, e.b()).expect("finite"),
        ),
    ]
}

/// The combined density `x1 + 2·x2 + 3` of Tables 2 and 3.
fn combined_density(e: &Ellipse) -> AffineDensity {
    AffineDensity::new(3.0, e.a(), 2.0 * e.b()).expect("finite")
}

/// Builds Table 1 with computed rows at the given refinement level.
pub fn table1(level: u32, q: u32, q_sing: u32) -> Result<EnergyTable, BemError> {
    let mut sections: Vec<TableSection> = basis_densities(
        &Ellipse::new(1.0, 1.0).expect("valid"),
    )
    .into_iter()
    .map(|(density, label, scale, _)| TableSection {
        density,
        label,
        scale,
        computed: Vec::new(),
        exact: Vec::new(),
    })
    .collect();
    for &a in &TABLE1_A {
        let e = Ellipse::new(a, TABLE_B).expect("a >= b > 0");
        let mesh = generate(&e, level);
        let matrix = bem::assemble(&mesh, q, q_sing)?;
        for (i, (_, _, _, d)) in basis_densities(&e).into_iter().enumerate() {
            let exact = analytic::theorem1_energy(&e, &d).total;
            let computed = matrix.quadratic_form(&bem::nodal_values(&mesh, &d));
            sections[i].exact.push(exact);
            sections[i].computed.push(computed);
        }
    }
    Ok(EnergyTable {
        title: "Table 1. Exact and computed electrostatic energies of the basis densities"
            .to_string(),
        a_values: TABLE1_A.to_vec(),
        b: TABLE_B,
        level,
        sections,
    })
}

/// Builds Table 2 with computed rows at the given refinement level.
pub fn table2(level: u32, q: u32, q_sing: u32) -> Result<EnergyTable, BemError> {
    let mut section = TableSection {
        density: "x1 + 2*x2 + 3".to_string(),
        label: "I_sigma".to_string(),
        scale: 0,
        computed: Vec::new(),
        exact: Vec::new(),
    };
    for &a in &TABLE2_A {
        let e = Ellipse::new(a, TABLE_B).expect("a >= b > 0");
        let d = combined_density(&e);
        let mesh = generate(&e, level);
        section.exact.push(analytic::theorem1_energy(&e, &d).total);
        section
            .computed
            .push(bem::bem_energy_with(&mesh, &d, q, q_sing)?);
    }
    Ok(EnergyTable {
        title: "Table 2. Exact and computed electrostatic energies of x1 + 2*x2 + 3"
            .to_string(),
        a_values: TABLE2_A.to_vec(),
        b: TABLE_B,
        level,
        sections: vec![section],
    })
}

/// Builds Table 3: the maximum relative error of the Galerkin energies
/// over the sweep `a = 0.50, 0.55, …, 1.50` at `b = 0.5`.
pub fn table3(level: u32, q: u32, q_sing: u32) -> Result<ErrorTable, BemError> {
    let mut rows: Vec<(String, String, f64)> = vec![
        ("I_sigma0".into(), "1".into(), 0.0),
        ("I_sigma1".into(), "x1".into(), 0.0),
        ("I_sigma2".into(), "x2".into(), 0.0),
        ("I_sigma".into(), "x1 + 2*x2 + 3".into(), 0.0),
    ];
    for i in 0..=20u32 {
        let a = (50 + 5 * i) as f64 / 100.0;
        let e = Ellipse::new(a, TABLE_B).expect("a >= b > 0");
        let mesh = generate(&e, level);
        let matrix = bem::assemble(&mesh, q, q_sing)?;
        let mut densities: Vec<AffineDensity> =
            basis_densities(&e).into_iter().map(|(_, _, _, d)| d).collect();
        densities.push(combined_density(&e));
        for (row, d) in rows.iter_mut().zip(&densities) {
            let exact = analytic::theorem1_energy(&e, d).total;
            let computed = matrix.quadratic_form(&bem::nodal_values(&mesh, d));
            let err = (computed - exact).abs() / exact.abs();
            if err > row.2 {
                row.2 = err;
            }
        }
    }
    Ok(ErrorTable {
        title: "Table 3. Maximum relative BEM error over a = 0.50:0.05:1.50".to_string(),
        level,
        rows,
    })
}

fn scale_annotation(scale: i32) -> String {
    if scale == 0 {
        String::new()
    } else {
        format!(" (x 10^-{scale})")
    }
}

/// Renders an energy table as aligned text with four truncated decimals.
pub fn render_text(t: &EnergyTable) -> String {
    let label_width = 26;
    let cell_width = 9;
    let mut out = String::new();
    out.push_str(&t.title);
    out.push_str(&format!("\nb = {}, computed rows at refinement level {}.\n\n", t.b, t.level));
    out.push_str(&format!("{:<label_width$}", "a"));
    for a in &t.a_values {
        out.push_str(&format!("{:>cell_width$}", format!("{a}")));
    }
    out.push('\n');
    for s in &t.sections {
        let annotation = scale_annotation(s.scale);
        let pow = 10f64.powi(s.scale);
        for (kind, values) in [("comp", &s.computed), ("exact", &s.exact)] {
            out.push_str(&format!("{:<label_width$}", format!("{} {kind}{annotation}", s.label)));
            for v in values {
                out.push_str(&format!("{:>cell_width$}", fmt_trunc4(v * pow)));
            }
            out.push('\n');
        }
    }
    out
}

/// Renders an energy table as long-form CSV (one row per column/density).
pub fn render_csv(t: &EnergyTable, rounded: bool) -> String {
    let fmt = if rounded { fmt_trunc4 } else { fmt_sig17 };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["a", "b", "density", "level", "computed", "exact", "relative_error"])
        .expect("in-memory csv");
    for s in &t.sections {
        for (i, &a) in t.a_values.iter().enumerate() {
            let err = (s.computed[i] - s.exact[i]).abs() / s.exact[i].abs();
            w.write_record([
                format!("{a}"),
                format!("{}", t.b),
                s.density.clone(),
                t.level.to_string(),
                fmt(s.computed[i]),
                fmt(s.exact[i]),
                fmt_sig17(err),
            ])
            .expect("in-memory csv");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8")
}

/// Renders Table 3 as text, in per-mil.
pub fn render_error_text(t: &ErrorTable) -> String {
    let mut out = String::new();
    out.push_str(&t.title);
    out.push_str(&format!("\nb = {TABLE_B}, refinement level {}.\n\n", t.level));
    for (label, _, err) in &t.rows {
        let permil = err * 1e3;
        let cell = if permil < 0.01 {
            format!("{permil:.1e}")
        } else {
            format!("{permil:.3}")
        };
        out.push_str(&format!("{label:<12}{cell:>10} permil\n"));
    }
    out
}

/// Renders Table 3 as CSV with full-precision errors.
pub fn render_error_csv(t: &ErrorTable) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["density", "level", "max_relative_error"]).expect("in-memory csv");
    for (_, density, err) in &t.rows {
        w.write_record([density.clone(), t.level.to_string(), fmt_sig17(*err)])
            .expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table2_exact_row_prints_the_reference_digits() {
        let t = table2(0, 2, 2).unwrap();
        let printed: Vec<String> =
            t.sections[0].exact.iter().map(|&v| fmt_trunc4(v)).collect();
        assert_eq!(printed, ["2.7736", "3.6159", "4.5165", "5.4708", "6.4763", "7.5316"]);
    }

    #[test]
    fn table1_uniform_density_exact_row_prints_the_reference_digits() {
        let t = table1(0, 2, 2).unwrap();
        let printed: Vec<String> =
            t.sections[0].exact.iter().map(|&v| fmt_trunc4(v)).collect();
        assert_eq!(printed, ["0.1666", "0.2741", "0.3939", "0.5234", "0.6608", "0.8048"]);
    }

    #[test]
    fn monomial_sections_carry_the_print_scales() {
        let t = table1(0, 2, 2).unwrap();
        assert_eq!(t.sections[1].scale, 1);
        assert_eq!(t.sections[2].scale, 2);
        // Circle column of the x1 section: I(x1) = a²·(8/15π)ab²(K−E)/ε²
        // = 1/240 at a = b = 0.5; the printed (×10) cell is 0.0416….
        let printed = fmt_trunc4(t.sections[1].exact[0] * 10.0);
        assert_eq!(printed, "0.0416");
    }

    #[test]
    fn computed_rows_sit_near_the_exact_rows() {
        let t = table1(2, 4, 6).unwrap();
        for s in &t.sections {
            for (c, e) in s.computed.iter().zip(&s.exact) {
                let err = (c - e).abs() / e.abs();
                assert!(err < 3e-2, "{}: computed {c}, exact {e}", s.label);
            }
        }
    }

    #[test]
    fn text_rendering_is_grid_shaped() {
        let t = table2(0, 2, 2).unwrap();
        let text = render_text(&t);
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("Table 2"));
        assert!(text.contains("I_sigma exact"));
        assert!(text.contains("7.5316"));
        let csv = render_csv(&t, false);
        assert_eq!(csv.lines().count(), 1 + 6);
        assert!(csv.starts_with("a,b,density,level,computed,exact,relative_error\n"));
        assert!(csv.contains("\"x1 + 2*x2 + 3\"") || csv.contains("x1 + 2*x2 + 3"));
    }

    #[test]
    fn error_table_rows_cover_all_four_densities() {
        let t = table3(0, 2, 2).unwrap();
        assert_eq!(t.rows.len(), 4);
        for (label, _, err) in &t.rows {
            assert!(*err > 0.0 && *err < 1.0, "{label}: {err}");
        }
        let text = render_error_text(&t);
        assert!(text.contains("permil"));
        let csv = render_error_csv(&t);
        assert_eq!(csv.lines().count(), 5);
    }
}
