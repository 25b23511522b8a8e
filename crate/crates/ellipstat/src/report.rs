//! Energy reports and the fixed number formats of the machine outputs.
//!
//! Every computation the binary performs is summarized as an
//! [`EnergyReport`]: which route produced the value, on which ellipse,
//! for which density under which coefficient convention, and — when a
//! closed form exists — the reference value and relative error. Reports
//! serialize to JSON lines (snake-case field names, shortest round-trip
//! floats) and to CSV (17 significant digits unless rounding was
//! requested), both byte-deterministic.

use serde::Serialize;

/// The evaluation route that produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Closed form via complete elliptic integrals.
    Analytic,
    /// Truncated spectral series in the Legendre basis.
    Spectral,
    /// P1 Galerkin boundary elements.
    Bem,
    /// Independent unit-circle oracle.
    Oracle,
}

impl Method {
    /// Lower-case name, as used in flags and serialized output.
    pub fn name(self) -> &'static str {
        match self {
            Self::Analytic => "analytic",
            Self::Spectral => "spectral",
            Self::Bem => "bem",
            Self::Oracle => "oracle",
        }
    }
}

/// Which coefficient convention the density's coefficients use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `σ = α0 + α1·x1/a + α2·x2/b` (the closed form's convention).
    Normalized,
    /// `σ = c0 + c1·x1 + c2·x2` (raw monomials, as the tables print).
    Monomial,
}

impl Convention {
    /// Lower-case name used in serialized output.
    pub fn name(self) -> &'static str {
        match self {
            Self::Normalized => "normalized",
            Self::Monomial => "monomial",
        }
    }
}

/// A density as specified on the command line.
#[derive(Debug, Clone, Serialize)]
pub struct DensitySpec {
    /// Human-readable form, e.g. `3 + 1*x1 + 2*x2`.
    pub description: String,
    /// The three coefficients in the recorded convention's order.
    pub coefficients: [f64; 3],
    /// Which convention the coefficients use.
    pub convention: Convention,
}

/// Resolution parameters of the route, populated where meaningful.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Parameters {
    /// Spectral truncation degree.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,
    /// BEM refinement level.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
    /// Regular-pair Gauss order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<u32>,
    /// Singular-pair Gauss order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_sing: Option<u32>,
    /// Oracle variant.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<&'static str>,
}

/// Semi-axes of the ellipse a report refers to.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EllipseSpec {
    /// Semi-major axis.
    pub a: f64,
    /// Semi-minor axis.
    pub b: f64,
}

/// One computed energy with enough context to reproduce it.
#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    /// Route that produced the value.
    pub method: Method,
    /// Ellipse semi-axes.
    pub ellipse: EllipseSpec,
    /// Density and its convention.
    pub density: DensitySpec,
    /// Route-specific resolution parameters.
    pub parameters: Parameters,
    /// The computed energy.
    pub value: f64,
    /// Exact value when a closed form applies.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
    /// `|value − reference| / |reference|`; present iff `reference` is.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relative_error: Option<f64>,
}

impl EnergyReport {
    /// Builds a report, deriving `relative_error` from the reference.
    pub fn new(
        method: Method,
        ellipse: EllipseSpec,
        density: DensitySpec,
        parameters: Parameters,
        value: f64,
        reference: Option<f64>,
    ) -> Self {
        let relative_error = reference.map(|r| (value - r).abs() / r.abs());
        Self { method, ellipse, density, parameters, value, reference, relative_error }
    }

    /// One JSON line (no trailing newline).
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }

    /// Header matching [`EnergyReport::csv_record`].
    pub const CSV_HEADER: [&'static str; 12] = [
        "method",
        "a",
        "b",
        "density",
        "convention",
        "n_max",
        "level",
        "q",
        "q_sing",
        "value",
        "reference",
        "relative_error",
    ];

    /// Flat CSV record; absent fields become empty strings.
    pub fn csv_record(&self, rounded: bool) -> Vec<String> {
        let fmt = if rounded { fmt_trunc4 } else { fmt_sig17 };
        let opt_u32 = |v: Option<u32>| v.map(|x| x.to_string()).unwrap_or_default();
        let opt_f64 = |v: Option<f64>| v.map(fmt).unwrap_or_default();
        vec![
            self.method.name().to_string(),
            fmt_sig17(self.ellipse.a),
            fmt_sig17(self.ellipse.b),
            self.density.description.clone(),
            self.density.convention.name().to_string(),
            opt_u32(self.parameters.n_max),
            opt_u32(self.parameters.level),
            opt_u32(self.parameters.q),
            opt_u32(self.parameters.q_sing),
            fmt(self.value),
            opt_f64(self.reference),
            opt_f64(self.relative_error),
        ]
    }

    /// One aligned text line for terminal output.
    pub fn text_line(&self, rounded: bool) -> String {
        let value = if rounded { fmt_trunc4(self.value) } else { format!("{}", self.value) };
        let mut line = format!(
            "{:<8}  a={} b={}  sigma = {} ({})",
            self.method.name(),
            self.ellipse.a,
            self.ellipse.b,
            self.density.description,
            self.density.convention.name(),
        );
        let p = &self.parameters;
        if let Some(n) = p.n_max {
            line.push_str(&format!("  N={n}"));
        }
        if let Some(l) = p.level {
            line.push_str(&format!("  level={l}"));
        }
        if let Some(q) = p.q {
            line.push_str(&format!("  q={q}"));
        }
        if let Some(qs) = p.q_sing {
            line.push_str(&format!("  q_sing={qs}"));
        }
        if let Some(v) = p.variant {
            line.push_str(&format!("  variant={v}"));
        }
        line.push_str(&format!("  I = {value}"));
        if let (Some(r), Some(err)) = (self.reference, self.relative_error) {
            line.push_str(&format!("  exact = {r}  rel.err = {err:.3e}"));
        }
        line
    }
}

/// 17-significant-digit scientific form; always round-trips to the same
/// `f64`.
pub fn fmt_sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Four decimals, truncated toward zero — the rule that reproduces the
/// reference tables' printed digits.
pub fn fmt_trunc4(x: f64) -> String {
    // Render with spare decimals, then cut: string truncation avoids the
    // double rounding a multiply-floor-divide would introduce.
    let s = format!("{x:.10}");
    let dot = s.find('.').expect("fixed-precision formatting always emits a point");
    s[..dot + 5].to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(reference: Option<f64>) -> EnergyReport {
        EnergyReport::new(
            Method::Bem,
            EllipseSpec { a: 1.5, b: 0.5 },
            DensitySpec {
                description: "x1".to_string(),
                coefficients: [0.0, 1.0, 0.0],
                convention: Convention::Monomial,
            },
            Parameters { level: Some(2), q: Some(4), q_sing: Some(6), ..Default::default() },
            0.2271,
            reference,
        )
    }

    #[test]
    fn relative_error_present_iff_reference_is() {
        let with = sample(Some(0.228));
        assert!(with.reference.is_some() && with.relative_error.is_some());
        assert!((with.relative_error.unwrap() - (0.228 - 0.2271) / 0.228).abs() < 1e-15);
        let without = sample(None);
        assert!(without.reference.is_none() && without.relative_error.is_none());
        let json = without.to_json_line();
        assert!(!json.contains("reference"));
        assert!(!json.contains("relative_error"));
    }

    #[test]
    fn json_uses_snake_case_tags() {
        let json = sample(Some(0.228)).to_json_line();
        assert!(json.contains("\"method\":\"bem\""));
        assert!(json.contains("\"convention\":\"monomial\""));
        assert!(json.contains("\"q_sing\":6"));
        assert!(json.starts_with('{') && json.ends_with('}'));
    }

    #[test]
    fn truncation_matches_the_tables_rule() {
        // 3.61595… must print 3.6159 — rounding would give 3.6160.
        assert_eq!(fmt_trunc4(3.61595164296), "3.6159");
        assert_eq!(fmt_trunc4(2.77364681373), "2.7736");
        assert_eq!(fmt_trunc4(0.041666666), "0.0416");
        assert_eq!(fmt_trunc4(-1.23456789), "-1.2345");
        assert_eq!(fmt_trunc4(7.0), "7.0000");
    }

    #[test]
    fn seventeen_digit_form_round_trips() {
        for &x in &[4.0 / 3.0, 2.0 / 15.0, 7.531622890526727e0, 1e-300] {
            let s = fmt_sig17(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
    }

    #[test]
    fn csv_record_has_header_arity() {
        let rec = sample(Some(0.228)).csv_record(false);
        assert_eq!(rec.len(), EnergyReport::CSV_HEADER.len());
        assert_eq!(rec[0], "bem");
        assert_eq!(rec[5], ""); // no n_max for a BEM report
        assert_eq!(rec[6], "2");
    }
}
