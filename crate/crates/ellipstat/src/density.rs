//! Parsing of density specifications given on the command line.
//!
//! Two input conventions exist. `--alpha α0,α1,α2` gives the closed
//! form's normalized coefficients (`σ = α0 + α1·x1/a + α2·x2/b`), while
//! `--sigma "c0 + c1*x1 + c2*x2"` and the `--density` shorthands give raw
//! monomial coefficients. Both are reduced to an
//! [`AffineDensity`](ellipstat_core::AffineDensity) for the numerics; the
//! report keeps the original convention so the coefficients stay
//! interpretable.

use ellipstat_core::{AffineDensity, Ellipse};

use crate::report::{Convention, DensitySpec};

/// Parses a monomial affine expression like `3 + 1*x1 + 2*x2`.
///
/// Terms are separated by top-level `+`/`-`; each term is a number, a
/// bare `x1`/`x2`, or a `number*variable` product (in either order).
/// Repeated variables accumulate. Anything else — including quadratic
/// terms — is rejected with a message naming the offending term.
pub fn parse_sigma(expr: &str) -> Result<[f64; 3], String> {
    let mut c = [0.0f64; 3];
    let mut any = false;
    for term in split_terms(expr) {
        let term = term.trim();
        if term.is_empty() || term == "+" || term == "-" {
            return Err(format!("dangling sign in density expression '{expr}'"));
        }
        let (coeff, index) = parse_term(term)?;
        c[index] += coeff;
        any = true;
    }
    if !any {
        return Err("empty density expression".to_string());
    }
    Ok(c)
}

/// Splits on `+`/`-` outside exponents (`1e-3` stays one token), keeping
/// each term's sign attached.
fn split_terms(expr: &str) -> Vec<String> {
    let mut terms = Vec::new();
    let mut current = String::new();
    let mut prev: Option<char> = None;
    for ch in expr.chars() {
        let splits = (ch == '+' || ch == '-')
            && !matches!(prev, Some('e') | Some('E'))
            && !current.trim().is_empty();
        if splits {
            terms.push(current.clone());
            current.clear();
        }
        current.push(ch);
        if !ch.is_whitespace() {
            prev = Some(ch);
        }
    }
    terms.push(current);
    terms
}

fn parse_term(term: &str) -> Result<(f64, usize), String> {
    let mut coeff = 1.0f64;
    let mut index: Option<usize> = None;
    let mut body = term;
    if let Some(rest) = body.strip_prefix('-') {
        coeff = -1.0;
        body = rest;
    } else if let Some(rest) = body.strip_prefix('+') {
        body = rest;
    }
    let mut saw_number = false;
    for factor in body.split('*') {
        let factor = factor.trim();
        match factor {
            "x1" | "x2" => {
                let i = if factor == "x1" { 1 } else { 2 };
                if index.is_some() {
                    return Err(format!("term '{term}' is not affine"));
                }
                index = Some(i);
            }
            _ => {
                let value: f64 = factor
                    .parse()
                    .map_err(|_| format!("cannot parse '{factor}' in term '{term}'"))?;
                if saw_number {
                    return Err(format!("term '{term}' has two numeric factors"));
                }
                saw_number = true;
                coeff *= value;
            }
        }
    }
    Ok((coeff, index.unwrap_or(0)))
}

/// Renders monomial coefficients back to a canonical expression string.
pub fn describe_monomial(c: [f64; 3]) -> String {
    let mut parts = Vec::new();
    if c[0] != 0.0 {
        parts.push(format!("{}", c[0]));
    }
    for (i, var) in [(1, "x1"), (2, "x2")] {
        if c[i] != 0.0 {
            parts.push(format!("{}*{}", c[i], var));
        }
    }
    if parts.is_empty() {
        return "0".to_string();
    }
    let mut out = parts[0].clone();
    for p in &parts[1..] {
        if let Some(rest) = p.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(p);
        }
    }
    out
}

/// A density resolved from the flags: the normalized form the numerics
/// use plus the descriptor recorded in reports.
#[derive(Debug, Clone)]
pub struct ResolvedDensity {
    /// Normalized-convention density for the core routines.
    pub normalized: AffineDensity,
    /// What the report should say.
    pub spec: DensitySpec,
}

/// Builds the resolved density from normalized coefficients.
pub fn from_alpha(alpha: [f64; 3]) -> Result<ResolvedDensity, String> {
    let normalized =
        AffineDensity::new(alpha[0], alpha[1], alpha[2]).map_err(|e| e.to_string())?;
    let description =
        format!("{} + {}*x1/a + {}*x2/b", alpha[0], alpha[1], alpha[2]);
    Ok(ResolvedDensity {
        normalized,
        spec: DensitySpec {
            description,
            coefficients: alpha,
            convention: Convention::Normalized,
        },
    })
}

/// Builds the resolved density from monomial coefficients: the normalized
/// coefficients absorb the semi-axes, `α = (c0, c1·a, c2·b)`.
pub fn from_monomial(
    c: [f64; 3],
    e: &Ellipse,
    description: String,
) -> Result<ResolvedDensity, String> {
    let normalized =
        AffineDensity::new(c[0], c[1] * e.a(), c[2] * e.b()).map_err(|e| e.to_string())?;
    Ok(ResolvedDensity {
        normalized,
        spec: DensitySpec { description, coefficients: c, convention: Convention::Monomial },
    })
}
