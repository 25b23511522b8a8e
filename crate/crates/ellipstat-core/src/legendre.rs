//! Normalized associated Legendre functions `Q_n^m`, the spectral basis.
//!
//! The normalization is over the full interval,
//!
//! ```text
//! ∫₋₁¹ Q_n^m(x)² dx = 1   (equivalently ∫₀^π Q_n^m(cosθ)² sinθ dθ = 1),
//! ```
//!
//! and the Condon–Shortley factor `(−1)^m` is included, so that
//! `Q_n^{−m} = (−1)^m Q_n^m`; in particular `Q_n^{−1} = −Q_n^1`, the form in
//! which the negative orders enter the energy series. Both choices must be
//! applied consistently here and nowhere else: the expansion coefficients
//! and the kernel blocks take whatever `q_eval`/`q_at_zero` return.
//!
//! Evaluation is by upward recurrence in the degree from the closed-form
//! seed at `n = m`,
//!
//! ```text
//! Q_m^m(x) = (−1)^m √((2m+1)/2 · ∏_{k=1}^m (2k−1)/(2k)) · (1−x²)^{m/2},
//! ```
//!
//! which is forward-stable for the dominant solution computed here (checked
//! against extended-precision references up to `n = 100`).

#[allow(unused_imports)]
use crate::fmath::*;
use alloc::vec::Vec;

/// Index violations for the basis functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LegendreError {
    /// The order must satisfy `|m| ≤ n`.
    OrderOutOfRange,
}

impl core::fmt::Display for LegendreError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::OrderOutOfRange => write!(f, "associated Legendre order must satisfy |m| <= n"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for LegendreError {}

/// A basis index `(n, m)` with `|m| ≤ n`.
///
/// Expansions of densities even across the disc plane only involve indices
/// with `n − m` even; [`BasisIndex::participates`] exposes that restriction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisIndex {
    n: u32,
    m: i32,
}

impl BasisIndex {
    /// Validates `|m| ≤ n`.
    pub fn new(n: u32, m: i32) -> Result<Self, LegendreError> {
        if m.unsigned_abs() > n {
            return Err(LegendreError::OrderOutOfRange);
        }
        Ok(Self { n, m })
    }

    /// Degree `n`.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Order `m` (may be negative).
    pub fn m(&self) -> i32 {
        self.m
    }

    /// Whether the index enters disc expansions (`n − m` even; equivalently
    /// `Q_n^m(0) ≠ 0`).
    pub fn participates(&self) -> bool {
        (i64::from(self.n) - i64::from(self.m)) % 2 == 0
    }
}

/// Sign `s` in `Q_n^{−m} = s·Q_n^m` for `1 ≤ m ≤ n`: here `s = (−1)^m`.
pub fn negative_order_relation(n: u32, m: u32) -> f64 {
    debug_assert!(m >= 1 && m <= n);
    let _ = n;
    if m % 2 == 0 { 1.0 } else { -1.0 }
}

/// Evaluates `Q_n^m(x)` for every degree `n = m, m+1, …, n_max` at once.
///
/// One recurrence sweep serves all degrees, which is how quadrature-based
/// projections consume the basis. Requires `n_max ≥ m` and `|x| ≤ 1`.
pub fn q_all_degrees(m: u32, n_max: u32, x: f64) -> Vec<f64> {
    assert!(n_max >= m, "need n_max >= m");
    assert!(x.abs() <= 1.0, "argument outside [-1, 1]");
    let mut out = Vec::with_capacity((n_max - m + 1) as usize);

    // Seed Q_m^m.
    let mut ratio = 1.0f64;
    for k in 1..=m {
        ratio *= f64::from(2 * k - 1) / f64::from(2 * k);
    }
    let mf = f64::from(m);
    let seed_norm = ((2.0 * mf + 1.0) / 2.0 * ratio).sqrt();
    let cs = if m % 2 == 0 { 1.0 } else { -1.0 };
    let weight = (1.0 - x * x).sqrt().powi(m as i32);
    let q_mm = cs * seed_norm * weight;
    out.push(q_mm);
    if n_max == m {
        return out;
    }

    // Q_{m+1}^m = x √(2m+3) Q_m^m, then the three-term recurrence.
    let mut prev = q_mm;
    let mut curr = x * (2.0 * mf + 3.0).sqrt() * q_mm;
    out.push(curr);
    for n in (m + 2)..=n_max {
        let nf = f64::from(n);
        let c1 = ((2.0 * nf + 1.0) * (2.0 * nf - 1.0) / ((nf - mf) * (nf + mf))).sqrt();
        let c2 = ((2.0 * nf + 1.0) * (nf + mf - 1.0) * (nf - mf - 1.0)
            / ((2.0 * nf - 3.0) * (nf - mf) * (nf + mf)))
            .sqrt();
        let next = x * c1 * curr - c2 * prev;
        prev = curr;
        curr = next;
        out.push(curr);
    }
    out
}

/// Evaluates `Q_n^m(x)` for `|m| ≤ n`, `x ∈ [−1, 1]`.
pub fn q_eval(n: u32, m: i32, x: f64) -> Result<f64, LegendreError> {
    let mu = m.unsigned_abs();
    if mu > n {
        return Err(LegendreError::OrderOutOfRange);
    }
    let positive = *q_all_degrees(mu, n, x).last().expect("non-empty by construction");
    if m < 0 {
        Ok(negative_order_relation(n, mu) * positive)
    } else {
        Ok(positive)
    }
}

/// Degree bound up to which `q_at_zero` uses exact integer double
/// factorials; beyond it, log-gamma evaluation avoids overflow.
const EXACT_ZERO_LIMIT: u32 = 20;

/// `Q_n^m(0)`: exactly zero when `n − m` is odd, otherwise
///
/// ```text
/// Q_n^m(0)² = (2n+1)/2 · (n+m−1)!!/(n+m)!! · (n−m−1)!!/(n−m)!!,
/// sign = (−1)^{(n+m)/2},
/// ```
///
/// (the sign already contains the Condon–Shortley phase). Matches
/// `q_eval(n, m, 0)` to 1e−13 across the recurrence's stable range.
pub fn q_at_zero(n: u32, m: i32) -> Result<f64, LegendreError> {
    let mu = m.unsigned_abs();
    if mu > n {
        return Err(LegendreError::OrderOutOfRange);
    }
    if (n - mu) % 2 == 1 {
        return Ok(0.0);
    }
    let positive = if n <= EXACT_ZERO_LIMIT { q_zero_exact(n, mu) } else { q_zero_loggamma(n, mu) };
    if m < 0 {
        Ok(negative_order_relation(n, mu) * positive)
    } else {
        Ok(positive)
    }
}

/// Exact-integer branch of [`q_at_zero`] for `n ≤ 20` (so `n + m ≤ 40`,
/// well inside `u128` for double factorials).
pub(crate) fn q_zero_exact(n: u32, m: u32) -> f64 {
    debug_assert!((n - m) % 2 == 0 && n <= EXACT_ZERO_LIMIT);
    fn df_ratio(two_p: u32) -> f64 {
        // (2p−1)!! / (2p)!! as a quotient of exact u128 products.
        let mut num: u128 = 1;
        let mut den: u128 = 1;
        let mut k = 1;
        while 2 * k <= two_p {
            num *= u128::from(2 * k - 1);
            den *= u128::from(2 * k);
            k += 1;
        }
        (num as f64) / (den as f64)
    }
    let sign = if ((n + m) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let value2 = (f64::from(2 * n + 1) / 2.0) * df_ratio(n + m) * df_ratio(n - m);
    sign * value2.sqrt()
}

/// Log-gamma branch of [`q_at_zero`] for large degrees.
pub(crate) fn q_zero_loggamma(n: u32, m: u32) -> f64 {
    debug_assert!((n - m) % 2 == 0);
    // ln[(2p−1)!!/(2p)!!] = lnΓ(2p+1) − 2p·ln2 − 2·lnΓ(p+1).
    fn ln_df_ratio(two_p: u32) -> f64 {
        let p = f64::from(two_p / 2);
        ln_gamma(2.0 * p + 1.0) - 2.0 * p * core::f64::consts::LN_2 - 2.0 * ln_gamma(p + 1.0)
    }
    let sign = if ((n + m) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let ln_value2 =
        (f64::from(2 * n + 1) / 2.0).ln() + ln_df_ratio(n + m) + ln_df_ratio(n - m);
    sign * (0.5 * ln_value2).exp()
}

/// `ln Γ(z)` for `z > 0` by the Stirling series with argument shift.
///
/// Six Bernoulli terms past `z ≥ 10` give ~1e−15 relative accuracy, far
/// below the 1e−13 budget of the zero-value cross-checks.
pub(crate) fn ln_gamma(mut z: f64) -> f64 {
    debug_assert!(z > 0.0);
    let mut shift = 0.0;
    while z < 10.0 {
        shift -= z.ln();
        z += 1.0;
    }
    const COEFFS: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
    ];
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut power = inv;
    for c in COEFFS {
        series += c * power;
        power *= inv2;
    }
    shift
        + (z - 0.5) * z.ln()
        + 0.5 * (2.0 * core::f64::consts::PI).ln()
        + series
        - z
}

/// Immutable table of `Q_n^m(0)` for all `0 ≤ m ≤ n ≤ n_max`, shared by the
/// spectral kernel which consumes these values in quadratic products.
#[derive(Debug, Clone)]
pub struct QZeroTable {
    n_max: u32,
    values: Vec<f64>,
}

impl QZeroTable {
    /// Precomputes the triangular table up to `n_max`.
    pub fn new(n_max: u32) -> Self {
        let count = ((n_max as usize + 1) * (n_max as usize + 2)) / 2;
        let mut values = Vec::with_capacity(count);
        for n in 0..=n_max {
            for m in 0..=n {
                values.push(q_at_zero(n, m as i32).expect("m <= n by construction"));
            }
        }
        Self { n_max, values }
    }

    /// Largest tabulated degree.
    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    /// Looks up `Q_n^m(0)`; negative orders resolve through the sign
    /// relation. Panics if `|m| > n` or `n > n_max`.
    pub fn get(&self, n: u32, m: i32) -> f64 {
        let mu = m.unsigned_abs();
        assert!(mu <= n && n <= self.n_max, "index outside table");
        let base = (n as usize * (n as usize + 1)) / 2;
        let positive = self.values[base + mu as usize];
        if m < 0 {
            negative_order_relation(n, mu) * positive
        } else {
            positive
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;
    use approx::assert_relative_eq;

    #[test]
    fn constant_and_linear_basis() {
        let inv_sqrt2 = core::f64::consts::FRAC_1_SQRT_2;
        for &x in &[-1.0, -0.4, 0.0, 0.7, 1.0] {
            assert_relative_eq!(q_eval(0, 0, x).unwrap(), inv_sqrt2, max_relative = 1e-15);
            assert_relative_eq!(
                q_eval(1, 0, x).unwrap(),
                (1.5f64).sqrt() * x,
                max_relative = 1e-15,
                epsilon = 1e-15
            );
        }
        assert_relative_eq!(
            q_eval(2, 0, 0.0).unwrap(),
            -(5.0f64 / 8.0).sqrt(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn zero_values() {
        assert_eq!(q_at_zero(1, 0).unwrap(), 0.0);
        assert_eq!(q_at_zero(7, 2).unwrap(), 0.0);
        assert_relative_eq!(
            q_at_zero(0, 0).unwrap(),
            core::f64::consts::FRAC_1_SQRT_2,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            q_at_zero(2, 0).unwrap(),
            -(5.0f64 / 8.0).sqrt(),
            max_relative = 1e-15
        );
        // Q_1^1(0) = −√3/2 under the Condon–Shortley convention.
        assert_relative_eq!(
            q_at_zero(1, 1).unwrap(),
            -(3.0f64).sqrt() / 2.0,
            max_relative = 1e-15
        );
        // Frozen from extended-precision closed-form evaluation.
        assert_relative_eq!(
            q_at_zero(100, 0).unwrap(),
            0.797_879_623_841_344_7,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            q_at_zero(60, 40).unwrap(),
            0.921_094_476_382_104_9,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            q_at_zero(21, 19).unwrap(),
            1.160_919_847_323_869_7,
            max_relative = 1e-13
        );
    }

    #[test]
    fn zero_value_branches_agree() {
        // Exact-integer vs log-gamma evaluation across the switch region.
        for n in 10..=20 {
            for m in (n % 2..=n).step_by(2) {
                let exact = q_zero_exact(n, m);
                let lg = q_zero_loggamma(n, m);
                assert_relative_eq!(exact, lg, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn zero_values_match_recurrence() {
        for n in 0..=60u32 {
            for m in 0..=n {
                let closed = q_at_zero(n, m as i32).unwrap();
                let recur = q_eval(n, m as i32, 0.0).unwrap();
                assert_relative_eq!(closed, recur, max_relative = 1e-13, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn negative_orders() {
        assert_eq!(negative_order_relation(1, 1), -1.0);
        assert_eq!(negative_order_relation(3, 1), -1.0);
        assert_eq!(negative_order_relation(2, 2), 1.0);
        for &x in &[-0.8, -0.1, 0.33, 0.9] {
            assert_eq!(q_eval(5, -1, x).unwrap(), -q_eval(5, 1, x).unwrap());
            assert_eq!(q_eval(6, -2, x).unwrap(), q_eval(6, 2, x).unwrap());
            assert_eq!(q_eval(7, -3, x).unwrap(), -q_eval(7, 3, x).unwrap());
        }
    }

    #[test]
    fn invalid_orders_rejected() {
        assert_eq!(q_eval(2, 3, 0.5), Err(LegendreError::OrderOutOfRange));
        assert_eq!(q_eval(2, -3, 0.5), Err(LegendreError::OrderOutOfRange));
        assert_eq!(q_at_zero(0, 1), Err(LegendreError::OrderOutOfRange));
        assert!(BasisIndex::new(4, 5).is_err());
        assert!(BasisIndex::new(4, -4).is_ok());
    }

    #[test]
    fn parity() {
        for n in 0..=12u32 {
            for m in 0..=n {
                let sign = if (n - m) % 2 == 0 { 1.0 } else { -1.0 };
                for &x in &[0.15, 0.5, 0.85] {
                    let plus = q_eval(n, m as i32, x).unwrap();
                    let minus = q_eval(n, m as i32, -x).unwrap();
                    assert_relative_eq!(minus, sign * plus, max_relative = 1e-13, epsilon = 1e-14);
                }
                assert_eq!(
                    BasisIndex::new(n, m as i32).unwrap().participates(),
                    (n - m) % 2 == 0
                );
            }
        }
    }

    #[test]
    fn orthonormality() {
        // ∫₋₁¹ Q_n^m Q_{n′}^m dx = δ_{nn′}; the integrand is a polynomial of
        // degree ≤ 60, so 64 Gauss points integrate it exactly.
        let rule = GaussLegendre::new(64);
        let n_max = 30u32;
        for &m in &[0u32, 1, 2, 5, 17, 30] {
            let count = (n_max - m + 1) as usize;
            let mut gram = alloc::vec![0.0f64; count * count];
            for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
                let col = q_all_degrees(m, n_max, x);
                for i in 0..count {
                    for j in i..count {
                        gram[i * count + j] += w * col[i] * col[j];
                    }
                }
            }
            for i in 0..count {
                for j in i..count {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    let got = gram[i * count + j];
                    assert!(
                        (got - expected).abs() < 1e-10,
                        "m={m} n={} n'={}: {got}",
                        m + i as u32,
                        m + j as u32
                    );
                }
            }
        }
    }

    #[test]
    fn recurrence_matches_extended_precision() {
        // References computed with a 50-digit run of the same recurrence.
        assert_relative_eq!(
            q_eval(100, 0, 0.3).unwrap(),
            0.572_700_326_051_256_9,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            q_eval(100, 0, 0.7).unwrap(),
            -0.773_250_980_294_147_2,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            q_eval(40, 17, 0.5).unwrap(),
            0.170_660_541_754_799_56,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            q_eval(30, 30, 0.2).unwrap(),
            0.958_839_452_202_452_9,
            max_relative = 1e-13
        );
    }

    #[test]
    fn ln_gamma_reference() {
        assert_relative_eq!(ln_gamma(1.0), 0.0, epsilon = 1e-15);
        assert_relative_eq!(ln_gamma(2.0), 0.0, epsilon = 1e-14);
        // ln(6!) for Γ(7), and a large argument against Stirling-dominated
        // regime: ln Γ(101) = ln(100!).
        assert_relative_eq!(ln_gamma(7.0), (720.0f64).ln(), max_relative = 1e-14);
        assert_relative_eq!(ln_gamma(0.5), core::f64::consts::PI.sqrt().ln(), max_relative = 1e-13);
        assert_relative_eq!(ln_gamma(101.0), 363.739_375_555_563_49, max_relative = 1e-14);
    }

    #[test]
    fn zero_table_lookup() {
        let table = QZeroTable::new(25);
        for n in 0..=25u32 {
            for m in -(n as i32)..=(n as i32) {
                assert_eq!(table.get(n, m), q_at_zero(n, m).unwrap());
            }
        }
    }
}
