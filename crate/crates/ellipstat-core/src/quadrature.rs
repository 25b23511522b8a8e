//! Shared numerical integration rules.
//!
//! Three rules cover every integral in this crate:
//!
//! * [`GaussLegendre`] — fixed-order Gauss–Legendre on an interval, exact for
//!   polynomials of degree `2n − 1`. Used for the polar direction of spectral
//!   projections and for the regularized triangle-pair integrals.
//! * [`adaptive_gk`] — globally adaptive Gauss–Kronrod (7/15 pair) with an
//!   absolute-tolerance stopping rule. Used wherever an integrand is smooth
//!   but has no convenient fixed-order bound (elliptic-integral cross-checks,
//!   azimuthal kernel integrals).
//! * [`trapezoid_periodic`] — the equal-weight trapezoid rule on `[0, 2π)`,
//!   which is spectrally accurate for smooth periodic integrands.

#[allow(unused_imports)]
use crate::fmath::*;
use alloc::vec::Vec;

use crate::sum::Kahan;

/// Gauss–Legendre nodes and weights on the reference interval `[-1, 1]`.
///
/// Nodes are computed by Newton iteration on the Legendre polynomial `P_n`
/// starting from the Chebyshev-like estimate `cos(π(i + 3/4)/(n + 1/2))`,
/// with weights `w_i = 2 / ((1 − x_i²) P_n′(x_i)²)`. Accuracy is limited only
/// by rounding for the orders used here (n ≲ 200).
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule. Panics for `n = 0`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            // Newton: converges in 3-4 steps from the asymptotic start.
            for _ in 0..50 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-15 * x.abs().max(1.0) {
                    let (p, d) = legendre_with_derivative(n, x);
                    dp = d;
                    x -= p / d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // Enforce exact symmetry: store each root once, mirrored.
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// True when the rule is empty (never, by construction).
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes in ascending order on `[-1, 1]`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Weights matching [`Self::nodes`]; all positive, summing to 2.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrates `f` over `[a, b]` by affine transformation of the rule.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = Kahan::new();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(mid + half * x));
        }
        half * acc.value()
    }
}

/// Evaluates `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = p_next;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let nf = n as f64;
    // P_n'(x) = n (x P_n − P_{n−1}) / (x² − 1); the Newton starts never land
    // on ±1, so the denominator is safe.
    let dp = nf * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

/// Value and error estimate returned by [`adaptive_gk`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate {
    /// Integral approximation.
    pub value: f64,
    /// Conservative absolute error estimate.
    pub error: f64,
}

/// Failure of the adaptive scheme to meet the requested tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NotConverged {
    /// Best estimate reached before giving up.
    pub best: QuadEstimate,
}

impl core::fmt::Display for NotConverged {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "adaptive quadrature did not converge (value {:e}, error {:e})",
            self.best.value, self.best.error
        )
    }
}

#[cfg(feature = "std")]
impl std::error::Error for NotConverged {}

/// Kronrod-15 abscissas, positive half in descending order (last entry 0).
/// Odd positions are the embedded Gauss-7 points. Derived by solving the
/// moment conditions for the degree-8 Stieltjes polynomial orthogonal to
/// `P_7(x) dx` and matching moments for the weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

/// Kronrod-15 weights matching [`XGK`].
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// Gauss-7 weights for the embedded rule (nodes `XGK[1], XGK[3], XGK[5], 0`).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// One Gauss–Kronrod 7/15 panel over `[a, b]`: returns the Kronrod value and
/// a QUADPACK-style error estimate based on the Gauss/Kronrod discrepancy.
pub(crate) fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> QuadEstimate {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_mid = f(mid);
    let mut fv_low = [0.0; 7]; // f(mid − half·x_i)
    let mut fv_high = [0.0; 7]; // f(mid + half·x_i)
    for i in 0..7 {
        fv_low[i] = f(mid - half * XGK[i]);
        fv_high[i] = f(mid + half * XGK[i]);
    }

    let mut resk = WGK[7] * f_mid;
    let mut resg = WG[3] * f_mid;
    let mut resabs = WGK[7] * f_mid.abs();
    for i in 0..7 {
        let sum = fv_low[i] + fv_high[i];
        resk += WGK[i] * sum;
        resabs += WGK[i] * (fv_low[i].abs() + fv_high[i].abs());
        if i % 2 == 1 {
            resg += WG[i / 2] * sum;
        }
    }
    // resasc: Kronrod estimate of ∫|f − mean|, used to scale the error so
    // that smooth panels are not flagged by pure cancellation noise.
    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * (f_mid - mean).abs();
    for i in 0..7 {
        resasc += WGK[i] * ((fv_low[i] - mean).abs() + (fv_high[i] - mean).abs());
    }

    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        let scaled = 200.0 * err / resasc;
        err = resasc * if scaled < 1.0 { scaled * scaled.sqrt() } else { 1.0 };
    }
    let round_off = 50.0 * f64::EPSILON * resabs;
    if round_off > err {
        err = round_off;
    }
    QuadEstimate { value, error: err }
}

/// Upper bound on panel count for [`adaptive_gk`]; generous for the smooth
/// and weakly singular integrands this crate produces.
const MAX_PANELS: usize = 4096;

/// Globally adaptive Gauss–Kronrod integration of `f` over `[a, b]` to
/// absolute tolerance `abs_tol`: the panel with the largest error estimate is
/// bisected until the summed estimate drops below the tolerance.
pub fn adaptive_gk<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
) -> Result<QuadEstimate, NotConverged> {
    assert!(abs_tol > 0.0, "tolerance must be positive");
    if a == b {
        return Ok(QuadEstimate { value: 0.0, error: 0.0 });
    }

    struct Panel {
        a: f64,
        b: f64,
        est: QuadEstimate,
    }

    let mut panels = Vec::with_capacity(64);
    panels.push(Panel { a, b, est: gk15(&mut f, a, b) });

    loop {
        let mut value = Kahan::new();
        let mut error = Kahan::new();
        for p in &panels {
            value.add(p.est.value);
            error.add(p.est.error);
        }
        let est = QuadEstimate { value: value.value(), error: error.value() };
        if est.error <= abs_tol {
            return Ok(est);
        }
        if panels.len() >= MAX_PANELS {
            return Err(NotConverged { best: est });
        }

        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            if p.est.error > panels[worst].est.error {
                worst = i;
            }
        }
        let Panel { a: pa, b: pb, .. } = panels[worst];
        let mid = 0.5 * (pa + pb);
        if mid <= pa.min(pb) || mid >= pa.max(pb) {
            // Interval exhausted at machine precision.
            return Err(NotConverged { best: est });
        }
        panels[worst] = Panel { a: pa, b: mid, est: gk15(&mut f, pa, mid) };
        panels.push(Panel { a: mid, b: pb, est: gk15(&mut f, mid, pb) });
    }
}

/// Trapezoid rule for a `2π`-periodic integrand: `(2π/n) Σ f(2πk/n)`.
///
/// For smooth periodic `f` the error decays faster than any power of `1/n`,
/// which makes this the right rule for azimuthal Fourier-type integrals.
pub fn trapezoid_periodic<F: FnMut(f64) -> f64>(mut f: F, n: usize) -> f64 {
    assert!(n >= 1);
    let step = 2.0 * core::f64::consts::PI / n as f64;
    let mut acc = Kahan::new();
    for k in 0..n {
        acc.add(f(step * k as f64));
    }
    step * acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_structure() {
        for n in [1, 2, 3, 7, 20, 76] {
            let rule = GaussLegendre::new(n);
            assert_eq!(rule.len(), n);
            let total: f64 = rule.weights().iter().sum();
            assert_relative_eq!(total, 2.0, max_relative = 1e-14);
            for i in 0..n {
                assert!(rule.weights()[i] > 0.0);
                assert_relative_eq!(
                    rule.nodes()[i],
                    -rule.nodes()[n - 1 - i],
                    epsilon = 1e-15
                );
                if i > 0 {
                    assert!(rule.nodes()[i] > rule.nodes()[i - 1]);
                }
            }
        }
    }

    #[test]
    fn gauss_legendre_polynomial_exactness() {
        // n points are exact through degree 2n−1.
        let rule = GaussLegendre::new(5);
        let val = rule.integrate(-1.0, 1.0, |x| x.powi(9) + 3.0 * x.powi(4) - x);
        assert_relative_eq!(val, 6.0 / 5.0, max_relative = 1e-14);

        let rule = GaussLegendre::new(12);
        let val = rule.integrate(0.0, 1.0, |x| x.powi(23));
        assert_relative_eq!(val, 1.0 / 24.0, max_relative = 1e-13);
    }

    #[test]
    fn gauss_legendre_smooth_integrand() {
        let rule = GaussLegendre::new(20);
        let val = rule.integrate(0.0, 1.0, f64::exp);
        assert_relative_eq!(val, core::f64::consts::E - 1.0, max_relative = 1e-15);

        let rule = GaussLegendre::new(76);
        let val = rule.integrate(-1.0, 1.0, |x| 1.0 / (1.0 + x * x));
        assert_relative_eq!(val, core::f64::consts::FRAC_PI_2, max_relative = 1e-14);
    }

    #[test]
    fn kronrod_panel_exactness() {
        // The 15-point Kronrod rule is exact through degree 22.
        let est = gk15(&mut |x: f64| x.powi(22), -1.0, 1.0);
        assert_relative_eq!(est.value, 2.0 / 23.0, max_relative = 1e-14);
        let est = gk15(&mut |x: f64| x.powi(21) + x.powi(14), 0.0, 1.0);
        assert_relative_eq!(est.value, 1.0 / 22.0 + 1.0 / 15.0, max_relative = 1e-14);
    }

    #[test]
    fn adaptive_smooth() {
        let est = adaptive_gk(f64::sin, 0.0, core::f64::consts::PI, 1e-13).unwrap();
        assert_relative_eq!(est.value, 2.0, max_relative = 1e-14);
        assert!(est.error <= 1e-13);
    }

    #[test]
    fn adaptive_endpoint_singularity() {
        // ∫₀¹ ln x dx = −1: integrable singularity, forces real subdivision.
        let est = adaptive_gk(|x: f64| x.ln(), 0.0, 1.0, 1e-12).unwrap();
        assert_relative_eq!(est.value, -1.0, max_relative = 1e-12);
    }

    #[test]
    fn adaptive_oscillatory() {
        // ∫₀^{2π} cos(10 x) e^x dx = (e^{2π} − 1)/101.
        let est = adaptive_gk(
            |x: f64| (10.0 * x).cos() * x.exp(),
            0.0,
            2.0 * core::f64::consts::PI,
            1e-10,
        )
        .unwrap();
        let exact = ((2.0 * core::f64::consts::PI).exp() - 1.0) / 101.0;
        assert_relative_eq!(est.value, exact, max_relative = 1e-12);
    }

    #[test]
    fn adaptive_reports_divergence() {
        // 1/x is not integrable at 0; the panel budget must trip.
        let res = adaptive_gk(|x: f64| if x == 0.0 { 0.0 } else { 1.0 / x }, 0.0, 1.0, 1e-10);
        assert!(res.is_err());
    }

    #[test]
    fn trapezoid_spectral_accuracy() {
        // ∫₀^{2π} e^{cos φ} dφ = 2π I₀(1).
        let exact = 7.954_926_521_012_845_3;
        let val = trapezoid_periodic(|phi: f64| phi.cos().exp(), 32);
        assert_relative_eq!(val, exact, max_relative = 1e-15);
        // Constant shift: exact for any n.
        let val = trapezoid_periodic(|_| 2.5, 7);
        assert_relative_eq!(val, 5.0 * core::f64::consts::PI, max_relative = 1e-15);
    }

    #[test]
    fn trapezoid_resolves_harmonics() {
        // cos(kφ) integrates to zero exactly as long as n does not divide k.
        for k in 1..10 {
            let val = trapezoid_periodic(|phi: f64| (k as f64 * phi).cos(), 64);
            assert!(val.abs() < 1e-13, "harmonic {k} leaked: {val}");
        }
    }
}
