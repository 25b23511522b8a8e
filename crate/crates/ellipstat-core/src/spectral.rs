//! Spectral diagonalization of the disc energy functional.
//!
//! On the spheroidal chart the transformed density `g(θ,φ) = σ(θ,φ) cosθ`
//! expands in the basis `Q_n^m(cosθ) e^{imφ}` (degrees with `n − m` even),
//! with coefficients
//!
//! ```text
//! g_n^m = (1/π) ∫₀^{π/2} ∫₀^{2π} g(θ,φ) Q_n^m(cosθ) e^{−imφ} sinθ dθ dφ.
//! ```
//!
//! The single-layer operator is block-diagonal over the degree `n` in this
//! basis: the on-disc potential `f(x) = (1/4π) ∫ σ(y)/|x−y| ds_y` has
//! coefficients `f_n^m = (√(ab)/4) Σ_{m′} d^n_{mm′} g_n^{m′}` with
//!
//! ```text
//! d^n_{mm′} = Q_n^m(0) Q_n^{m′}(0)/(2n+1) · ∫₀^{2π} e^{i(m−m′)φ}
//!             / √((b/a)cos²φ + (a/b)sin²φ) dφ,
//! ```
//!
//! and the energy `I_σ = ∫ f σ̄ ds` becomes the series
//!
//! ```text
//! I_σ = π ab² Σ_{n,m,m′} g_n^m conj(g_n^{m′}) Q_n^m(0) Q_n^{m′}(0)/(2n+1)
//!       · ∫₀^{π/2} cos((m−m′)φ)/√(1 − ε² cos²φ) dφ.
//! ```
//!
//! Both forms of the azimuthal integral are related by `ε² = 1 − b²/a²`:
//! the weight `1/√((b/a)cos² + (a/b)sin²)` equals `√(b/a)/√(1 − ε²cos²φ)`,
//! which is how the `π ab²` prefactor arises from `(π/4)(ab)^{3/2} Σ d g ḡ`.
//! The series is a squared norm, hence real and non-negative; truncation at
//! degree `N` keeps every computed digit deterministic: coefficients,
//! blocks, and the fixed ascending-`(n, m, m′)` Kahan summation do not
//! depend on any parallel scheduling.

#[allow(unused_imports)]
use crate::fmath::*;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::geometry::Ellipse;
use crate::legendre::{q_all_degrees, QZeroTable};
use crate::quadrature::{adaptive_gk, trapezoid_periodic, GaussLegendre};
use crate::sum::KahanComplex;

/// Failures of the spectral routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralError {
    /// Quadrature node counts cannot resolve the requested truncation.
    InsufficientNodes {
        /// Minimum admissible node count for the offending direction.
        required: usize,
        /// Count actually supplied.
        given: usize,
    },
    /// Eccentricity argument outside `[0, 1)`.
    ModulusOutOfRange,
}

impl core::fmt::Display for SpectralError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::InsufficientNodes { required, given } => {
                write!(f, "quadrature needs at least {required} nodes, got {given}")
            }
            Self::ModulusOutOfRange => write!(f, "eccentricity outside [0, 1)"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SpectralError {}

/// Coefficient table of a real density up to truncation degree `N`.
///
/// Only orders `m ≥ 0` with `n − m` even are stored; real densities satisfy
/// `g_n^{−m} = (−1)^m conj(g_n^m)` (the basis convention's sign together
/// with conjugation under `φ → −φ`), which [`SpectralCoefficients::get`]
/// applies on the fly. All other indices are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoefficients {
    truncation: u32,
    entries: BTreeMap<(u32, u32), Complex64>,
}

impl SpectralCoefficients {
    /// Truncation degree `N`.
    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    /// Coefficient at `(n, m)`, any sign of `m`; zero outside the stored
    /// index set.
    pub fn get(&self, n: u32, m: i32) -> Complex64 {
        let mu = m.unsigned_abs();
        let stored = match self.entries.get(&(n, mu)) {
            Some(&v) => v,
            None => return Complex64::new(0.0, 0.0),
        };
        if m >= 0 {
            stored
        } else {
            let sign = if mu % 2 == 0 { 1.0 } else { -1.0 };
            sign * stored.conj()
        }
    }

    /// Iterates over the stored half-table `((n, m), g_n^m)` with `m ≥ 0`,
    /// in ascending `(n, m)` order.
    pub fn stored(&self) -> impl Iterator<Item = ((u32, u32), Complex64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }
}

/// Expands the transformed density of `density` (given in Cartesian
/// coordinates on the disc of `e`) with default quadrature sizes
/// `2N + 16` polar Gauss–Legendre nodes and `max(64, 4N)` azimuthal
/// trapezoid nodes — enough to make quadrature error negligible against
/// truncation for polynomial-times-smooth densities.
pub fn expand_density<F: Fn(f64, f64) -> f64>(
    e: &Ellipse,
    density: F,
    n_max: u32,
) -> SpectralCoefficients {
    let n_polar = 2 * n_max as usize + 16;
    let n_azimuthal = (4 * n_max as usize).max(64);
    expand_density_with_nodes(e, density, n_max, n_polar, n_azimuthal)
        .expect("default node counts always resolve the truncation")
}

/// [`expand_density`] with explicit node counts. Requires at least `N + 1`
/// polar nodes (polynomial degree) and `2N + 2` azimuthal nodes (Nyquist
/// for order `N` harmonics).
pub fn expand_density_with_nodes<F: Fn(f64, f64) -> f64>(
    e: &Ellipse,
    density: F,
    n_max: u32,
    n_polar: usize,
    n_azimuthal: usize,
) -> Result<SpectralCoefficients, SpectralError> {
    let need_polar = n_max as usize + 1;
    if n_polar < need_polar {
        return Err(SpectralError::InsufficientNodes { required: need_polar, given: n_polar });
    }
    let need_azimuthal = 2 * n_max as usize + 2;
    if n_azimuthal < need_azimuthal {
        return Err(SpectralError::InsufficientNodes {
            required: need_azimuthal,
            given: n_azimuthal,
        });
    }

    // Polar nodes in x = cosθ on [0, 1]; azimuthal uniform grid.
    let rule = GaussLegendre::new(n_polar);
    let xs: Vec<f64> = rule.nodes().iter().map(|&t| 0.5 * (t + 1.0)).collect();
    let ws: Vec<f64> = rule.weights().iter().map(|&w| 0.5 * w).collect();
    let step = 2.0 * core::f64::consts::PI / n_azimuthal as f64;

    // Sample g = σ·cosθ on the tensor grid once.
    let mut samples = Vec::with_capacity(n_polar * n_azimuthal);
    for &x in &xs {
        let sin_t = (1.0 - x * x).sqrt();
        for k in 0..n_azimuthal {
            let phi = step * k as f64;
            let (sin_p, cos_p) = phi.sin_cos();
            let x1 = e.a() * sin_t * cos_p;
            let x2 = e.b() * sin_t * sin_p;
            samples.push(density(x1, x2) * x);
        }
    }

    let mut entries = BTreeMap::new();
    let mut transform = Vec::with_capacity(n_polar);
    for m in 0..=n_max {
        // Azimuthal transform A_m(x_i) = Σ_k g(x_i, φ_k) e^{−imφ_k} Δφ.
        transform.clear();
        for i in 0..n_polar {
            let mut acc = KahanComplex::new();
            for k in 0..n_azimuthal {
                let phase = -(f64::from(m)) * step * k as f64;
                let (s, c) = phase.sin_cos();
                acc.add(samples[i * n_azimuthal + k] * Complex64::new(c, s));
            }
            transform.push(acc.value() * step);
        }
        // Polar projection for every degree of this order in one sweep.
        for (i, (&x, &w)) in xs.iter().zip(&ws).enumerate() {
            let col = q_all_degrees(m, n_max, x);
            for n in (m..=n_max).step_by(2) {
                let q = col[(n - m) as usize];
                let term = transform[i] * (w * q / core::f64::consts::PI);
                *entries.entry((n, m)).or_insert(Complex64::new(0.0, 0.0)) += term;
            }
        }
    }
    Ok(SpectralCoefficients { truncation: n_max, entries })
}

/// One degree-`n` block `d^n_{mm′}` of the diagonalized operator.
///
/// Orders run over `m ∈ {−n, −n+2, …, n}` (`n − m` even; all other entries
/// of the full operator vanish through `Q_n^m(0)`). The block is Hermitian
/// — here real symmetric, since the azimuthal integral's sine part cancels
/// by the `φ → 2π − φ` symmetry of the weight — and positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalBlock {
    n: u32,
    orders: Vec<i32>,
    values: Vec<Complex64>,
}

impl DiagonalBlock {
    /// Degree of the block.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Participating orders, ascending.
    pub fn orders(&self) -> &[i32] {
        &self.orders
    }

    /// Number of participating orders (`n + 1`).
    pub fn size(&self) -> usize {
        self.orders.len()
    }

    /// Entry `d^n_{mm′}`. Panics if an order does not participate.
    pub fn get(&self, m: i32, m_prime: i32) -> Complex64 {
        let i = self.index_of(m);
        let j = self.index_of(m_prime);
        self.values[i * self.orders.len() + j]
    }

    fn index_of(&self, m: i32) -> usize {
        let n = self.n as i32;
        assert!(m.abs() <= n && (n - m) % 2 == 0, "order {m} not in block n={n}");
        ((m + n) / 2) as usize
    }
}

/// Absolute tolerance of the azimuthal weight integrals in [`block_d`].
const BLOCK_PHI_TOL: f64 = 1e-12;

/// Computes the degree-`n` block for the ellipse `e`.
///
/// The azimuthal integral is evaluated by the periodic trapezoid rule with
/// doubling node counts until successive values agree to 1e−12 absolute —
/// geometric convergence, since the weight is analytic and 2π-periodic.
pub fn block_d(e: &Ellipse, n: u32) -> DiagonalBlock {
    let zeros = QZeroTable::new(n);
    let orders: Vec<i32> = (-(n as i32)..=n as i32).step_by(2).collect();
    let ratio_ba = e.b() / e.a();
    let ratio_ab = e.a() / e.b();
    let weight = move |phi: f64| {
        let (s, c) = phi.sin_cos();
        1.0 / (ratio_ba * c * c + ratio_ab * s * s).sqrt()
    };

    // One integral per distinct |m − m′| (even, ≤ 2n); the sine part is
    // zero by symmetry, so only the cosine moments are computed.
    let mut moments = Vec::with_capacity(n as usize + 1);
    for half_delta in 0..=n {
        let delta = f64::from(2 * half_delta);
        let f = |phi: f64| (delta * phi).cos() * weight(phi);
        // Trapezoid needs to resolve the oscillation before doubling.
        let mut nodes = (4 * (2 * half_delta as usize + 1)).max(64);
        let mut value = trapezoid_periodic(f, nodes);
        loop {
            nodes *= 2;
            let refined = trapezoid_periodic(f, nodes);
            let done = (refined - value).abs() <= BLOCK_PHI_TOL;
            value = refined;
            if done {
                break;
            }
            assert!(nodes < (1 << 22), "azimuthal trapezoid failed to converge");
        }
        moments.push(value);
    }

    let size = orders.len();
    let mut values = Vec::with_capacity(size * size);
    for &m in &orders {
        for &mp in &orders {
            let q_m = zeros.get(n, m);
            let q_mp = zeros.get(n, mp);
            let delta = m.abs_diff(mp) / 2;
            let entry = q_m * q_mp / f64::from(2 * n + 1) * moments[delta as usize];
            values.push(Complex64::new(entry, 0.0));
        }
    }
    DiagonalBlock { n, orders, values }
}

/// Applies the block-diagonal operator:
/// `f_n^m = (√(ab)/4) Σ_{m′} d^n_{mm′} g_n^{m′}`.
///
/// The result holds the basis coefficients of the on-disc potential
/// `f(x) = (1/4π) ∫ σ(y)/|x−y| ds_y`, stored under the same real-density
/// half-table convention as the input (the block preserves the symmetry).
pub fn potential_coefficients(e: &Ellipse, g: &SpectralCoefficients) -> SpectralCoefficients {
    let n_max = g.truncation();
    let scale = (e.a() * e.b()).sqrt() / 4.0;
    let mut entries = BTreeMap::new();
    for n in 0..=n_max {
        let block = block_d(e, n);
        for m in (n % 2..=n).step_by(2) {
            let mut acc = KahanComplex::new();
            for &mp in block.orders() {
                acc.add(block.get(m as i32, mp) * g.get(n, mp));
            }
            entries.insert((n, m), acc.value() * scale);
        }
    }
    SpectralCoefficients { truncation: n_max, entries }
}

/// The angular integral `∫₀^{π/2} cos(Δm·φ)/√(1 − ε² cos²φ) dφ`.
///
/// Reduces to `K(ε)` at `Δm = 0` (substitute `φ → π/2 − φ`). Evaluated by
/// adaptive Gauss–Kronrod to 1e−13 absolute.
pub fn angular_integral(delta_m: u32, eps: f64) -> Result<f64, SpectralError> {
    if !(0.0..1.0).contains(&eps) {
        return Err(SpectralError::ModulusOutOfRange);
    }
    let delta = f64::from(delta_m);
    let est = adaptive_gk(
        |phi: f64| {
            let c = phi.cos();
            (delta * phi).cos() / (1.0 - eps * eps * c * c).sqrt()
        },
        0.0,
        core::f64::consts::FRAC_PI_2,
        1e-13,
    )
    .expect("analytic integrand with eps < 1 converges");
    Ok(est.value)
}

/// Evaluates the truncated energy series for the coefficients `g` on the
/// ellipse `e`.
///
/// The angular integral is cached per `|m − m′|` (ε is fixed by `e`), and
/// the sum runs in ascending `n`, then the full `(m, m′)` double loop, with
/// compensated accumulation — a fixed order, so the result is bit-identical
/// from run to run. The series is real up to rounding (imaginary part below
/// `1e−12·|result|`) and non-negative; the real part is returned.
pub fn energy_series(e: &Ellipse, g: &SpectralCoefficients) -> f64 {
    let n_max = g.truncation();
    let eps = e.eccentricity();
    let zeros = QZeroTable::new(n_max);

    // Angular integrals for every even Δ up to 2N, computed on demand.
    let mut cache: Vec<Option<f64>> = alloc::vec![None; 2 * n_max as usize + 1];
    let mut angular = |delta: u32| -> f64 {
        let slot = &mut cache[delta as usize];
        match *slot {
            Some(v) => v,
            None => {
                let v = angular_integral(delta, eps)
                    .expect("eccentricity of a valid ellipse is in [0,1)");
                *slot = Some(v);
                v
            }
        }
    };

    let mut total = KahanComplex::new();
    for n in 0..=n_max {
        let n_i = n as i32;
        let inv = 1.0 / f64::from(2 * n + 1);
        let mut m = -n_i;
        while m <= n_i {
            let g_m = g.get(n, m);
            let q_m = zeros.get(n, m);
            let mut mp = -n_i;
            while mp <= n_i {
                let g_mp = g.get(n, mp);
                let q_mp = zeros.get(n, mp);
                let j = angular(m.abs_diff(mp));
                total.add(g_m * g_mp.conj() * (q_m * q_mp * inv * j));
                mp += 2;
            }
            m += 2;
        }
    }
    let sum = total.value();
    let value = core::f64::consts::PI * e.a() * e.b() * e.b();
    let energy = value * sum.re;
    debug_assert!(
        sum.im.abs() <= 1e-12 * sum.re.abs().max(f64::MIN_POSITIVE),
        "energy series should be real"
    );
    energy
}

/// Energy of a density given directly as a Cartesian closure: expansion at
/// truncation `n_max` followed by [`energy_series`].
pub fn energy_of_density<F: Fn(f64, f64) -> f64>(e: &Ellipse, density: F, n_max: u32) -> f64 {
    let g = expand_density(e, density, n_max);
    energy_series(e, &g)
}

/// Parseval pairing `π ab Σ_{n,m} f_n^m conj(g_n^m)` over all orders (both
/// signs), which must reproduce [`energy_series`]; exposed for validation.
pub fn parseval_energy(
    e: &Ellipse,
    f: &SpectralCoefficients,
    g: &SpectralCoefficients,
) -> f64 {
    let n_max = f.truncation().min(g.truncation());
    let mut total = KahanComplex::new();
    for n in 0..=n_max {
        let n_i = n as i32;
        let mut m = -n_i;
        while m <= n_i {
            total.add(f.get(n, m) * g.get(n, m).conj());
            m += 2;
        }
    }
    core::f64::consts::PI * e.a() * e.b() * total.value().re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic;
    use crate::elliptic::{complete_e, k_minus_e_over_eps2};
    use crate::geometry::AffineDensity;
    use crate::legendre::q_at_zero;
    use crate::testutil::symmetric_eigenvalues;
    use approx::assert_relative_eq;
    use core::f64::consts::PI;

    fn ellipse(a: f64, b: f64) -> Ellipse {
        Ellipse::new(a, b).unwrap()
    }

    #[test]
    fn constant_density_coefficients() {
        let e = ellipse(1.0, 1.0);
        let g = expand_density(&e, |_, _| 1.0, 12);
        assert_relative_eq!(
            g.get(0, 0).re,
            core::f64::consts::FRAC_1_SQRT_2,
            max_relative = 1e-13
        );
        // g_2^0 = 2∫₀¹ x·√(5/2)(3x²−1)/2 dx = √(5/2)/4.
        assert_relative_eq!(g.get(2, 0).re, (2.5f64).sqrt() / 4.0, max_relative = 1e-13);
        for ((n, m), v) in g.stored() {
            if m != 0 {
                assert!(
                    (v.re * v.re + v.im * v.im).sqrt() < 1e-12,
                    "m={m} n={n} leaked: {v}"
                );
            }
            assert!(v.im.abs() < 1e-13);
        }
        // Structural zeros: odd n − m, and indices beyond the truncation.
        assert_eq!(g.get(1, 0), Complex64::new(0.0, 0.0));
        assert_eq!(g.get(13, 1), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn major_axis_density_symmetry() {
        // σ = x1/a: only m = ±1 present, with g_n^{−1} = −g_n^1 (real).
        let e = ellipse(1.5, 0.5);
        let a = e.a();
        let g = expand_density(&e, move |x1, _| x1 / a, 15);
        for ((n, m), v) in g.stored() {
            let norm = (v.re * v.re + v.im * v.im).sqrt();
            if m != 1 {
                assert!(norm < 1e-12, "unexpected order m={m} at n={n}: {v}");
            } else {
                assert!(v.im.abs() < 1e-13, "g_n^1 should be real for cos φ density");
            }
        }
        assert!(g.get(1, 1).re.abs() > 0.1);
        for n in [1u32, 3, 5, 9] {
            let plus = g.get(n, 1);
            let minus = g.get(n, -1);
            assert_relative_eq!(minus.re, -plus.re, max_relative = 1e-13, epsilon = 1e-15);
            assert!(minus.im.abs() < 1e-13);
        }
    }

    #[test]
    fn minor_axis_density_symmetry() {
        // σ = x2/b: only m = ±1 present, purely imaginary, g_n^{−1} = +g_n^1.
        let e = ellipse(1.5, 0.5);
        let b = e.b();
        let g = expand_density(&e, move |_, x2| x2 / b, 15);
        for n in [1u32, 3, 5, 9] {
            let plus = g.get(n, 1);
            let minus = g.get(n, -1);
            assert!(plus.re.abs() < 1e-13, "g_n^1 should be imaginary for sin φ density");
            assert_relative_eq!(minus.im, plus.im, max_relative = 1e-13, epsilon = 1e-15);
        }
        assert!(g.get(1, 1).im.abs() > 0.1);
    }

    #[test]
    fn insufficient_nodes_rejected() {
        let e = ellipse(1.0, 1.0);
        assert_eq!(
            expand_density_with_nodes(&e, |_, _| 1.0, 10, 5, 64).unwrap_err(),
            SpectralError::InsufficientNodes { required: 11, given: 5 }
        );
        assert_eq!(
            expand_density_with_nodes(&e, |_, _| 1.0, 10, 26, 20).unwrap_err(),
            SpectralError::InsufficientNodes { required: 22, given: 20 }
        );
    }

    #[test]
    fn circle_blocks_are_diagonal() {
        let e = ellipse(1.0, 1.0);
        let block = block_d(&e, 0);
        assert_relative_eq!(block.get(0, 0).re, PI, max_relative = 1e-13);

        let block = block_d(&e, 6);
        for &m in block.orders() {
            for &mp in block.orders() {
                let v = block.get(m, mp);
                if m == mp {
                    let q = q_at_zero(6, m).unwrap();
                    assert_relative_eq!(
                        v.re,
                        2.0 * PI * q * q / 13.0,
                        max_relative = 1e-12
                    );
                } else {
                    assert!(v.re.abs() < 1e-13);
                }
                assert_eq!(v.im, 0.0);
            }
        }
    }

    #[test]
    fn ellipse_block_entry_against_direct_quadrature() {
        // n = 2, a = 1.5, b = 0.5, entry (0,0): Q_2^0(0)²/5 times the
        // azimuthal weight integral, independently evaluated here by a
        // fixed-resolution trapezoid.
        let e = ellipse(1.5, 0.5);
        let block = block_d(&e, 2);
        let weight_integral = trapezoid_periodic(
            |phi: f64| {
                let (s, c) = phi.sin_cos();
                1.0 / ((1.0 / 3.0) * c * c + 3.0 * s * s).sqrt()
            },
            1 << 14,
        );
        let q = q_at_zero(2, 0).unwrap();
        assert_relative_eq!(
            block.get(0, 0).re,
            q * q / 5.0 * weight_integral,
            max_relative = 1e-12
        );
    }

    #[test]
    fn blocks_hermitian_positive_semidefinite() {
        for &(a, b) in &[(1.0, 1.0), (1.5, 0.5), (1.0, 0.8)] {
            let e = ellipse(a, b);
            for n in 0..=20u32 {
                let block = block_d(&e, n);
                let size = block.size();
                let mut mat = alloc::vec![0.0f64; size * size];
                for (i, &m) in block.orders().iter().enumerate() {
                    for (j, &mp) in block.orders().iter().enumerate() {
                        let v = block.get(m, mp);
                        let vt = block.get(mp, m);
                        assert_eq!(v.re, vt.re, "hermiticity broken at n={n}");
                        assert_eq!(v.im, -vt.im);
                        mat[i * size + j] = v.re;
                    }
                }
                let eigs = symmetric_eigenvalues(&mut mat, size);
                for lambda in eigs {
                    assert!(lambda >= -1e-12, "negative eigenvalue {lambda} at n={n}");
                }
            }
        }
    }

    #[test]
    fn potential_linearity_and_scaling() {
        let e = ellipse(1.5, 0.5);
        let zero = expand_density(&e, |_, _| 0.0, 8);
        let f = potential_coefficients(&e, &zero);
        for (_, v) in f.stored() {
            assert_eq!(v, Complex64::new(0.0, 0.0));
        }

        // Doubling both axes doubles every f (√(ab) prefactor; the block
        // depends only on b/a, and g of σ(x/λ scaling) is unchanged when
        // the density is expressed in stretched coordinates).
        let g1 = expand_density(&e, |x1, x2| x1 / 1.5 + 0.3 * x2 / 0.5 + 0.7, 10);
        let e2 = ellipse(3.0, 1.0);
        let g2 = expand_density(&e2, |x1, x2| x1 / 3.0 + 0.3 * x2 / 1.0 + 0.7, 10);
        let f1 = potential_coefficients(&e, &g1);
        let f2 = potential_coefficients(&e2, &g2);
        for (((n, m), v1), ((n2, m2), v2)) in f1.stored().zip(f2.stored()) {
            assert_eq!((n, m), (n2, m2));
            assert_relative_eq!(v2.re, 2.0 * v1.re, max_relative = 1e-12, epsilon = 1e-14);
            assert_relative_eq!(v2.im, 2.0 * v1.im, max_relative = 1e-12, epsilon = 1e-14);
        }
    }

    #[test]
    fn circle_potential_matches_direct_expansion() {
        // On the unit disc with σ ≡ 1 the potential is known in closed
        // form: f(r) = (1/4π)·4E(r) = E(r)/π at radius r = sinθ. Its basis
        // coefficients 2∫₀¹ f Q_n dx must match the block application.
        let e = ellipse(1.0, 1.0);
        let g = expand_density(&e, |_, _| 1.0, 10);
        let f = potential_coefficients(&e, &g);
        for n in [0u32, 2, 4, 6] {
            // d is diagonal on the circle: f_n^0 = (π/2) Q_n(0)² g_n^0/(2n+1).
            let q = q_at_zero(n, 0).unwrap();
            let expected = PI / 2.0 * q * q * g.get(n, 0).re / f64::from(2 * n + 1);
            assert_relative_eq!(f.get(n, 0).re, expected, max_relative = 1e-12);

            let direct = crate::quadrature::adaptive_gk(
                |x: f64| {
                    let r = (1.0 - x * x).sqrt();
                    let potential = complete_e(r).unwrap() / PI;
                    2.0 * potential * crate::legendre::q_eval(n, 0, x).unwrap()
                },
                0.0,
                1.0,
                1e-12,
            )
            .unwrap()
            .value;
            assert_relative_eq!(f.get(n, 0).re, direct, max_relative = 1e-9, epsilon = 1e-11);
        }
    }

    #[test]
    fn angular_integral_reference_cases() {
        for &eps in &[0.0, 0.3, 2.0 * 2.0f64.sqrt() / 3.0] {
            assert_relative_eq!(
                angular_integral(0, eps).unwrap(),
                crate::elliptic::complete_k(eps).unwrap(),
                max_relative = 1e-12
            );
        }
        assert!(angular_integral(2, 0.0).unwrap().abs() < 1e-14);
        assert_eq!(angular_integral(0, 1.0).unwrap_err(), SpectralError::ModulusOutOfRange);

        // Bracket identity: J(2, ε) = 2(K−E)/ε² − K(ε).
        for &eps in &[0.2, 0.5, 0.8, 0.9428090415820634] {
            let j2 = angular_integral(2, eps).unwrap();
            let expected = 2.0 * k_minus_e_over_eps2(eps).unwrap()
                - crate::elliptic::complete_k(eps).unwrap();
            assert_relative_eq!(j2, expected, max_relative = 1e-11, epsilon = 1e-13);
        }
    }

    #[test]
    fn circle_series_first_term_and_monotonicity() {
        let e = ellipse(1.0, 1.0);
        let g0 = expand_density(&e, |_, _| 1.0, 0);
        // Single term: π·(1/2)·(1/2)·K(0) = π²/8.
        assert_relative_eq!(energy_series(&e, &g0), PI * PI / 8.0, max_relative = 1e-12);

        let mut prev = 0.0;
        for n_max in [0u32, 2, 4, 8, 16, 30] {
            let g = expand_density(&e, |_, _| 1.0, n_max);
            let energy = energy_series(&e, &g);
            assert!(energy > prev, "partial sums should increase");
            assert!(energy < 4.0 / 3.0 + 1e-9);
            prev = energy;
        }
        assert_relative_eq!(prev, 4.0 / 3.0, max_relative = 1e-5);
    }

    #[test]
    fn circle_linear_density_series() {
        let e = ellipse(1.0, 1.0);
        let energy = energy_of_density(&e, |x1, _| x1, 30);
        assert_relative_eq!(energy, 2.0 / 15.0, max_relative = 1e-4);
    }

    #[test]
    fn series_matches_closed_forms_on_ellipse() {
        let e = ellipse(1.5, 0.5);
        let a = e.a();
        let b = e.b();
        let cases: [(fn(f64, f64, f64, f64) -> f64, f64); 3] = [
            (|_, _, _, _| 1.0, analytic::i_sigma0(&e)),
            (|x1, _, a, _| x1 / a, analytic::i_sigma1(&e)),
            (|_, x2, _, b| x2 / b, analytic::i_sigma2(&e)),
        ];
        for (density, reference) in cases {
            let energy = energy_of_density(&e, move |x1, x2| density(x1, x2, a, b), 30);
            assert!(energy >= 0.0);
            assert_relative_eq!(energy, reference, max_relative = 1e-4);
        }
    }

    #[test]
    fn parseval_pairing_reproduces_series() {
        let e = ellipse(1.2, 0.7);
        let d = AffineDensity::new(0.8, -1.1, 0.6).unwrap();
        let g = expand_density(&e, move |x1, x2| d.evaluate(&e, x1, x2), 20);
        let f = potential_coefficients(&e, &g);
        let series = energy_series(&e, &g);
        let pairing = parseval_energy(&e, &f, &g);
        assert_relative_eq!(series, pairing, max_relative = 1e-10);
    }
}
