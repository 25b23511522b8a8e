//! The elliptical disc, affine charge densities, and the spheroidal
//! parametrization shared by every computational route.
//!
//! The disc is `x1²/a² + x2²/b² ≤ 1` with `x1` along the major axis. The
//! spheroidal chart
//!
//! ```text
//! x1 = a sinθ cosφ,   x2 = b sinθ sinφ,   θ ∈ [0, π/2], φ ∈ [0, 2π),
//! ```
//!
//! covers the disc with elemental area `ab sinθ cosθ dθ dφ`; the extra
//! `cosθ` is the Jacobian factor that the spectral expansion absorbs into
//! the transformed density `g(θ,φ) = σ(θ,φ) cosθ`.

#[allow(unused_imports)]
use crate::fmath::*;

/// Geometry violations detected at construction time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryError {
    /// Semi-axes must satisfy `a ≥ b > 0` with both finite.
    InvalidSemiAxes,
    /// Density coefficients must be finite.
    NonFiniteDensity,
    /// Spheroidal angles outside `θ ∈ [0, π/2]`, `φ ∈ [0, 2π)`.
    AngleOutOfRange,
}

impl core::fmt::Display for GeometryError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::InvalidSemiAxes => write!(f, "semi-axes must satisfy a >= b > 0"),
            Self::NonFiniteDensity => write!(f, "density coefficients must be finite"),
            Self::AngleOutOfRange => write!(f, "spheroidal angles outside their ranges"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GeometryError {}

/// An ellipse with semi-axes `a ≥ b > 0`, the major axis along `x1`.
///
/// The circle `a = b` is admitted; routines whose formulas degenerate at
/// eccentricity zero (removable singularities) handle that limit through
/// their series branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    a: f64,
    b: f64,
}

impl Ellipse {
    /// Validates `a ≥ b > 0` (finite) and builds the ellipse.
    pub fn new(a: f64, b: f64) -> Result<Self, GeometryError> {
        if !(a.is_finite() && b.is_finite() && b > 0.0 && a >= b) {
            return Err(GeometryError::InvalidSemiAxes);
        }
        Ok(Self { a, b })
    }

    /// Major semi-axis `a`.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Minor semi-axis `b`.
    pub fn b(&self) -> f64 {
        self.b
    }

    /// Eccentricity `ε = √(1 − b²/a²) ∈ [0, 1)`.
    pub fn eccentricity(&self) -> f64 {
        if self.a == self.b {
            return 0.0;
        }
        let ratio = self.b / self.a;
        (1.0 - ratio * ratio).sqrt()
    }

    /// Disc area `πab`.
    pub fn area(&self) -> f64 {
        core::f64::consts::PI * self.a * self.b
    }

    /// Maps a spheroidal point to Cartesian coordinates
    /// `(a sinθ cosφ, b sinθ sinφ)`; the image satisfies
    /// `x1²/a² + x2²/b² ≤ 1`, with equality exactly at `θ = π/2`.
    pub fn spheroidal_to_cartesian(&self, p: SpheroidalPoint) -> (f64, f64) {
        let (sin_t, _) = p.theta.sin_cos();
        let (sin_p, cos_p) = p.phi.sin_cos();
        (self.a * sin_t * cos_p, self.b * sin_t * sin_p)
    }
}

/// Affine surface-charge density `σ(x) = α0 + α1 x1/a + α2 x2/b`.
///
/// All coefficients are real; energies are quadratic forms in `(α0, α1, α2)`
/// so complex conjugates in the energy functional reduce to plain products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineDensity {
    /// Constant coefficient `α0`.
    pub alpha0: f64,
    /// Coefficient `α1` of `x1/a`.
    pub alpha1: f64,
    /// Coefficient `α2` of `x2/b`.
    pub alpha2: f64,
}

impl AffineDensity {
    /// Validates finiteness and builds the density.
    pub fn new(alpha0: f64, alpha1: f64, alpha2: f64) -> Result<Self, GeometryError> {
        if !(alpha0.is_finite() && alpha1.is_finite() && alpha2.is_finite()) {
            return Err(GeometryError::NonFiniteDensity);
        }
        Ok(Self { alpha0, alpha1, alpha2 })
    }

    /// The constant density `σ ≡ α0`.
    pub fn constant(alpha0: f64) -> Self {
        Self { alpha0, alpha1: 0.0, alpha2: 0.0 }
    }

    /// Evaluates `σ` at a Cartesian point of the disc of `e`.
    pub fn evaluate(&self, e: &Ellipse, x1: f64, x2: f64) -> f64 {
        self.alpha0 + self.alpha1 * x1 / e.a() + self.alpha2 * x2 / e.b()
    }

    /// Evaluates `σ` at a spheroidal point:
    /// `α0 + α1 sinθ cosφ + α2 sinθ sinφ`.
    pub fn evaluate_spheroidal(&self, p: SpheroidalPoint) -> f64 {
        let (sin_t, _) = p.theta.sin_cos();
        let (sin_p, cos_p) = p.phi.sin_cos();
        self.alpha0 + self.alpha1 * sin_t * cos_p + self.alpha2 * sin_t * sin_p
    }
}

/// A point of the spheroidal chart, `θ ∈ [0, π/2]`, `φ ∈ [0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpheroidalPoint {
    /// Polar angle; `θ = 0` is the disc center, `θ = π/2` the rim.
    pub theta: f64,
    /// Azimuth.
    pub phi: f64,
}

impl SpheroidalPoint {
    /// Validates the angle ranges and builds the point.
    pub fn new(theta: f64, phi: f64) -> Result<Self, GeometryError> {
        let two_pi = 2.0 * core::f64::consts::PI;
        if !(0.0..=core::f64::consts::FRAC_PI_2).contains(&theta)
            || !(0.0..two_pi).contains(&phi)
        {
            return Err(GeometryError::AngleOutOfRange);
        }
        Ok(Self { theta, phi })
    }
}

/// The transformed density `g(θ,φ) = σ(θ,φ) cosθ` expanded by the spectral
/// route: the `cosθ` factor comes from the elemental area of the chart.
pub fn density_on_sphere(d: &AffineDensity, p: SpheroidalPoint) -> f64 {
    d.evaluate_spheroidal(p) * p.theta.cos()
}
