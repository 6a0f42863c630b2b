//! Geometry of the surface of revolution and the potentials it induces.
//!
//! The surface is described by its radius `R(x, δ)` along the symmetry axis.
//! All potentials are functions of `R` and its first three derivatives.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Radius and its first three derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivs {
    pub r: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl Derivs {
    pub fn constant(r: f64) -> Self {
        Self { r, d1: 0.0, d2: 0.0, d3: 0.0 }
    }

    /// Derivatives of `R(x/ε)`-type slow profiles seen in the fast variable:
    /// the k-th derivative picks up a factor `ε^k`.
    pub fn slow_scaled(self, eps: f64) -> Self {
        Self { r: self.r, d1: eps * self.d1, d2: eps * eps * self.d2, d3: eps * eps * eps * self.d3 }
    }
}

/// User-supplied radius `R(x, δ)`.
pub type RadiusFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Closed-form profile families plus an arbitrary closure.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileShape {
    /// `R = radius`.
    Uniform { radius: f64 },
    /// `R = base + amplitude · exp(−(x/width)²)`.
    GaussianBump { base: f64, amplitude: f64, width: f64 },
    /// `R = base · (1 + amplitude · tanh(x/width))`.
    TanhNeck { base: f64, amplitude: f64, width: f64 },
    /// `R = base + slope · x`.
    Linear { base: f64, slope: f64 },
    /// `R = scale · cosh(x)`.
    Cosh { scale: f64 },
    /// Arbitrary radius, differentiated numerically.
    #[serde(skip)]
    Custom(RadiusFn),
}

impl fmt::Debug for ProfileShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Uniform { radius } => write!(f, "Uniform({radius})"),
            Self::GaussianBump { base, amplitude, width } => write!(f, "GaussianBump({base}, {amplitude}, {width})"),
            Self::TanhNeck { base, amplitude, width } => write!(f, "TanhNeck({base}, {amplitude}, {width})"),
            Self::Linear { base, slope } => write!(f, "Linear({base}, {slope})"),
            Self::Cosh { scale } => write!(f, "Cosh({scale})"),
            Self::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl ProfileShape {
    /// Analytic derivatives where available; `None` for custom closures.
    fn analytic(&self, x: f64) -> Option<Derivs> {
        Some(match *self {
            Self::Uniform { radius } => Derivs::constant(radius),
            Self::GaussianBump { base, amplitude, width } => {
                let u = x / width;
                let g = amplitude * (-u * u).exp();
                let w2 = width * width;
                Derivs {
                    r: base + g,
                    d1: g * (-2.0 * u) / width,
                    d2: g * (4.0 * u * u - 2.0) / w2,
                    d3: g * (12.0 * u - 8.0 * u * u * u) / (w2 * width),
                }
            }
            Self::TanhNeck { base, amplitude, width } => {
                let t = (x / width).tanh();
                let s2 = 1.0 - t * t;
                let k = base * amplitude;
                Derivs {
                    r: base + k * t,
                    d1: k * s2 / width,
                    d2: k * (-2.0 * t * s2) / (width * width),
                    d3: k * (-2.0 * s2 * (1.0 - 3.0 * t * t)) / width.powi(3),
                }
            }
            Self::Linear { base, slope } => Derivs { r: base + slope * x, d1: slope, d2: 0.0, d3: 0.0 },
            Self::Cosh { scale } => {
                Derivs { r: scale * x.cosh(), d1: scale * x.sinh(), d2: scale * x.cosh(), d3: scale * x.sinh() }
            }
            Self::Custom(_) => return None,
        })
    }

    /// The same family multiplied by `factor` (all lengths in R scale).
    fn scaled(&self, factor: f64) -> Self {
        match self.clone() {
            Self::Uniform { radius } => Self::Uniform { radius: radius * factor },
            Self::GaussianBump { base, amplitude, width } => {
                Self::GaussianBump { base: base * factor, amplitude: amplitude * factor, width }
            }
            Self::TanhNeck { base, amplitude, width } => Self::TanhNeck { base: base * factor, amplitude, width },
            Self::Linear { base, slope } => Self::Linear { base: base * factor, slope: slope * factor },
            Self::Cosh { scale } => Self::Cosh { scale: scale * factor },
            Self::Custom(f) => Self::Custom(Arc::new(move |x, d| factor * f(x, d))),
        }
    }
}

/// Central-difference derivatives of order 1..=3 with one Richardson step.
pub fn richardson_derivs(f: &dyn Fn(f64) -> f64, x: f64, scale: f64) -> Derivs {
    let d1 = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    let d2 = |h: f64| (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    let d3 = |h: f64| (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h);
    let rich = |g: &dyn Fn(f64) -> f64, h: f64| (4.0 * g(h / 2.0) - g(h)) / 3.0;
    Derivs { r: f(x), d1: rich(&d1, 2e-3 * scale), d2: rich(&d2, 1e-2 * scale), d3: rich(&d3, 2e-2 * scale) }
}

/// A surface of revolution with radius `R(x, δ)` in a magnetic field `B`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurfaceProfile {
    pub shape: ProfileShape,
    /// Axial magnetic field `B ≥ 0`.
    pub magnetic_field: f64,
    /// Largest admissible `δ`.
    #[serde(default = "default_delta_max")]
    pub delta_max: f64,
}

fn default_delta_max() -> f64 {
    0.2
}

impl SurfaceProfile {
    pub fn new(shape: ProfileShape, magnetic_field: f64) -> Self {
        Self { shape, magnetic_field, delta_max: default_delta_max() }
    }

    /// Radius and derivatives at `(x, δ)`; errors if `R ≤ 0`.
    pub fn derivs_at(&self, x: f64, delta: f64) -> Result<Derivs> {
        let d = match &self.shape {
            ProfileShape::Custom(f) => {
                let g = |y: f64| f(y, delta);
                richardson_derivs(&g, x, 1.0)
            }
            s => s.analytic(x).expect("preset has analytic derivatives"),
        };
        if !(d.r > 0.0) || !d.r.is_finite() {
            return Err(Error::InvalidRadius(d.r));
        }
        Ok(d)
    }

    /// Radius and derivatives at `δ = 0`.
    pub fn derivs(&self, x: f64) -> Result<Derivs> {
        self.derivs_at(x, 0.0)
    }

    pub fn radius(&self, x: f64) -> Result<f64> {
        self.derivs(x).map(|d| d.r)
    }

    /// Rescales the profile so that `R(0, 0) = target`.
    pub fn calibrated(&self, target: f64) -> Result<Self> {
        if !(target > 0.0) {
            return Err(Error::InvalidRadius(target));
        }
        let r0 = self.radius(0.0)?;
        Ok(Self { shape: self.shape.scaled(target / r0), ..self.clone() })
    }

    /// Unsquared curvature potential `−(1/8R²)(1 + R R''/(1+R'²)^{3/2})`.
    pub fn curvature_potential(&self, x: f64) -> Result<f64> {
        Ok(curvature_potential(&self.derivs(x)?))
    }

    /// Squared-bracket curvature potential `V₂₁`.
    pub fn v21(&self, x: f64) -> Result<f64> {
        Ok(v21(&self.derivs(x)?))
    }

    /// Four-term geometric correction `V₂₂`.
    pub fn v22(&self, x: f64) -> Result<f64> {
        Ok(v22(&self.derivs(x)?))
    }

    /// `V₁ = R'²`.
    pub fn v1(&self, x: f64, delta: f64) -> Result<f64> {
        let d = self.derivs_at(x, delta)?;
        Ok(d.d1 * d.d1)
    }

    /// Number of flux quanta through the cross-section, `B R²/2`.
    pub fn flux_quanta(&self, x: f64) -> Result<f64> {
        let r = self.radius(x)?;
        Ok(self.magnetic_field * r * r / 2.0)
    }

    /// Total geometric potential `V₂(x, δ) = V₂₁ + V₂₂` of the slowly
    /// varying surface: derivatives are taken with respect to the fast
    /// variable, so the k-th one carries `δ^{2k}`.
    pub fn v2(&self, x: f64, delta: f64) -> Result<f64> {
        let d = self.derivs_at(x, delta)?.slow_scaled(delta * delta);
        Ok(v21(&d) + v22(&d))
    }
}

/// `−(1/8R²)(1 + R R''/(1+R'²)^{3/2})`.
pub fn curvature_potential(d: &Derivs) -> f64 {
    -curvature_bracket(d) / (8.0 * d.r * d.r)
}

fn curvature_bracket(d: &Derivs) -> f64 {
    1.0 + d.r * d.d2 / (1.0 + d.d1 * d.d1).powf(1.5)
}

/// `−(1/8R²)(1 + R R''/(1+R'²)^{3/2})²`.
pub fn v21(d: &Derivs) -> f64 {
    let b = curvature_bracket(d);
    -b * b / (8.0 * d.r * d.r)
}

/// `−R'²/(8R²(1+R'²)) − (7/8) R'²R''²/(1+R'²)³ + (R'' + R(R'R''' + R''²))/(4R(1+R'²)²)`.
pub fn v22(d: &Derivs) -> f64 {
    let Derivs { r, d1, d2, d3 } = *d;
    let q = 1.0 + d1 * d1;
    -d1 * d1 / (8.0 * r * r * q) - 7.0 / 8.0 * d1 * d1 * d2 * d2 / q.powi(3)
        + (d2 + r * (d1 * d3 + d2 * d2)) / (4.0 * r * q * q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn uniform(r: f64) -> SurfaceProfile {
        SurfaceProfile::new(ProfileShape::Uniform { radius: r }, 1.0)
    }

    #[test]
    fn uniform_cylinder_potentials() {
        assert_eq!(uniform(1.0).v21(0.3).unwrap(), -0.125);
        assert_eq!(uniform(2.0).v21(-1.0).unwrap(), -1.0 / 32.0);
        assert_eq!(uniform(2.0).curvature_potential(0.0).unwrap(), -1.0 / 32.0);
        assert_eq!(uniform(1.5).v22(0.7).unwrap(), 0.0);
        assert_eq!(uniform(1.5).v1(0.7, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_bump_matches_fd_curvature() {
        let p = SurfaceProfile::new(ProfileShape::GaussianBump { base: 1.0, amplitude: 0.1, width: 1.0 }, 1.0);
        // R'' by a second difference with h = 1e-4.
        let f = |x: f64| 1.0 + 0.1 * (-x * x).exp();
        let h = 1e-4;
        let r2 = (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
        let expected = -(1.0 + 1.1 * r2) / (8.0 * 1.1 * 1.1);
        assert_relative_eq!(p.curvature_potential(0.0).unwrap(), expected, max_relative = 1e-7);
        assert_relative_eq!(p.curvature_potential(0.0).unwrap(), -0.78 / (8.0 * 1.21), max_relative = 1e-12);
    }

    #[test]
    fn v22_linear_slope() {
        let eps = 0.05;
        let p = SurfaceProfile::new(ProfileShape::Linear { base: 1.0, slope: eps }, 1.0);
        let expected = -eps * eps / (8.0 * (1.0 + eps * eps));
        assert_relative_eq!(p.v22(0.0).unwrap(), expected, max_relative = 1e-14);
    }

    #[test]
    fn v22_half_cosh() {
        // R = cosh(x)/2 at x = 0.5, with derivatives written out by hand.
        let (c, s) = (0.5_f64.cosh() / 2.0, 0.5_f64.sinh() / 2.0);
        let (r, d1, d2, d3) = (c, s, c, s);
        let q = 1.0 + d1 * d1;
        let expected = -d1 * d1 / (8.0 * r * r * q) - 0.875 * d1 * d1 * d2 * d2 / (q * q * q)
            + (d2 + r * (d1 * d3 + d2 * d2)) / (4.0 * r * q * q);
        let p = SurfaceProfile::new(ProfileShape::Cosh { scale: 0.5 }, 1.0);
        assert_relative_eq!(p.v22(0.5).unwrap(), expected, max_relative = 1e-14);
        assert_relative_eq!(p.v22(0.5).unwrap(), 0.263_293_727_485_302, max_relative = 1e-12);
    }

    #[test]
    fn v1_examples() {
        let p = SurfaceProfile::new(ProfileShape::Custom(Arc::new(|x: f64, _| x * x / 2.0)), 1.0);
        assert_relative_eq!(p.v1(1.0, 0.0).unwrap(), 1.0, max_relative = 1e-9);
        let p = SurfaceProfile::new(ProfileShape::TanhNeck { base: 1.0, amplitude: 0.1, width: 1.0 }, 1.0);
        assert_relative_eq!(p.v1(0.0, 0.0).unwrap(), 0.01, max_relative = 1e-14);
    }

    #[test]
    fn flux_quanta_examples() {
        let p = SurfaceProfile::new(ProfileShape::Uniform { radius: 1.0 }, 2.0);
        assert_eq!(p.flux_quanta(0.0).unwrap(), 1.0);
        let p = SurfaceProfile::new(ProfileShape::Uniform { radius: 1.0 }, 0.0);
        assert_eq!(p.flux_quanta(0.0).unwrap(), 0.0);
        let p = SurfaceProfile::new(ProfileShape::Uniform { radius: 2f64.sqrt() }, 1.0);
        assert_relative_eq!(p.flux_quanta(0.0).unwrap(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn nonpositive_radius_rejected() {
        let p = SurfaceProfile::new(ProfileShape::Linear { base: 1.0, slope: 1.0 }, 1.0);
        assert!(matches!(p.v21(-2.0), Err(Error::InvalidRadius(_))));
    }

    #[test]
    fn calibration_hits_target() {
        let p = SurfaceProfile::new(ProfileShape::GaussianBump { base: 1.0, amplitude: 0.3, width: 0.5 }, 1.0)
            .calibrated(2.0)
            .unwrap();
        assert_relative_eq!(p.radius(0.0).unwrap(), 2.0, max_relative = 1e-15);
    }

    #[test]
    fn slow_scaling_leaves_cylinder_limit() {
        let p = SurfaceProfile::new(ProfileShape::TanhNeck { base: 1.0, amplitude: 0.4, width: 1.0 }, 1.0);
        let r = p.radius(0.3).unwrap();
        assert_eq!(p.v2(0.3, 0.0).unwrap(), -1.0 / (8.0 * r * r));
        let diff = p.v2(0.3, 0.1).unwrap() + 1.0 / (8.0 * r * r);
        assert!(diff.abs() < 1e-3);
    }

    fn presets() -> Vec<ProfileShape> {
        vec![
            ProfileShape::GaussianBump { base: 1.0, amplitude: 0.3, width: 0.7 },
            ProfileShape::TanhNeck { base: 1.2, amplitude: 0.4, width: 0.9 },
            ProfileShape::Cosh { scale: 0.5 },
        ]
    }

    proptest! {
        #[test]
        fn fd_derivatives_match_analytic(x in -1.5f64..1.5, k in 0usize..3) {
            let shape = presets()[k].clone();
            let exact = shape.analytic(x).unwrap();
            let f = |y: f64| shape.analytic(y).unwrap().r;
            let fd = richardson_derivs(&f, x, 1.0);
            let scale = 1.0 + exact.r.abs();
            prop_assert!((fd.d1 - exact.d1).abs() < 1e-6 * scale);
            prop_assert!((fd.d2 - exact.d2).abs() < 1e-6 * scale);
            prop_assert!((fd.d3 - exact.d3).abs() < 1e-6 * scale);
        }

        #[test]
        fn v1_nonnegative(x in -3.0f64..3.0, k in 0usize..3, delta in 0.0f64..0.2) {
            let p = SurfaceProfile::new(presets()[k].clone(), 1.0);
            prop_assert!(p.v1(x, delta).unwrap() >= 0.0);
        }

        #[test]
        fn constant_radius_closed_forms(r in 0.1f64..10.0, x in -5.0f64..5.0) {
            let p = uniform(r);
            prop_assert_eq!(p.curvature_potential(x).unwrap(), -1.0 / (8.0 * r * r));
            prop_assert_eq!(p.v22(x).unwrap(), 0.0);
        }
    }
}
