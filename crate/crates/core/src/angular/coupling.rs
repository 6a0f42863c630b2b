//! The symmetry-breaking perturbation `W(x, θ)` as a finite Fourier series.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Harmonic {
    Sin,
    Cos,
}

/// One term `amplitude · R(x)^radius_power · {sin, cos}(order · θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierTerm {
    pub order: u32,
    pub kind: Harmonic,
    pub amplitude: f64,
    #[serde(default)]
    pub radius_power: i32,
}

impl FourierTerm {
    pub fn coefficient(&self, radius: f64) -> f64 {
        self.amplitude * radius.powi(self.radius_power)
    }

    /// `⟨φₙ, trig(kθ) φₘ⟩` with `φₙ = e^{inθ}/√(2π)`.
    pub fn unit_element(&self, n: i64, m: i64) -> Complex64 {
        let k = self.order as i64;
        let d = n - m;
        match self.kind {
            Harmonic::Cos if d.abs() == k => Complex64::new(0.5, 0.0),
            Harmonic::Sin if d == k => Complex64::new(0.0, -0.5),
            Harmonic::Sin if d == -k => Complex64::new(0.0, 0.5),
            _ => Complex64::new(0.0, 0.0),
        }
    }
}

/// `W(x, θ) = Σ terms`; every term has zero angular mean.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Perturbation {
    pub terms: Vec<FourierTerm>,
}

impl Perturbation {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    /// `amplitude · R(x)^power · sin θ`: a uniform transverse electric field.
    pub fn transverse_field(amplitude: f64) -> Self {
        Self { terms: vec![FourierTerm { order: 1, kind: Harmonic::Sin, amplitude, radius_power: 1 }] }
    }

    pub fn validate(&self) -> Result<()> {
        for t in &self.terms {
            if t.order == 0 {
                return Err(Error::InvalidParameters(
                    "Fourier terms of W must have order >= 1 (zero angular mean)".into(),
                ));
            }
            if !t.amplitude.is_finite() {
                return Err(Error::InvalidParameters("non-finite amplitude in W".into()));
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.amplitude == 0.0)
    }

    /// Largest `|n − m|` with a nonzero element.
    pub fn bandwidth(&self) -> usize {
        self.terms.iter().filter(|t| t.amplitude != 0.0).map(|t| t.order as usize).max().unwrap_or(0)
    }

    /// Value of `W` at radius `R(x)` and angle `θ`.
    pub fn eval(&self, radius: f64, theta: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let a = t.order as f64 * theta;
                t.coefficient(radius)
                    * match t.kind {
                        Harmonic::Sin => a.sin(),
                        Harmonic::Cos => a.cos(),
                    }
            })
            .sum()
    }

    /// `⟨φₙ, W φₘ⟩` at radius `R(x)`, in closed form.
    pub fn element(&self, radius: f64, n: i64, m: i64) -> Complex64 {
        self.terms.iter().map(|t| t.unit_element(n, m) * t.coefficient(radius)).sum()
    }
}

/// `⟨φₙ, W φₘ⟩` by the trapezoid rule from `W` sampled at `θⱼ = 2πj/N`.
///
/// Exact for trigonometric polynomials of degree below `N − |n − m|`.
pub fn matrix_element_quadrature(samples: &[Complex64], n: i64, m: i64) -> Result<Complex64> {
    let worst = samples.iter().map(|w| w.im.abs()).fold(0.0, f64::max);
    if worst > 1e-12 {
        return Err(Error::NonRealPerturbation(worst));
    }
    let len = samples.len();
    if len == 0 {
        return Err(Error::InvalidParameters("no angular samples".into()));
    }
    let k = (m - n) as f64;
    let sum: Complex64 = samples
        .iter()
        .enumerate()
        .map(|(j, w)| {
            let th = 2.0 * PI * j as f64 / len as f64;
            Complex64::from_polar(w.re, k * th)
        })
        .sum();
    Ok(sum / len as f64)
}
