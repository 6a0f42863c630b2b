//! Closed-form spectrum of `h(R) = (1/2R²)(−i∂_θ + BR²/2)²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidRadius(r))
    }
}

/// `λₙ(R) = (1/2R²)(n + BR²/2)²`.
pub fn eigenvalue(n: i64, r: f64, b: f64) -> Result<f64> {
    check_radius(r)?;
    let q = n as f64 + b * r * r / 2.0;
    Ok(q * q / (2.0 * r * r))
}

/// `dλₙ/dR = −n²/R³ + B²R/4`.
pub fn eigenvalue_dr(n: i64, r: f64, b: f64) -> Result<f64> {
    check_radius(r)?;
    let n = n as f64;
    Ok(-n * n / r.powi(3) + b * b * r / 4.0)
}

/// `d²λₙ/dR² = 3n²/R⁴ + B²/4`.
pub fn eigenvalue_drr(n: i64, r: f64, b: f64) -> Result<f64> {
    check_radius(r)?;
    let n = n as f64;
    Ok(3.0 * n * n / r.powi(4) + b * b / 4.0)
}

/// The unique radius where `λₙ = λₘ`, and the common energy there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingPoint {
    pub n: i64,
    pub m: i64,
    pub radius: f64,
    pub energy: f64,
}

/// Crossing of levels `n ≠ m`; exists iff `n + m < 0` and `B > 0`.
///
/// `R_{n,m} = √(−(n+m)/B)` and `λₙ(R_{n,m}) = −(B/8)(n−m)²/(n+m)`.
pub fn crossing(n: i64, m: i64, b: f64) -> Result<CrossingPoint> {
    if n + m >= 0 || n == m || !(b > 0.0) {
        return Err(Error::NoCrossing { n, m });
    }
    let s = (n + m) as f64;
    let d = (n - m) as f64;
    Ok(CrossingPoint { n, m, radius: (-s / b).sqrt(), energy: -b * d * d / (8.0 * s) })
}

/// Minimum of the classical effective radial potential
/// `V(R) = ½(p²/R² − p e B + e²B²R²/4)` for an electron (`e = −1`).
///
/// Returns `(R₀, V(R₀))` with `R₀ = √(2|p|/B)`.
pub fn classical_effective_minimum(p_theta: f64, b: f64) -> Result<(f64, f64)> {
    if !(b > 0.0) {
        return Err(Error::InvalidParameters(format!("magnetic field must be positive, got {b}")));
    }
    let r0 = (2.0 * p_theta.abs() / b).sqrt();
    let e = -1.0;
    let v = if e * p_theta >= 0.0 { 0.0 } else { (e * p_theta).abs() * b };
    Ok((r0, v))
}

/// The classical effective radial potential itself (electron charge).
pub fn classical_effective_potential(p_theta: f64, b: f64, r: f64) -> f64 {
    let e = -1.0;
    0.5 * (p_theta * p_theta / (r * r) - p_theta * e * b + e * e * b * b * r * r / 4.0)
}
