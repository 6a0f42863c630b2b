//! Scaled Fourier transform `[𝓕_ħ Ψ](ξ) = (2πħ)^{−1/2} ∫ Ψ(x) e^{−iξx/ħ} dx`.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Largest mass tolerated in the outer edge bands of either grid.
pub const ALIASING_LIMIT: f64 = 1e-8;

/// Momentum grid and transformed amplitudes, sorted by ascending `ξ`.
#[derive(Debug, Clone)]
pub struct ScaledTransform {
    pub xi: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl ScaledTransform {
    pub fn spacing(&self) -> f64 {
        self.xi[1] - self.xi[0]
    }
}

fn edge_mass(values: &[Complex64], step: f64) -> f64 {
    let band = (values.len() / 20).max(1);
    let total: f64 = values.iter().map(|v| v.norm_sqr()).sum::<f64>() * step;
    let edges: f64 =
        values[..band].iter().chain(&values[values.len() - band..]).map(|v| v.norm_sqr()).sum::<f64>() * step;
    if total > 0.0 {
        edges / total
    } else {
        0.0
    }
}

/// Applies `𝓕_ħ` to samples on the uniform grid `x0 + k dx`.
///
/// The momentum grid is centered on `xi_center`. Fails with `GridTooSmall`
/// when either the input or the output carries noticeable mass near its
/// edges.
pub fn scaled_fourier(samples: &[Complex64], x0: f64, dx: f64, hbar: f64, xi_center: f64) -> Result<ScaledTransform> {
    let n = samples.len();
    if n < 4 {
        return Err(Error::InvalidParameters("scaled Fourier transform needs at least 4 samples".into()));
    }
    let tail = edge_mass(samples, dx);
    if tail > ALIASING_LIMIT {
        return Err(Error::GridTooSmall { tail_mass: tail, limit: ALIASING_LIMIT });
    }
    let dxi = 2.0 * std::f64::consts::PI * hbar / (n as f64 * dx);
    // Demodulate so that the output window is centered on `xi_center`.
    let mut buf: Vec<Complex64> = samples
        .iter()
        .enumerate()
        .map(|(k, &v)| v * Complex64::from_polar(1.0, -xi_center * (x0 + k as f64 * dx) / hbar))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let pref = dx / (2.0 * std::f64::consts::PI * hbar).sqrt();
    let half = n as i64 / 2;
    let mut xi = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for m in -half..(n as i64 - half) {
        let idx = m.rem_euclid(n as i64) as usize;
        let q = m as f64 * dxi;
        xi.push(xi_center + q);
        values.push(buf[idx] * pref * Complex64::from_polar(1.0, -q * x0 / hbar));
    }
    let tail = edge_mass(&values, dxi);
    if tail > ALIASING_LIMIT {
        return Err(Error::GridTooSmall { tail_mass: tail, limit: ALIASING_LIMIT });
    }
    Ok(ScaledTransform { xi, values })
}
