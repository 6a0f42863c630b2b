//! Second-order perturbation theory in `δ` for the fiber levels: the
//! isolated-level series `μ₀ + δμ₁ + δ²μ₂` and the quasi-degenerate
//! expansion near a crossing that defines the modified potentials.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fiber::{FiberModel, Level};
use super::twolevel::{ReducedTwoLevel, TwoLevelFrame};
use crate::error::{Error, Result};

/// Default half-width of the mode window in the reduced-resolvent sum.
pub const DEFAULT_TRUNCATION: usize = 64;

/// `μ(x, δ) ≈ μ₀(x) + δμ₁(x) + δ²μ₂(x)` for an isolated diabatic level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSeries {
    pub level: i64,
    pub x: f64,
    pub mu0: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub truncation: usize,
    /// `|μ₂(N) − μ₂(2N)|`, the change on doubling the mode window.
    pub truncation_change: f64,
}

impl PerturbationSeries {
    pub fn value(&self, delta: f64) -> f64 {
        self.mu0 + delta * self.mu1 + delta * delta * self.mu2
    }
}

fn mu2_sum(model: &FiberModel, n: i64, x: f64, e_n: f64, half: usize) -> Result<f64> {
    let bw = model.coupling.bandwidth() as i64;
    let mut acc = 0.0;
    for k in (n - half as i64)..=(n + half as i64) {
        if k == n || (k - n).abs() > bw {
            continue;
        }
        let w = model.coupling(k, n, x)?;
        if w.norm() == 0.0 {
            continue;
        }
        let gap = model.diagonal(k, x, 0.0)? - e_n;
        acc -= w.norm_sqr() / gap;
    }
    Ok(acc)
}

/// Isolated-level series for diabatic mode `n` at `x`.
///
/// Fails with [`Error::RegimeViolation`] when a coupled level is closer
/// than `10 δ |W_kn|`, where the two-level expansion must be used instead.
pub fn perturbation_series(
    model: &FiberModel,
    n: i64,
    x: f64,
    delta: f64,
    truncation: usize,
) -> Result<PerturbationSeries> {
    let e_n = model.diagonal(n, x, 0.0)?;
    let bw = model.coupling.bandwidth() as i64;
    for k in (n - bw)..=(n + bw) {
        if k == n {
            continue;
        }
        let w = model.coupling(k, n, x)?.norm();
        let gap = (model.diagonal(k, x, 0.0)? - e_n).abs();
        if w > 0.0 && gap < 10.0 * delta * w {
            return Err(Error::RegimeViolation(format!(
                "level {n} is within 10 delta |W| of level {k} at x = {x}; use the two-level reduction"
            )));
        }
        if w > 0.0 && gap == 0.0 {
            return Err(Error::DegeneratePoint { x, delta: 0.0 });
        }
    }
    let mu1 = model.coupling(n, n, x)?.re;
    let mu2 = mu2_sum(model, n, x, e_n, truncation)?;
    let mu2_doubled = mu2_sum(model, n, x, e_n, 2 * truncation)?;
    Ok(PerturbationSeries { level: n, x, mu0: e_n, mu1, mu2, truncation, truncation_change: (mu2 - mu2_doubled).abs() })
}

/// Second-order expansion of the reduced matrix near the crossing:
/// coefficient arrays `[order 0, 1, 2]` of `β`, `γ`, `σ` and `V̄`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectivePair {
    pub x: f64,
    pub beta: [f64; 3],
    pub gamma: [f64; 3],
    pub sigma: [f64; 3],
    pub vbar: [f64; 3],
}

fn poly(c: &[f64; 3], d: f64) -> f64 {
    c[0] + d * (c[1] + d * c[2])
}

impl EffectivePair {
    /// Quasi-degenerate second-order expansion in the frame's pair.
    pub fn new(frame: &TwoLevelFrame, x: f64, truncation: usize) -> Result<Self> {
        let model = &frame.model;
        let pair = [frame.first, frame.second];
        let e = [model.diagonal(pair[0], x, 0.0)?, model.diagonal(pair[1], x, 0.0)?];
        let ph = [Complex64::new(1.0, 0.0), frame.phase];
        let mut w1 = [[Complex64::new(0.0, 0.0); 2]; 2];
        let mut w2 = [[Complex64::new(0.0, 0.0); 2]; 2];
        let bw = model.coupling.bandwidth() as i64;
        let centre = pair[0].min(pair[1]);
        let lo = centre - truncation as i64;
        let hi = pair[0].max(pair[1]) + truncation as i64;
        for i in 0..2 {
            for j in 0..2 {
                let scale = ph[i].conj() * ph[j];
                w1[i][j] = model.coupling(pair[i], pair[j], x)? * scale;
                let mut acc = Complex64::new(0.0, 0.0);
                for k in lo..=hi {
                    if pair.contains(&k) || (k - pair[i]).abs() > bw || (k - pair[j]).abs() > bw {
                        continue;
                    }
                    let ek = model.diagonal(k, x, 0.0)?;
                    let num = model.coupling(pair[i], k, x)? * model.coupling(k, pair[j], x)?;
                    acc += num * 0.5 * (1.0 / (e[i] - ek) + 1.0 / (e[j] - ek));
                }
                w2[i][j] = acc * scale;
            }
        }
        let split = |m: &[[Complex64; 2]; 2]| ReducedTwoLevel::from_matrix(*m);
        let o1 = split(&w1);
        let o2 = split(&w2);
        Ok(Self {
            x,
            beta: [0.5 * (e[0] - e[1]), o1.beta, o2.beta],
            gamma: [0.0, o1.gamma, o2.gamma],
            sigma: [0.0, o1.sigma, o2.sigma],
            vbar: [0.5 * (e[0] + e[1]), o1.vbar, o2.vbar],
        })
    }

    pub fn b3(&self, delta: f64) -> f64 {
        poly(&self.beta, delta)
    }

    pub fn g3(&self, delta: f64) -> f64 {
        poly(&self.gamma, delta)
    }

    pub fn s3(&self, delta: f64) -> f64 {
        poly(&self.sigma, delta)
    }

    pub fn v3(&self, delta: f64) -> f64 {
        poly(&self.vbar, delta)
    }

    /// `s = √(B₃² + G₃² + S₃²)`.
    pub fn s(&self, delta: f64) -> f64 {
        let (b, g, s) = (self.b3(delta), self.g3(delta), self.s3(delta));
        (b * b + g * g + s * s).sqrt()
    }

    pub fn reduced(&self, delta: f64) -> ReducedTwoLevel {
        ReducedTwoLevel { beta: self.b3(delta), gamma: self.g3(delta), sigma: self.s3(delta), vbar: self.v3(delta) }
    }
}

/// Modified potential `Ṽ^C = ±s + V₃`.
pub fn modified_potential(pair: &EffectivePair, level: Level, delta: f64) -> f64 {
    level.sign() * pair.s(delta) + pair.v3(delta)
}
