//! Matching of the inner solution to incoming Born–Oppenheimer states and
//! the outgoing transition amplitudes.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gamma::gamma_complex;
use super::inner::{InnerSolution, LzParameters};
use crate::angular::{adiabatic_eigvecs, Level};
use crate::error::{Error, Result};
use crate::packets::unit_packet;

/// Outgoing amplitudes on both levels for a unit incoming B-level state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionResult {
    pub r: f64,
    pub eta0: f64,
    pub delta: f64,
    pub amplitude_a: Complex64,
    pub amplitude_b: Complex64,
    pub phase: f64,
    pub p_a: f64,
    pub p_b: f64,
}

impl TransitionResult {
    pub fn unitarity_defect(&self) -> f64 {
        (self.p_a + self.p_b - 1.0).abs()
    }
}

/// `(r/2η⁰)(1 + 3 ln 2η⁰ + ln r − 4 ln δ)`.
fn log_bracket(params: &LzParameters, delta: f64) -> f64 {
    params.r / (2.0 * params.eta0) * (1.0 + 3.0 * (2.0 * params.eta0).ln() + params.r.ln() - 4.0 * delta.ln())
}

/// `λ(δ) = π/4 + S₀^A/δ² + (r/2η⁰)(1 + 3 ln 2η⁰ + ln r − 4 ln δ)`.
pub fn transition_phase(params: &LzParameters, delta: f64, s0_a: f64) -> f64 {
    PI / 4.0 + s0_a / (delta * delta) + log_bracket(params, delta)
}

/// Outgoing amplitudes `−e^{−πk/2}` (A) and
/// `e^{−πk/4} √(πk) e^{iλ} / Γ(1 + ik/2)` (B) with `k = r/η⁰`.
pub fn transition_matrix(params: &LzParameters, delta: f64, s0_a: f64) -> TransitionResult {
    let k = params.ratio();
    let phase = transition_phase(params, delta, s0_a);
    let amplitude_a = Complex64::new(-(-PI * k / 2.0).exp(), 0.0);
    let amplitude_b = Complex64::from_polar((-PI * k / 4.0).exp() * (PI * k).sqrt(), phase)
        / gamma_complex(Complex64::new(1.0, k / 2.0));
    TransitionResult {
        r: params.r,
        eta0: params.eta0,
        delta,
        amplitude_a,
        amplitude_b,
        phase,
        p_a: amplitude_a.norm_sqr(),
        p_b: amplitude_b.norm_sqr(),
    }
}

/// Incoming Born–Oppenheimer data entering the matching.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncomingPacket {
    pub level: Level,
    pub index: usize,
    pub a0: Complex64,
    pub b0: Complex64,
    /// Constant action phase `S₀^C(δ, −)`.
    pub s0: f64,
}

/// `∫₀ᵘ √(v² + 1) dv`.
fn adiabatic_action(u: f64) -> f64 {
    0.5 * (u * (u * u + 1.0).sqrt() + u.asinh())
}

/// Coefficients `(C₁(y), C₂(y))` of the inner solution.
///
/// B-level input uses the closed form with `C₁ ≡ 0`. A-level input sets
/// `C₂ ≡ 0` and fixes `C₁(y)` by matching the upper adiabatic component
/// at `s = −δ^{−ξ}` to the incoming A-level amplitude carried by its
/// adiabatic WKB phase.
pub fn matching_coefficients(
    incoming: &IncomingPacket,
    params: &LzParameters,
    delta: f64,
    xi: f64,
    y: f64,
) -> Result<(Complex64, Complex64)> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameters(format!("delta must be positive, got {delta}")));
    }
    let i = Complex64::i();
    let (r, eta0) = (params.r, params.eta0);
    let k = params.ratio();
    let shift = i * r * incoming.a0 / eta0;
    let zero = Complex64::new(0.0, 0.0);
    match incoming.level {
        Level::B => {
            let envelope = unit_packet(incoming.index, incoming.a0, incoming.b0 - shift, y)?;
            let phase = k / 2.0 * (y * y - 2.0 * y) + incoming.s0 / (delta * delta) + log_bracket(params, delta) / 2.0;
            let c2 = -envelope * delta.powf(-0.5) * (-PI * k / 8.0).exp() * Complex64::from_polar(1.0, phase);
            Ok((zero, c2))
        }
        Level::A => {
            let envelope = unit_packet(incoming.index, incoming.a0, incoming.b0 + shift, y)?;
            let u0 = params.u(-delta.powf(-xi), y);
            let target = -envelope
                * delta.powf(-0.5)
                * Complex64::from_polar(1.0, incoming.s0 / (delta * delta) - k * adiabatic_action(u0));
            let col = InnerSolution::new(*params).columns(u0)?[0];
            let s = (u0 * u0 + 1.0).sqrt();
            let v = adiabatic_eigvecs((u0 / s).acos(), 0.0).a;
            let column = v[0].conj() * col[0] + v[1].conj() * col[1];
            if column.norm() == 0.0 {
                return Err(Error::IllConditionedCrossing(format!("inner solution column vanishes at u = {u0}")));
            }
            Ok((target / column, zero))
        }
    }
}
