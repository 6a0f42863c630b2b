//! Adiabatic transport phase `λ_C(ω, t) = i∫ η ⟨Φ_C, ∂ₓΦ_C⟩(ω + a(t′)) dt′`.

use num_complex::Complex64;

use crate::classical::Trajectory;
use crate::error::{Error, Result};

/// Largest tolerated imaginary part of the accumulated phase.
pub const PHASE_REALITY_TOL: f64 = 1e-8;

/// `⟨Φ(x), ∂ₓΦ(x)⟩` by a centered difference with step `h`.
pub fn connection<F>(vector: &F, x: f64, h: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Vec<Complex64>>,
{
    let c = vector(x)?;
    let p = vector(x + h)?;
    let m = vector(x - h)?;
    Ok(c.iter().zip(p.iter().zip(&m)).map(|(v, (a, b))| v.conj() * (a - b)).sum::<Complex64>() / (2.0 * h))
}

/// `λ(ω, t_k)` for every sample `t_k` of `trajectory` (rows) and every
/// offset `ω` (columns), starting from zero at the first sample. The time
/// integral uses the trapezoid rule on the trajectory samples.
pub fn adiabatic_phase<F>(vector: &F, trajectory: &Trajectory, omegas: &[f64], h: f64) -> Result<Vec<Vec<f64>>>
where
    F: Fn(f64) -> Result<Vec<Complex64>>,
{
    let states = &trajectory.states;
    let integrand = |k: usize, w: f64| -> Result<Complex64> {
        let s = &states[k];
        Ok(Complex64::i() * s.eta * connection(vector, w + s.a, h)?)
    };
    let mut acc = vec![Complex64::new(0.0, 0.0); omegas.len()];
    let mut prev: Vec<Complex64> = omegas.iter().map(|&w| integrand(0, w)).collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(states.len());
    out.push(vec![0.0; omegas.len()]);
    for k in 1..states.len() {
        let dt = states[k].t - states[k - 1].t;
        let cur: Vec<Complex64> = omegas.iter().map(|&w| integrand(k, w)).collect::<Result<_>>()?;
        for (j, a) in acc.iter_mut().enumerate() {
            *a += 0.5 * dt * (prev[j] + cur[j]);
            if a.im.abs() > PHASE_REALITY_TOL {
                return Err(Error::NormalizationBug(a.im));
            }
        }
        out.push(acc.iter().map(|a| a.re).collect());
        prev = cur;
    }
    Ok(out)
}

/// `λ(x_i)` for a packet whose center moved from `a_start` to `a_now`,
/// given `⟨Φ, ∂ₓΦ⟩` sampled on the grid `x_i = x0 + i dx`.
///
/// Since `η dt = da`, the time integral collapses to
/// `λ(x) = i (G(x) − G(x − a_now + a_start))` with `G′ = ⟨Φ, ∂ₓΦ⟩`.
pub fn transport_phase_on_grid(
    connection: &[Complex64],
    x0: f64,
    dx: f64,
    a_start: f64,
    a_now: f64,
) -> Result<Vec<f64>> {
    let n = connection.len();
    let mut g = Vec::with_capacity(n);
    let mut acc = Complex64::new(0.0, 0.0);
    g.push(acc);
    for w in connection.windows(2) {
        acc += 0.5 * dx * (w[0] + w[1]);
        g.push(acc);
    }
    let at = |x: f64| -> Complex64 {
        let s = ((x - x0) / dx).clamp(0.0, (n - 1) as f64);
        let i = (s.floor() as usize).min(n.saturating_sub(2));
        let f = s - i as f64;
        if n < 2 {
            return g[0];
        }
        g[i] * (1.0 - f) + g[i + 1] * f
    };
    let shift = a_now - a_start;
    let mut out = Vec::with_capacity(n);
    for (i, gi) in g.iter().enumerate() {
        let x = x0 + i as f64 * dx;
        let lam = Complex64::i() * (gi - at(x - shift));
        if lam.im.abs() > PHASE_REALITY_TOL {
            return Err(Error::NormalizationBug(lam.im));
        }
        out.push(lam.re);
    }
    Ok(out)
}
