//! Classical trajectory, action and linearized flow.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ode::{solve, OdeFailure, OdeOptions};
use super::potential::Potential;
use crate::angular::Level;
use crate::error::{Error, Result};

/// Point on a classical trajectory together with its linearization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalState {
    pub t: f64,
    pub a: f64,
    pub eta: f64,
    pub action: f64,
    pub a_mat: Complex64,
    pub b_mat: Complex64,
    pub level: Option<Level>,
}

impl ClassicalState {
    pub fn new(t: f64, a: f64, eta: f64, action: f64, a_mat: Complex64, b_mat: Complex64) -> Self {
        Self { t, a, eta, action, a_mat, b_mat, level: None }
    }

    pub fn with_level(mut self, level: Level) -> Self {
        self.level = Some(level);
        self
    }

    /// `Re(Ā B)`.
    pub fn symplectic(&self) -> f64 {
        (self.a_mat.conj() * self.b_mat).re
    }

    pub fn energy(&self, v: &dyn Potential) -> Result<f64> {
        Ok(0.5 * self.eta * self.eta + v.value(self.a)?)
    }

    fn pack(&self) -> [f64; 7] {
        [self.a, self.eta, self.action, self.a_mat.re, self.a_mat.im, self.b_mat.re, self.b_mat.im]
    }

    fn unpack(&self, t: f64, y: &[f64; 7]) -> Self {
        Self {
            t,
            a: y[0],
            eta: y[1],
            action: y[2],
            a_mat: Complex64::new(y[3], y[4]),
            b_mat: Complex64::new(y[5], y[6]),
            level: self.level,
        }
    }
}

/// Sampled classical solution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub states: Vec<ClassicalState>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> &ClassicalState {
        self.states.last().expect("trajectory is never empty")
    }

    /// Largest relative deviation of the energy from its initial value.
    pub fn energy_drift(&self, v: &dyn Potential) -> Result<f64> {
        let e0 = self.states[0].energy(v)?;
        let mut worst = 0.0f64;
        for s in &self.states {
            worst = worst.max((s.energy(v)? - e0).abs());
        }
        Ok(worst / e0.abs().max(1.0))
    }

    /// Largest deviation of `Re(Ā B)` from its initial value.
    pub fn symplectic_drift(&self) -> f64 {
        let s0 = self.states[0].symplectic();
        self.states.iter().map(|s| (s.symplectic() - s0).abs()).fold(0.0, f64::max)
    }

    /// CSV with columns `t, a, η, S, ReA, ImA, ReB, ImB`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "a", "η", "S", "ReA", "ImA", "ReB", "ImB"])?;
        for s in &self.states {
            w.serialize((s.t, s.a, s.eta, s.action, s.a_mat.re, s.a_mat.im, s.b_mat.re, s.b_mat.im))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

fn domain_exit<const N: usize>(f: OdeFailure<N>) -> Error {
    match f.error {
        Error::InvalidParameters(_) => f.error,
        _ => Error::DomainExit { t: f.t, a: f.y[0], eta: f.y[1] },
    }
}

fn check_finite(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameters("potential returned a non-finite value".into()))
    }
}

/// Integrates `ȧ = η`, `η̇ = −V'(a)`, `Ṡ = η²/2 − V(a)` together with the
/// linear system `Ȧ = iB`, `Ḃ = iV''(a)A` from `initial` and samples at
/// `times`.
pub fn integrate_classical(
    v: &dyn Potential,
    initial: &ClassicalState,
    times: &[f64],
    opts: &OdeOptions,
) -> Result<Trajectory> {
    let rhs = |_t: f64, y: &[f64; 7]| -> Result<[f64; 7]> {
        let (val, grad, hess) = (check_finite(v.value(y[0])?)?, v.gradient(y[0])?, v.hessian(y[0])?);
        Ok([y[1], -grad, 0.5 * y[1] * y[1] - val, -y[6], y[5], -hess * y[4], hess * y[3]])
    };
    let ys = solve(rhs, initial.t, initial.pack(), times, opts).map_err(domain_exit)?;
    Ok(Trajectory { states: times.iter().zip(&ys).map(|(&t, y)| initial.unpack(t, y)).collect() })
}

/// Position, momentum and action only; `A` and `B` are carried unchanged.
pub fn integrate_trajectory(
    v: &dyn Potential,
    initial: &ClassicalState,
    times: &[f64],
    opts: &OdeOptions,
) -> Result<Trajectory> {
    let rhs = |_t: f64, y: &[f64; 3]| -> Result<[f64; 3]> {
        let val = check_finite(v.value(y[0])?)?;
        Ok([y[1], -v.gradient(y[0])?, 0.5 * y[1] * y[1] - val])
    };
    let ys = solve(rhs, initial.t, [initial.a, initial.eta, initial.action], times, opts).map_err(domain_exit)?;
    Ok(Trajectory {
        states: times
            .iter()
            .zip(&ys)
            .map(|(&t, y)| ClassicalState { t, a: y[0], eta: y[1], action: y[2], ..*initial })
            .collect(),
    })
}

/// The linearized flow `(A, B)` along the trajectory started at `initial`.
pub fn integrate_linearized(
    v: &dyn Potential,
    initial: &ClassicalState,
    times: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<(Complex64, Complex64)>> {
    Ok(integrate_classical(v, initial, times, opts)?.states.iter().map(|s| (s.a_mat, s.b_mat)).collect())
}

/// Uniform sample times from `t0` to `t1` inclusive.
pub fn linspace(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![t1];
    }
    (0..n).map(|k| t0 + (t1 - t0) * k as f64 / (n - 1) as f64).collect()
}
