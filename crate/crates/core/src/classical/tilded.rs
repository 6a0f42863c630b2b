//! Regime exponents and the trajectories generated by the modified
//! potential `Ṽ^C`, started from the outer asymptotics at `±t₀ = ±δ^κ`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::asymptotics::outer_asymptotics_physical;
use super::ode::{solve, OdeFailure, OdeOptions};
use super::potential::Potential;
use super::trajectory::{integrate_trajectory, ClassicalState, Trajectory};
use crate::angular::{Level, NormalForm};
use crate::error::{Error, Result};

/// Exponents `ξ`, `δ′`, `κ` and the horizon `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeExponents {
    pub xi: f64,
    pub delta_prime: f64,
    pub kappa: f64,
    pub horizon: f64,
}

impl Default for RegimeExponents {
    fn default() -> Self {
        Self { xi: 0.30, delta_prime: 0.20, kappa: 0.75, horizon: 0.5 }
    }
}

impl RegimeExponents {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameters(format!("regime exponents: {msg}")));
        if !(self.xi > 0.0 && self.xi < 1.0 / 3.0) {
            return bad("need 0 < xi < 1/3");
        }
        if !(self.delta_prime > 0.0 && self.delta_prime < self.xi) {
            return bad("need 0 < delta' < xi");
        }
        if !(self.kappa > 2.0 / 3.0 && self.kappa < 1.0) {
            return bad("need 2/3 < kappa < 1");
        }
        if !(1.0 - self.delta_prime - self.kappa > 0.0) {
            return bad("need 1 - delta' - kappa > 0");
        }
        if !(self.horizon > 0.0) {
            return bad("need a positive horizon");
        }
        Ok(())
    }

    /// `t₀ = δ^κ`.
    pub fn t0(&self, delta: f64) -> f64 {
        delta.powf(self.kappa)
    }

    /// Edge of the inner window `δ^{1−ξ}`.
    pub fn inner_edge(&self, delta: f64) -> f64 {
        delta.powf(1.0 - self.xi)
    }

    /// Cutoff radius `δ^{1−δ′}`.
    pub fn cutoff_radius(&self, delta: f64) -> f64 {
        delta.powf(1.0 - self.delta_prime)
    }
}

/// `η̃ = √(2(Ẽ − Ṽ(ã)))`.
pub fn momentum_from_energy(energy: f64, v: &dyn Potential, a: f64) -> Result<f64> {
    let kinetic = energy - v.value(a)?;
    if !(kinetic > 0.0) {
        return Err(Error::TurningPoint { a, kinetic });
    }
    Ok((2.0 * kinetic).sqrt())
}

/// Data shared by the tilded constructions of one level.
pub struct TildedSetup<'a> {
    pub potential: &'a dyn Potential,
    pub level: Level,
    pub normal_form: NormalForm,
    /// The level's crossing momentum `η^C(0)`.
    pub eta0: f64,
    /// `∂ₓV₃(0, δ)`.
    pub dv3: f64,
    pub delta: f64,
    pub exponents: RegimeExponents,
    /// `A(0)`, `B(0)`.
    pub a0: Complex64,
    pub b0: Complex64,
}

impl TildedSetup<'_> {
    /// `Ẽ = η^C(0)²/2 + Ṽ^C(0, δ)`.
    pub fn energy(&self) -> Result<f64> {
        Ok(0.5 * self.eta0 * self.eta0 + self.potential.value(0.0)?)
    }
}

/// State at `t = sign·δ^κ`: position from the outer asymptotics, momentum
/// from energy conservation, `Ã = A(0)`, `B̃ = B(0) ∓ sign(t)·i b₁A(0)/η`
/// (upper sign for A; `b₁ A/η` is `r A/η⁰` in normal-form units) and the
/// action from the `Ṽ` flow through the crossing.
pub fn tilded_initial_data(setup: &TildedSetup, sign: f64) -> Result<ClassicalState> {
    setup.exponents.validate()?;
    let t0 = sign.signum() * setup.exponents.t0(setup.delta);
    let (a, _) = outer_asymptotics_physical(&setup.normal_form, setup.level, t0, setup.delta, setup.eta0, setup.dv3);
    let eta = momentum_from_energy(setup.energy()?, setup.potential, a)?;
    let jump = Complex64::i() * setup.normal_form.b1 * setup.a0 / setup.eta0;
    let b_mat = setup.b0 - setup.level.sign() * sign.signum() * jump;
    let through = integrate_trajectory(
        setup.potential,
        &ClassicalState::new(0.0, 0.0, setup.eta0, 0.0, setup.a0, setup.b0),
        &[t0],
        &OdeOptions::default(),
    )?;
    Ok(ClassicalState::new(t0, a, eta, through.last().action, setup.a0, b_mat).with_level(setup.level))
}

fn domain_exit<const N: usize>(f: OdeFailure<N>) -> Error {
    match f.error {
        Error::TurningPoint { .. } | Error::InvalidParameters(_) => f.error,
        _ => Error::DomainExit { t: f.t, a: f.y[0], eta: f64::NAN },
    }
}

/// Integrates the tilded flow from `initial`: `ã' = η̃(ã)` by energy
/// conservation, `S̃' = η̃²/2 − Ṽ(ã)`, `Ã' = iB̃`, `B̃' = iṼ''(ã)Ã`.
pub fn integrate_tilded(setup: &TildedSetup, initial: &ClassicalState, times: &[f64]) -> Result<Trajectory> {
    let energy = setup.energy()?;
    let v = setup.potential;
    let rhs = |_t: f64, y: &[f64; 6]| -> Result<[f64; 6]> {
        let val = v.value(y[0])?;
        let kinetic = energy - val;
        if !(kinetic > 0.0) {
            return Err(Error::TurningPoint { a: y[0], kinetic });
        }
        let eta = (2.0 * kinetic).sqrt();
        let hess = v.hessian(y[0])?;
        Ok([eta, 0.5 * eta * eta - val, -y[5], y[4], -hess * y[3], hess * y[2]])
    };
    let y0 = [initial.a, initial.action, initial.a_mat.re, initial.a_mat.im, initial.b_mat.re, initial.b_mat.im];
    let ys = solve(rhs, initial.t, y0, times, &OdeOptions::default()).map_err(domain_exit)?;
    let mut states = Vec::with_capacity(times.len());
    for (&t, y) in times.iter().zip(&ys) {
        states.push(ClassicalState {
            t,
            a: y[0],
            eta: momentum_from_energy(energy, v, y[0])?,
            action: y[1],
            a_mat: Complex64::new(y[2], y[3]),
            b_mat: Complex64::new(y[4], y[5]),
            level: Some(setup.level),
        });
    }
    Ok(Trajectory { states })
}
