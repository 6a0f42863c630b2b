//! Crank–Nicolson time stepping of `iδ²∂ₜu = H u`.

use num_complex::Complex64;

use super::banded::{BandedLu, BandedMatrix};
use super::grid::WaveField;
use super::hamiltonian::DiscreteHamiltonian;
use crate::error::{Error, Result};

/// Factored Crank–Nicolson step for a fixed Hamiltonian and time step.
#[derive(Debug, Clone)]
pub struct Propagator {
    pub dt: f64,
    pub delta: f64,
    explicit: BandedMatrix,
    implicit: BandedLu,
}

impl Propagator {
    /// Factors `I + i(dt/2δ²)H`; the Hermitian part is the identity, so no
    /// pivoting is needed.
    pub fn new(h: &DiscreteHamiltonian, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::InvalidParameters(format!("time step must be positive, got {dt}")));
        }
        let tau = dt / (2.0 * h.delta * h.delta);
        let one = Complex64::new(1.0, 0.0);
        let explicit = h.matrix.shifted(one, Complex64::new(0.0, -tau));
        let implicit = h.matrix.shifted(one, Complex64::new(0.0, tau)).factor()?;
        Ok(Self { dt, delta: h.delta, explicit, implicit })
    }

    /// One step forward in time.
    pub fn step(&self, field: &mut WaveField) {
        let mut rhs = vec![Complex64::new(0.0, 0.0); field.data.len()];
        self.explicit.matvec(&field.data, &mut rhs);
        self.implicit.solve(&mut rhs);
        field.data = rhs;
        field.t += self.dt;
    }

    /// `steps` steps, calling `observe` after every `every`-th one.
    pub fn advance<F>(&self, field: &mut WaveField, steps: usize, every: usize, mut observe: F) -> Result<()>
    where
        F: FnMut(&WaveField) -> Result<()>,
    {
        let every = every.max(1);
        for s in 1..=steps {
            self.step(field);
            if s % every == 0 || s == steps {
                observe(field)?;
            }
        }
        Ok(())
    }

    /// Number of steps of size close to `dt_max` covering `span`, and the
    /// matching step.
    pub fn plan(span: f64, dt_max: f64) -> (usize, f64) {
        let steps = (span / dt_max).ceil().max(1.0) as usize;
        (steps, span / steps as f64)
    }
}
