//! Adiabatic potentials `V^C(x, δ)` driving the classical flow.

use std::sync::Arc;

use num_complex::Complex64;

use crate::angular::{EffectivePair, Level, TwoLevelFrame};
use crate::error::Result;

/// Five-point central derivative.
pub fn five_point<F: Fn(f64) -> Result<f64>>(f: F, x: f64, h: f64) -> Result<f64> {
    Ok((f(x - 2.0 * h)? - 8.0 * f(x - h)? + 8.0 * f(x + h)? - f(x + 2.0 * h)?) / (12.0 * h))
}

/// A scalar potential with first and second derivatives.
pub trait Potential: Send + Sync {
    fn value(&self, x: f64) -> Result<f64>;

    /// Finite-difference step used by the default derivatives.
    fn step(&self) -> f64 {
        1e-4
    }

    fn gradient(&self, x: f64) -> Result<f64> {
        five_point(|y| self.value(y), x, self.step())
    }

    fn hessian(&self, x: f64) -> Result<f64> {
        five_point(|y| self.gradient(y), x, self.step())
    }
}

/// `V(x) = v0 + slope·x + curvature·x²/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadratic {
    pub v0: f64,
    pub slope: f64,
    pub curvature: f64,
}

impl Quadratic {
    pub fn harmonic(curvature: f64) -> Self {
        Self { v0: 0.0, slope: 0.0, curvature }
    }

    pub fn constant(v0: f64) -> Self {
        Self { v0, slope: 0.0, curvature: 0.0 }
    }
}

impl Potential for Quadratic {
    fn value(&self, x: f64) -> Result<f64> {
        Ok(self.v0 + self.slope * x + 0.5 * self.curvature * x * x)
    }

    fn gradient(&self, x: f64) -> Result<f64> {
        Ok(self.slope + self.curvature * x)
    }

    fn hessian(&self, _x: f64) -> Result<f64> {
        Ok(self.curvature)
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

/// Potential given by closures for `V`, `V'` and `V''`.
#[derive(Clone)]
pub struct FnPotential {
    pub value: ScalarFn,
    pub gradient: ScalarFn,
    pub hessian: ScalarFn,
}

impl Potential for FnPotential {
    fn value(&self, x: f64) -> Result<f64> {
        (self.value)(x)
    }

    fn gradient(&self, x: f64) -> Result<f64> {
        (self.gradient)(x)
    }

    fn hessian(&self, x: f64) -> Result<f64> {
        (self.hessian)(x)
    }
}

/// Which eigenvalue combination of the crossing pair to follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Level(Level),
    /// `V̄ = (μ_A + μ_B)/2`.
    Mean,
}

/// Exact adiabatic potential from dense diagonalization of `g(x, δ)`.
///
/// The gradient uses the Hellmann–Feynman formula `⟨Φ|∂ₓg|Φ⟩`, and the
/// second derivative a finite difference of the gradient on a step tied
/// to `δ`.
#[derive(Debug, Clone)]
pub struct ExactLevel {
    pub frame: TwoLevelFrame,
    pub branch: Branch,
    pub delta: f64,
}

impl ExactLevel {
    pub fn new(frame: TwoLevelFrame, level: Level, delta: f64) -> Self {
        Self { frame, branch: Branch::Level(level), delta }
    }

    pub fn mean(frame: TwoLevelFrame, delta: f64) -> Self {
        Self { frame, branch: Branch::Mean, delta }
    }

    fn pair(&self, x: f64) -> Result<([f64; 2], [Vec<Complex64>; 2])> {
        let e = self.frame.model.eigen(x, self.delta, &self.frame.basis)?;
        let (up, lo) = e.pair_indices(&self.frame.basis, self.frame.first, self.frame.second)?;
        Ok(([e.values[up], e.values[lo]], [e.vector(up), e.vector(lo)]))
    }

    fn combine(&self, v: [f64; 2]) -> f64 {
        match self.branch {
            Branch::Level(Level::A) => v[0],
            Branch::Level(Level::B) => v[1],
            Branch::Mean => 0.5 * (v[0] + v[1]),
        }
    }
}

impl Potential for ExactLevel {
    fn value(&self, x: f64) -> Result<f64> {
        Ok(self.combine(self.pair(x)?.0))
    }

    fn step(&self) -> f64 {
        (1e-2 * self.delta).clamp(1e-5, 1e-3)
    }

    fn gradient(&self, x: f64) -> Result<f64> {
        let (_, vecs) = self.pair(x)?;
        let h = 1e-3;
        let basis = &self.frame.basis;
        let m = |y: f64| self.frame.model.matrix(y, self.delta, basis);
        let dg = (m(x - 2.0 * h)? - m(x + 2.0 * h)? + (m(x + h)? - m(x - h)?) * Complex64::new(8.0, 0.0))
            / Complex64::new(12.0 * h, 0.0);
        let expect = |v: &Vec<Complex64>| -> f64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..v.len() {
                for j in 0..v.len() {
                    acc += v[i].conj() * dg[(i, j)] * v[j];
                }
            }
            acc.re
        };
        Ok(self.combine([expect(&vecs[0]), expect(&vecs[1])]))
    }
}

/// Modified potential `Ṽ^C = ±s + V₃` (or `V₃` for the mean branch) from
/// the second-order quasi-degenerate expansion.
#[derive(Debug, Clone)]
pub struct ModifiedLevel {
    pub frame: TwoLevelFrame,
    pub branch: Branch,
    pub delta: f64,
    pub truncation: usize,
}

impl ModifiedLevel {
    pub fn new(frame: TwoLevelFrame, level: Level, delta: f64, truncation: usize) -> Self {
        Self { frame, branch: Branch::Level(level), delta, truncation }
    }
}

impl Potential for ModifiedLevel {
    fn value(&self, x: f64) -> Result<f64> {
        let p = EffectivePair::new(&self.frame, x, self.truncation)?;
        Ok(match self.branch {
            Branch::Level(level) => crate::angular::modified_potential(&p, level, self.delta),
            Branch::Mean => p.v3(self.delta),
        })
    }

    fn step(&self) -> f64 {
        (2e-2 * self.delta).clamp(1e-5, 1e-3)
    }

    fn gradient(&self, x: f64) -> Result<f64> {
        five_point(|y| self.value(y), x, 0.05 * self.step())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::{FiberModel, ModeBasis, Perturbation};
    use crate::surface::{ProfileShape, SurfaceProfile};
    use approx::assert_relative_eq;

    pub(crate) fn frame(w0: f64, modes: usize) -> TwoLevelFrame {
        let p = SurfaceProfile::new(ProfileShape::TanhNeck { base: 1.0, amplitude: 0.4, width: 1.0 }, 1.0);
        let model = FiberModel::new(p, Perturbation::transverse_field(w0));
        TwoLevelFrame::new(model, (0, -1), ModeBasis::around(0, -1, modes)).unwrap()
    }

    #[test]
    fn hellmann_feynman_matches_difference_quotient() {
        let f = frame(0.9, 16);
        for level in [Level::A, Level::B] {
            let v = ExactLevel::new(f.clone(), level, 0.05);
            for &x in &[-0.3, -0.02, 0.0, 0.04, 0.25] {
                let fd = five_point(|y| v.value(y), x, 1e-4).unwrap();
                assert_relative_eq!(v.gradient(x).unwrap(), fd, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn exact_and_modified_agree_near_crossing() {
        let f = frame(0.9, 16);
        let d = 0.05;
        for level in [Level::A, Level::B] {
            let e = ExactLevel::new(f.clone(), level, d);
            let m = ModifiedLevel::new(f.clone(), level, d, 64);
            for &x in &[-0.1, 0.0, 0.07] {
                assert!((e.value(x).unwrap() - m.value(x).unwrap()).abs() < 2e-3);
            }
        }
    }

    #[test]
    fn mean_branch_is_average() {
        let f = frame(0.9, 16);
        let a = ExactLevel::new(f.clone(), Level::A, 0.05).value(0.1).unwrap();
        let b = ExactLevel::new(f.clone(), Level::B, 0.05).value(0.1).unwrap();
        assert_relative_eq!(ExactLevel::mean(f, 0.05).value(0.1).unwrap(), 0.5 * (a + b), epsilon = 1e-14);
    }
}
