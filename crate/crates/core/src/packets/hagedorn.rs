//! Hagedorn wave packets `φ_j(A, B, ħ, a, η, x)` in one dimension.
//!
//! The raising operator is
//! `𝒜* = (2ħ)^{−1/2} [B̄(x − a) − iĀ(−iħ∂ₓ − η)]`, realized through the
//! three-term recurrence
//! `√(j+1) φ_{j+1} = √(2/ħ) (x − a)/A φ_j − √j (Ā/A) φ_{j−1}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the symplectic constraint `Re(Ā B) = 1`.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// Parameters of the packet family `{φ_j}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HagedornPacket {
    pub a_mat: Complex64,
    pub b_mat: Complex64,
    pub hbar: f64,
    pub center: f64,
    pub momentum: f64,
    /// Branch of `A^{1/2}` in use.
    pub sqrt_a: Complex64,
}

impl HagedornPacket {
    /// Builds a packet with the principal branch of `A^{1/2}`.
    pub fn new(a_mat: Complex64, b_mat: Complex64, hbar: f64, center: f64, momentum: f64) -> Result<Self> {
        let sym = (a_mat.conj() * b_mat).re;
        if (sym - 1.0).abs() > SYMPLECTIC_TOL {
            return Err(Error::InvalidParameters(format!("Re(conj(A) B) = {sym}, expected 1")));
        }
        if !(hbar > 0.0) {
            return Err(Error::InvalidParameters(format!("hbar must be positive, got {hbar}")));
        }
        Ok(Self { a_mat, b_mat, hbar, center, momentum, sqrt_a: a_mat.sqrt() })
    }

    /// Standard harmonic-oscillator parameters `A = B = 1`.
    pub fn standard(hbar: f64, center: f64, momentum: f64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self::new(one, one, hbar, center, momentum).expect("A = B = 1 is admissible")
    }

    /// Same packet with `A^{1/2}` on the branch closest to `previous`.
    pub fn with_branch_near(mut self, previous: Complex64) -> Self {
        let s = self.a_mat.sqrt();
        self.sqrt_a = if (s - previous).norm() <= (s + previous).norm() { s } else { -s };
        self
    }

    pub fn position_uncertainty(&self, j: usize) -> f64 {
        ((j as f64 + 0.5) * self.hbar).sqrt() * self.a_mat.norm()
    }

    pub fn momentum_uncertainty(&self, j: usize) -> f64 {
        ((j as f64 + 0.5) * self.hbar).sqrt() * self.b_mat.norm()
    }

    /// `φ_0, ..., φ_jmax` at a single point.
    pub fn eval_upto(&self, jmax: usize, x: f64) -> Vec<Complex64> {
        let h = self.hbar;
        let dx = x - self.center;
        let ba = self.b_mat / self.a_mat;
        let phase = Complex64::new(-(ba.re * dx * dx) / (2.0 * h), 0.0)
            + Complex64::new(0.0, -(ba.im * dx * dx) / (2.0 * h) + self.momentum * dx / h);
        let norm = (std::f64::consts::PI * h).powf(-0.25);
        let mut out = Vec::with_capacity(jmax + 1);
        out.push(norm / self.sqrt_a * phase.exp());
        if jmax == 0 {
            return out;
        }
        let lead = (2.0 / h).sqrt() * dx / self.a_mat;
        let ratio = self.a_mat.conj() / self.a_mat;
        out.push(lead * out[0]);
        for j in 1..jmax {
            let next = (lead * out[j] - ratio * (j as f64).sqrt() * out[j - 1]) / ((j + 1) as f64).sqrt();
            out.push(next);
        }
        out
    }

    /// `φ_j(x)`.
    pub fn eval(&self, j: usize, x: f64) -> Complex64 {
        self.eval_upto(j, x)[j]
    }

    /// `φ_j` on a grid.
    pub fn eval_grid(&self, j: usize, xs: &[f64]) -> Vec<Complex64> {
        xs.iter().map(|&x| self.eval(j, x)).collect()
    }

    /// Grid half-width covering eight position uncertainties of `φ_j`.
    pub fn support_half_width(&self, j: usize) -> f64 {
        8.0 * self.position_uncertainty(j)
    }
}

/// Unit-`ħ` packet `φ_l(A, B, 1, 0, 0, y)` used by the matching formulas.
pub fn unit_packet(l: usize, a_mat: Complex64, b_mat: Complex64, y: f64) -> Result<Complex64> {
    Ok(HagedornPacket::new(a_mat, b_mat, 1.0, 0.0, 0.0)?.eval(l, y))
}

/// Tracks the branch of `A^{1/2}` continuously along a sequence of `A` values.
pub fn tracked_sqrt(values: &[Complex64]) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::with_capacity(values.len());
    for &a in values {
        let s = a.sqrt();
        let chosen = match out.last() {
            Some(&prev) if (s - prev).norm() > (s + prev).norm() => -s,
            _ => s,
        };
        out.push(chosen);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// `A = ρ(1 + i tw)` and `B` with `Ā B = 1 + 0.3i`.
    fn generic(rho: f64, tw: f64) -> (Complex64, Complex64) {
        let a = c(rho, rho * tw);
        (a, c(1.0, 0.3) / a.conj())
    }

    fn grid(center: f64, half: f64, n: usize) -> (Vec<f64>, f64) {
        let dx = 2.0 * half / (n - 1) as f64;
        ((0..n).map(|i| center - half + i as f64 * dx).collect(), dx)
    }

    #[test]
    fn standard_ground_state_value() {
        let p = HagedornPacket::standard(1.0, 0.0, 0.0);
        assert_relative_eq!(p.eval(0, 0.0).re, 0.751_125_544_464_942_5, epsilon = 1e-14);
    }

    #[test]
    fn standard_parameters_give_hermite_functions() {
        let p = HagedornPacket::standard(1.0, 0.0, 0.0);
        for &x in &[-1.3, 0.0, 0.4, 2.2] {
            let g = (-x * x / 2.0_f64).exp() * std::f64::consts::PI.powf(-0.25);
            let hermite = [1.0, 2.0 * x, 4.0 * x * x - 2.0, 8.0 * x * x * x - 12.0 * x];
            for (j, &h) in hermite.iter().enumerate() {
                let fact: f64 = (1..=j).map(|v| v as f64).product();
                let expected = g * h / (2f64.powi(j as i32) * fact).sqrt();
                assert_relative_eq!(p.eval(j, x).re, expected, epsilon = 1e-13);
                assert!(p.eval(j, x).im.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn recurrence_matches_raising_operator_on_grid() {
        let (a, b) = generic(1.3, 0.6);
        let p = HagedornPacket::new(a, b, 0.04, 0.3, 1.1).unwrap();
        let (xs, dx) = grid(0.3, 2.0, 8001);
        let mut phi = p.eval_grid(0, &xs);
        for j in 0..5 {
            let n = xs.len();
            let mut raised = vec![Complex64::new(0.0, 0.0); n];
            for i in 2..n - 2 {
                let d = (-phi[i + 2] + 8.0 * phi[i + 1] - 8.0 * phi[i - 1] + phi[i - 2]) / (12.0 * dx);
                let p_op = -Complex64::i() * p.hbar * d - p.momentum * phi[i];
                raised[i] = (b.conj() * (xs[i] - p.center) * phi[i] - Complex64::i() * a.conj() * p_op)
                    / (2.0 * p.hbar).sqrt()
                    / ((j + 1) as f64).sqrt();
            }
            let expected = p.eval_grid(j + 1, &xs);
            let scale = expected.iter().map(|v| v.norm()).fold(0.0, f64::max);
            for i in 2..n - 2 {
                assert!((raised[i] - expected[i]).norm() < 1e-6 * scale, "j={j} i={i}");
            }
            phi = expected;
        }
    }

    #[test]
    fn branch_tracking_is_continuous() {
        let values: Vec<Complex64> = (0..200).map(|k| Complex64::from_polar(1.0, 0.05 * k as f64)).collect();
        let roots = tracked_sqrt(&values);
        for w in roots.windows(2) {
            assert!((w[1] / w[0]).arg().abs() < std::f64::consts::FRAC_PI_2);
        }
    }

    #[test]
    fn rejects_non_symplectic_pair() {
        assert!(HagedornPacket::new(c(1.0, 0.0), c(2.0, 0.0), 1.0, 0.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn gram_matrix_is_identity(rho in 0.5f64..2.0, tw in -1.0f64..1.0, eta in -2.0f64..2.0) {
            let (a, b) = generic(rho, tw);
            let p = HagedornPacket::new(a, b, 0.01, -0.2, eta).unwrap();
            let half = p.support_half_width(5) * 1.5;
            let (xs, dx) = grid(-0.2, half, 6001);
            let cols: Vec<Vec<Complex64>> = xs.iter().map(|&x| p.eval_upto(5, x)).collect();
            for i in 0..6 {
                for j in 0..6 {
                    let s: Complex64 = cols.iter().map(|v| v[i].conj() * v[j]).sum::<Complex64>() * dx;
                    let target = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((s - target).norm() < 1e-8, "i={} j={} s={}", i, j, s);
                }
            }
        }

        #[test]
        fn position_uncertainty_matches(rho in 0.5f64..2.0, tw in -1.0f64..1.0, j in 0usize..4) {
            let (a, b) = generic(rho, tw);
            let p = HagedornPacket::new(a, b, 0.01, 0.4, 0.7).unwrap();
            let half = p.support_half_width(j) * 1.5;
            let (xs, dx) = grid(0.4, half, 6001);
            let v = p.eval_grid(j, &xs);
            let var: f64 = xs.iter().zip(&v).map(|(x, f)| (x - 0.4).powi(2) * f.norm_sqr()).sum::<f64>() * dx;
            prop_assert!((var.sqrt() - p.position_uncertainty(j)).abs() < 1e-6);
        }
    }
}
