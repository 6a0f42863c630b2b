//! Exact solution of the inner two-level equation
//! `i ∂_s (f, g) = r [[η⁰s + y, 1], [1, −(η⁰s + y)]] (f, g)`
//! in terms of parabolic cylinder functions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::pcf::{pcf_d_with, PcfMethod, PcfOptions};
use crate::angular::twolevel::adiabatic_eigvecs;
use crate::error::{Error, Result};

/// Rate `r` and crossing momentum `η⁰` of the rescaled problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LzParameters {
    pub r: f64,
    pub eta0: f64,
}

impl LzParameters {
    pub fn new(r: f64, eta0: f64) -> Result<Self> {
        if !(r > 0.0) || !(eta0 > 0.0) {
            return Err(Error::InvalidParameters(format!(
                "Landau-Zener parameters need r > 0 and eta0 > 0, got r = {r}, eta0 = {eta0}"
            )));
        }
        Ok(Self { r, eta0 })
    }

    /// `k = r / η⁰`.
    pub fn ratio(&self) -> f64 {
        self.r / self.eta0
    }

    /// Order `ν = i r / (2η⁰)`.
    pub fn order(&self) -> Complex64 {
        Complex64::new(0.0, self.ratio() / 2.0)
    }

    /// `u = η⁰ s + y`.
    pub fn u(&self, s: f64, y: f64) -> f64 {
        self.eta0 * s + y
    }
}

/// Evaluator for the two fundamental solution columns.
#[derive(Debug, Clone, Copy)]
pub struct InnerSolution {
    pub params: LzParameters,
    pub opts: PcfOptions,
}

type Pair = [Complex64; 2];

impl InnerSolution {
    pub fn new(params: LzParameters) -> Self {
        Self { params, opts: PcfOptions { max_abs: 1e4, ..PcfOptions::default() } }
    }

    fn d(&self, nu: Complex64, z: Complex64) -> Result<Complex64> {
        pcf_d_with(nu, z, PcfMethod::Auto, &self.opts)
    }

    /// `D_ν(ζ)` and `dD_ν(ζ(u))/du` for `ζ = ζ' u`.
    fn d_and_du(&self, nu: Complex64, zp: Complex64, u: f64) -> Result<(Complex64, Complex64)> {
        let z = zp * u;
        let d = self.d(nu, z)?;
        let up = self.d(nu + 1.0, z)?;
        Ok((d, zp * (z / 2.0 * d - up)))
    }

    /// Columns multiplying `C₁` and `C₂`, and their `u`-derivatives.
    pub fn columns_with_derivative(&self, u: f64) -> Result<([Pair; 2], [Pair; 2])> {
        let k = self.params.ratio();
        let sk = k.sqrt();
        let nu = self.params.order();
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::i();
        let z1 = (i - one) * sk;
        let z2 = -(one + i) * sk;
        let pre1 = (one - i) / 2.0 * sk;
        let pre2 = -(one + i) / 2.0 * sk;
        let (a, da) = self.d_and_du(nu - 1.0, z1, u)?;
        let (b, db) = self.d_and_du(nu, z1, u)?;
        let (c, dc) = self.d_and_du(-nu, z2, u)?;
        let (e, de) = self.d_and_du(-nu - 1.0, z2, u)?;
        Ok(([[pre1 * a, b], [c, pre2 * e]], [[pre1 * da, db], [dc, pre2 * de]]))
    }

    pub fn columns(&self, u: f64) -> Result<[Pair; 2]> {
        Ok(self.columns_with_derivative(u)?.0)
    }

    /// `(f₀, g₀)` at `u` for coefficients `(C₁, C₂)`.
    pub fn eval_u(&self, u: f64, c1: Complex64, c2: Complex64) -> Result<Pair> {
        let [p, q] = self.columns(u)?;
        Ok([c1 * p[0] + c2 * q[0], c1 * p[1] + c2 * q[1]])
    }

    /// `(f₀, g₀)` at `(s, y)`.
    pub fn eval(&self, s: f64, y: f64, c1: Complex64, c2: Complex64) -> Result<Pair> {
        self.eval_u(self.params.u(s, y), c1, c2)
    }

    /// Time series over `s_grid` at fixed `y`.
    pub fn series(&self, s_grid: &[f64], y: f64, c1: Complex64, c2: Complex64) -> Result<Vec<Pair>> {
        s_grid.iter().map(|&s| self.eval(s, y, c1, c2)).collect()
    }

    /// `|i ∂_s(f, g) − r M(s, y)(f, g)|` from the analytic derivative.
    pub fn residual(&self, s: f64, y: f64, c1: Complex64, c2: Complex64) -> Result<f64> {
        let u = self.params.u(s, y);
        let ([p, q], [dp, dq]) = self.columns_with_derivative(u)?;
        let f = c1 * p[0] + c2 * q[0];
        let g = c1 * p[1] + c2 * q[1];
        let df = (c1 * dp[0] + c2 * dq[0]) * self.params.eta0;
        let dg = (c1 * dp[1] + c2 * dq[1]) * self.params.eta0;
        let i = Complex64::i();
        let r = self.params.r;
        let rf = i * df - r * (u * f + g);
        let rg = i * dg - r * (f - u * g);
        Ok((rf.norm_sqr() + rg.norm_sqr()).sqrt())
    }

    /// Populations `(P_A, P_B)` of the instantaneous eigenvectors of
    /// `M(u)` (A above, B below).
    pub fn adiabatic_populations(&self, u: f64, c1: Complex64, c2: Complex64) -> Result<(f64, f64)> {
        let [f, g] = self.eval_u(u, c1, c2)?;
        let s = (u * u + 1.0).sqrt();
        let v = adiabatic_eigvecs((u / s).acos(), 0.0);
        let pa = (v.a[0].conj() * f + v.a[1].conj() * g).norm_sqr();
        let pb = (v.b[0].conj() * f + v.b[1].conj() * g).norm_sqr();
        Ok((pa, pb))
    }
}
