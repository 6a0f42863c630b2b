//! Two-level reduction of `g(x, δ)` near an avoided crossing, its normal
//! form, and the adiabatic angles and eigenvectors of the reduced matrix.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fiber::{FiberModel, ModeBasis};
use crate::error::{Error, Result};

/// `g_∥ = [[β, γ+iσ], [γ−iσ, −β]] + V̄` at one point `(x, δ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedTwoLevel {
    pub beta: f64,
    pub gamma: f64,
    pub sigma: f64,
    pub vbar: f64,
}

impl ReducedTwoLevel {
    /// Half gap `s = √(β² + γ² + σ²)`.
    pub fn s(&self) -> f64 {
        (self.beta * self.beta + self.gamma * self.gamma + self.sigma * self.sigma).sqrt()
    }

    /// `(μ_A, μ_B) = V̄ ± s`.
    pub fn eigenvalues(&self) -> (f64, f64) {
        (self.vbar + self.s(), self.vbar - self.s())
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let off = Complex64::new(self.gamma, self.sigma);
        [[Complex64::new(self.vbar + self.beta, 0.0), off], [off.conj(), Complex64::new(self.vbar - self.beta, 0.0)]]
    }

    pub fn from_matrix(g: [[Complex64; 2]; 2]) -> Self {
        Self {
            beta: 0.5 * (g[0][0].re - g[1][1].re),
            gamma: g[0][1].re,
            sigma: g[0][1].im,
            vbar: 0.5 * (g[0][0].re + g[1][1].re),
        }
    }
}

/// Local expansion `β ≈ b₁x + b₂δ`, `γ ≈ c₂δ` at the crossing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalForm {
    pub b1: f64,
    pub b2: f64,
    pub c2: f64,
}

impl NormalForm {
    /// `r = c₂⁴ / b₁²`.
    pub fn r(&self) -> f64 {
        self.c2.powi(4) / (self.b1 * self.b1)
    }

    /// Factor multiplying energies in the rescaled frame (equals `r`).
    pub fn energy_scale(&self) -> f64 {
        self.r()
    }

    pub fn x_to_rescaled(&self, x: f64, delta: f64) -> f64 {
        self.b1 * x + self.b2 * delta
    }

    pub fn x_from_rescaled(&self, xr: f64, delta: f64) -> f64 {
        (xr - self.b2 * delta) / self.b1
    }

    pub fn delta_to_rescaled(&self, delta: f64) -> f64 {
        self.c2 * delta
    }

    pub fn delta_from_rescaled(&self, dr: f64) -> f64 {
        dr / self.c2
    }

    pub fn t_to_rescaled(&self, t: f64) -> f64 {
        self.b1 * self.b1 / (self.c2 * self.c2) * t
    }

    pub fn t_from_rescaled(&self, tr: f64) -> f64 {
        tr * self.c2 * self.c2 / (self.b1 * self.b1)
    }

    /// Momenta scale as `x/t`: `η' = (c₂²/b₁) η`.
    pub fn eta_to_rescaled(&self, eta: f64) -> f64 {
        self.c2 * self.c2 / self.b1 * eta
    }

    pub fn eta_from_rescaled(&self, er: f64) -> f64 {
        er * self.b1 / (self.c2 * self.c2)
    }

    /// Landau-Zener ratio `r/η⁰` for a physical crossing momentum.
    pub fn lz_ratio(&self, eta_physical: f64) -> f64 {
        self.r() / self.eta_to_rescaled(eta_physical)
    }

    /// The normal form of the rescaled problem: `b₁ = c₂ = 1`... up to the
    /// rate `r`, i.e. `β' = r x'`, `γ' = r δ'`.
    pub fn rescaled(&self) -> NormalForm {
        let r = self.r();
        NormalForm { b1: r, b2: 0.0, c2: r }
    }

    /// Rescales a reduced matrix evaluated at the corresponding point.
    pub fn rescale_point(&self, p: &ReducedTwoLevel) -> ReducedTwoLevel {
        let r = self.r();
        ReducedTwoLevel { beta: r * p.beta, gamma: r * p.gamma, sigma: r * p.sigma, vbar: r * p.vbar }
    }
}

/// Frame vectors `(ψ₁, ψ₂)`, eigenvalues `[μ_A, μ_B]` and eigenvectors
/// `[Φ_A, Φ_B]` at one point.
pub type FrameSample = (Vec<Complex64>, Vec<Complex64>, [f64; 2], [Vec<Complex64>; 2]);

/// The smooth two-dimensional basis `(ψ₁, ψ₂)` spanned by the two levels
/// of `g(x, δ)` that cross at `x = 0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwoLevelFrame {
    pub model: FiberModel,
    pub basis: ModeBasis,
    /// Diabatic mode projected to build `ψ₁`.
    pub first: i64,
    /// Diabatic mode projected to build `ψ₂`.
    pub second: i64,
    /// Constant phase applied to `ψ₂` so that `γ > 0` at the crossing.
    pub phase: Complex64,
}

impl TwoLevelFrame {
    /// Orders the pair so that `β` increases through the crossing.
    pub fn new(model: FiberModel, pair: (i64, i64), basis: ModeBasis) -> Result<Self> {
        let (n, m) = pair;
        if basis.index(n).is_none() || basis.index(m).is_none() {
            return Err(Error::InvalidParameters(format!("pair ({n}, {m}) outside the mode basis")));
        }
        let slope = model.level_dx(n, 0.0)? - model.level_dx(m, 0.0)?;
        if slope.abs() < 1e-12 {
            return Err(Error::IllConditionedCrossing(format!("levels ({n}, {m}) cross with zero slope")));
        }
        let (first, second) = if slope > 0.0 { (n, m) } else { (m, n) };
        let w = model.coupling(first, second, 0.0)?;
        let phase = if w.norm() > 0.0 { w.conj() / w.norm() } else { Complex64::new(1.0, 0.0) };
        Ok(Self { model, basis, first, second, phase })
    }

    /// `(ψ₁, ψ₂)` at `(x, δ)` as coefficient vectors on the mode basis.
    pub fn vectors(&self, x: f64, delta: f64) -> Result<FrameSample> {
        let e = self.model.eigen(x, delta, &self.basis)?;
        let (up, lo) = e.pair_indices(&self.basis, self.first, self.second)?;
        let va = e.vector(up);
        let vb = e.vector(lo);
        let k1 = self.basis.index(self.first).unwrap();
        let k2 = self.basis.index(self.second).unwrap();
        // P e_k = Σ_C Φ_C ⟨Φ_C, e_k⟩.
        let project = |k: usize| -> Vec<Complex64> {
            let ca = va[k].conj();
            let cb = vb[k].conj();
            va.iter().zip(&vb).map(|(a, b)| a * ca + b * cb).collect()
        };
        let mut p1 = project(k1);
        normalize(&mut p1)?;
        let mut p2 = project(k2);
        let ov = dot(&p1, &p2);
        p2.iter_mut().zip(&p1).for_each(|(z, u)| *z -= u * ov);
        normalize(&mut p2)?;
        p2.iter_mut().for_each(|z| *z *= self.phase);
        Ok((p1, p2, [e.values[up], e.values[lo]], [va, vb]))
    }

    /// Reduced matrix of `g(x, δ)` in the frame.
    pub fn at(&self, x: f64, delta: f64) -> Result<ReducedTwoLevel> {
        let (p1, p2, mu, [va, vb]) = self.vectors(x, delta)?;
        let ps = [&p1, &p2];
        let mut g = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                g[i][j] = mu[0] * dot(ps[i], &va) * dot(&va, ps[j]) + mu[1] * dot(ps[i], &vb) * dot(&vb, ps[j]);
            }
        }
        Ok(ReducedTwoLevel::from_matrix(g))
    }

    /// Least-squares fit of `β` and `γ` on `|x| ≤ half_width`.
    pub fn fit(&self, delta: f64, half_width: f64) -> Result<NormalForm> {
        if !(delta > 0.0) || !(half_width > 0.0) {
            return Err(Error::InvalidParameters("normal-form fit needs delta > 0 and a nonempty window".into()));
        }
        let pts = 21;
        let mut xs = Vec::with_capacity(pts);
        let mut betas = Vec::with_capacity(pts);
        let mut gammas = Vec::with_capacity(pts);
        for i in 0..pts {
            let x = -half_width + 2.0 * half_width * i as f64 / (pts - 1) as f64;
            let p = self.at(x, delta)?;
            xs.push(x);
            betas.push(p.beta);
            gammas.push(p.gamma);
        }
        let cb = quadratic_fit(&xs, &betas)?;
        let cg = quadratic_fit(&xs, &gammas)?;
        let nf = NormalForm { b1: cb[1], b2: cb[0] / delta, c2: cg[0] / delta };
        let scale = self.model.level(self.first, 0.0)?.abs().max(1.0);
        if nf.b1.abs() < 1e-10 * scale || nf.c2.abs() < 1e-10 * scale {
            return Err(Error::IllConditionedCrossing(format!("fitted b1 = {:e}, c2 = {:e}", nf.b1, nf.c2)));
        }
        Ok(nf)
    }

    /// `δ → 0` normal form from the closed-form spectrum and coupling.
    pub fn analytic_normal_form(&self) -> Result<NormalForm> {
        let b1 = 0.5 * (self.model.level_dx(self.first, 0.0)? - self.model.level_dx(self.second, 0.0)?);
        let w11 = self.model.coupling(self.first, self.first, 0.0)?.re;
        let w22 = self.model.coupling(self.second, self.second, 0.0)?.re;
        let c2 = self.model.coupling(self.first, self.second, 0.0)?.norm();
        if c2 == 0.0 {
            return Err(Error::IllConditionedCrossing("coupling vanishes at the crossing".into()));
        }
        Ok(NormalForm { b1, b2: 0.5 * (w11 - w22), c2 })
    }
}

/// The two-level reduction together with its fitted normal form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Reduction {
    pub frame: TwoLevelFrame,
    pub normal_form: NormalForm,
    pub delta: f64,
}

/// Reduces `g` near the `(n, m)` crossing and fits `b₁, b₂, c₂` on the
/// window `|x| ≤ 5δ`.
pub fn reduce_two_level(model: &FiberModel, pair: (i64, i64), basis: ModeBasis, delta: f64) -> Result<Reduction> {
    let frame = TwoLevelFrame::new(model.clone(), pair, basis)?;
    let normal_form = frame.fit(delta, 5.0 * delta)?;
    Ok(Reduction { frame, normal_form, delta })
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn normalize(v: &mut [Complex64]) -> Result<()> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n < 1e-8 {
        return Err(Error::IllConditionedCrossing("reference mode has no weight on the crossing pair".into()));
    }
    v.iter_mut().for_each(|z| *z /= n);
    Ok(())
}

/// Coefficients `[c₀, c₁, c₂]` of the least-squares quadratic.
fn quadratic_fit(xs: &[f64], ys: &[f64]) -> Result<[f64; 3]> {
    let scale = xs.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let mut ata = Matrix3::<f64>::zeros();
    let mut aty = Vector3::<f64>::zeros();
    for (&x, &y) in xs.iter().zip(ys) {
        let u = x / scale;
        let row = Vector3::new(1.0, u, u * u);
        ata += row * row.transpose();
        aty += row * y;
    }
    let c = ata.lu().solve(&aty).ok_or_else(|| Error::IllConditionedCrossing("singular fit".into()))?;
    Ok([c[0], c[1] / scale, c[2] / (scale * scale)])
}

/// Spherical angles of `(β, γ, σ)`: `β = s cos θ`, `γ = s sin θ cos φ`,
/// `σ = s sin θ sin φ`, with `θ ∈ [0, π]` and `φ ∈ (−π, π]`.
pub fn adiabatic_angles(p: &ReducedTwoLevel) -> Result<(f64, f64)> {
    let s = p.s();
    if s == 0.0 {
        return Err(Error::DegeneratePoint { x: f64::NAN, delta: f64::NAN });
    }
    let theta = (p.beta / s).clamp(-1.0, 1.0).acos();
    let phi = if p.gamma == 0.0 && p.sigma == 0.0 { 0.0 } else { p.sigma.atan2(p.gamma) };
    Ok((theta, phi))
}

/// Eigenvectors of the traceless part, in the `(ψ₁, ψ₂)` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticVectors {
    pub a: [Complex64; 2],
    pub b: [Complex64; 2],
}

/// `Φ_A`, `Φ_B` for angles `(θ, φ)`: the "+" formulas for `θ ≤ π/2`,
/// the "−" formulas otherwise.
pub fn adiabatic_eigvecs(theta: f64, phi: f64) -> AdiabaticVectors {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = Complex64::from_polar(1.0, phi);
    let re = |v: f64| Complex64::new(v, 0.0);
    if theta <= FRAC_PI_2 {
        AdiabaticVectors { a: [re(c), e.conj() * s], b: [-e * s, re(c)] }
    } else {
        AdiabaticVectors { a: [e * c, re(s)], b: [re(-s), e.conj() * c] }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::coupling::Perturbation;
    use crate::surface::{ProfileShape, SurfaceProfile};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn model(w0: f64) -> FiberModel {
        let p = SurfaceProfile::new(ProfileShape::TanhNeck { base: 1.0, amplitude: 0.4, width: 1.0 }, 1.0);
        FiberModel::new(p, Perturbation::transverse_field(w0))
    }

    fn frame(w0: f64) -> TwoLevelFrame {
        TwoLevelFrame::new(model(w0), (0, -1), ModeBasis::around(0, -1, 16)).unwrap()
    }

    #[test]
    fn ordering_puts_rising_mode_first() {
        let f = frame(0.9);
        assert_eq!((f.first, f.second), (0, -1));
        let f = TwoLevelFrame::new(model(0.9), (-1, 0), ModeBasis::around(0, -1, 16)).unwrap();
        assert_eq!((f.first, f.second), (0, -1));
    }

    #[test]
    fn uncoupled_reduction_is_diagonal() {
        let f = frame(0.0);
        let m = model(0.0);
        for &x in &[-0.3, 0.0, 0.2] {
            let p = f.at(x, 0.05).unwrap();
            let l0 = m.diagonal(0, x, 0.05).unwrap();
            let l1 = m.diagonal(-1, x, 0.05).unwrap();
            assert!(p.gamma.abs() < 1e-14 && p.sigma.abs() < 1e-14);
            assert_relative_eq!(p.beta, 0.5 * (l0 - l1), epsilon = 1e-13);
            assert_relative_eq!(p.vbar, 0.5 * (l0 + l1), epsilon = 1e-13);
        }
    }

    #[test]
    fn reduced_eigenvalues_are_exact_levels() {
        let f = frame(0.9);
        for &x in &[-0.2, 0.0, 0.01, 0.3] {
            let p = f.at(x, 0.05).unwrap();
            let e = f.model.eigen(x, 0.05, &f.basis).unwrap();
            let (up, lo) = e.pair_indices(&f.basis, 0, -1).unwrap();
            let (a, b) = p.eigenvalues();
            assert_relative_eq!(a, e.values[up], epsilon = 1e-12);
            assert_relative_eq!(b, e.values[lo], epsilon = 1e-12);
        }
    }

    #[test]
    fn fitted_coefficients_match_closed_forms() {
        let f = frame(0.9);
        let fit = f.fit(1e-3, 5e-3).unwrap();
        let an = f.analytic_normal_form().unwrap();
        // b1 = -(n-m)(n+m) R'/(2R^3) = 0.2 for (0,-1), R' = 0.4.
        assert_relative_eq!(an.b1, 0.2, max_relative = 1e-14);
        assert_relative_eq!(an.c2, 0.45, max_relative = 1e-14);
        assert_eq!(an.b2, 0.0);
        assert_relative_eq!(fit.b1, an.b1, max_relative = 1e-3);
        assert_relative_eq!(fit.c2, an.c2, max_relative = 1e-3);
        assert!(fit.b2.abs() < 1e-3);
        // Finite-difference oracle for b1.
        let m = model(0.9);
        let h = 1e-5;
        let half = |x: f64| 0.5 * (m.level(0, x).unwrap() - m.level(-1, x).unwrap());
        assert_relative_eq!((half(h) - half(-h)) / (2.0 * h), an.b1, max_relative = 1e-8);
    }

    #[test]
    fn zero_coupling_fit_is_ill_conditioned() {
        let f = frame(0.0);
        assert!(matches!(f.fit(0.01, 0.05), Err(Error::IllConditionedCrossing(_))));
    }

    #[test]
    fn rescaled_slopes_equal_rate() {
        let f = frame(0.9);
        let delta = 1e-3;
        let nf = f.fit(delta, 5.0 * delta).unwrap();
        let r = nf.r();
        let dr = nf.delta_to_rescaled(delta);
        let h = 0.5 * dr;
        let beta_r = |xr: f64| {
            let p = f.at(nf.x_from_rescaled(xr, delta), delta).unwrap();
            nf.rescale_point(&p)
        };
        let slope = (beta_r(h).beta - beta_r(-h).beta) / (2.0 * h);
        assert_relative_eq!(slope, r, max_relative = 2e-3);
        assert_relative_eq!(beta_r(0.0).gamma / dr, r, max_relative = 2e-3);
    }

    #[test]
    fn frame_roundtrips() {
        let nf = NormalForm { b1: 0.3, b2: 0.7, c2: 1.9 };
        let x = 0.123;
        assert_relative_eq!(nf.x_from_rescaled(nf.x_to_rescaled(x, 0.05), 0.05), x, max_relative = 1e-14);
        assert_relative_eq!(nf.t_from_rescaled(nf.t_to_rescaled(x)), x, max_relative = 1e-14);
        let id = NormalForm { b1: 1.0, b2: 0.0, c2: 1.0 };
        assert_eq!(id.x_to_rescaled(x, 0.2), x);
        assert_eq!(id.t_to_rescaled(x), x);
        assert_eq!(id.delta_to_rescaled(0.2), 0.2);
    }

    #[test]
    fn angle_examples() {
        let p = |b, g, s| ReducedTwoLevel { beta: b, gamma: g, sigma: s, vbar: 0.0 };
        assert_eq!(adiabatic_angles(&p(1.0, 0.0, 0.0)).unwrap(), (0.0, 0.0));
        let (t, f) = adiabatic_angles(&p(0.0, 2.0, 0.0)).unwrap();
        assert_relative_eq!(t, FRAC_PI_2);
        assert_eq!(f, 0.0);
        let k = 1.0 / 3f64.sqrt();
        let (t, f) = adiabatic_angles(&p(k, k, k)).unwrap();
        assert_relative_eq!(t, k.acos(), max_relative = 1e-14);
        assert_relative_eq!(f, std::f64::consts::FRAC_PI_4, max_relative = 1e-14);
        assert!(matches!(adiabatic_angles(&p(0.0, 0.0, 0.0)), Err(Error::DegeneratePoint { .. })));
    }

    #[test]
    fn eigvec_examples() {
        let v = adiabatic_eigvecs(0.0, 0.3);
        assert_eq!(v.a, [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        assert!((v.b[1] - Complex64::new(1.0, 0.0)).norm() < 1e-15 && v.b[0].norm() < 1e-15);
        let v = adiabatic_eigvecs(std::f64::consts::PI, 0.3);
        assert!(v.a[0].norm() < 1e-15 && (v.a[1].norm() - 1.0).abs() < 1e-15);
    }

    fn mat_vec(m: &[[Complex64; 2]; 2], v: &[Complex64; 2]) -> [Complex64; 2] {
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    proptest! {
        #[test]
        fn angles_roundtrip(b in -2.0f64..2.0, g in -2.0f64..2.0, s in -2.0f64..2.0) {
            let p = ReducedTwoLevel { beta: b, gamma: g, sigma: s, vbar: 0.0 };
            prop_assume!(p.s() > 1e-6);
            let (t, f) = adiabatic_angles(&p).unwrap();
            let r = p.s();
            prop_assert!((r * t.cos() - b).abs() < 1e-12);
            prop_assert!((r * t.sin() * f.cos() - g).abs() < 1e-12);
            prop_assert!((r * t.sin() * f.sin() - s).abs() < 1e-12);
        }

        #[test]
        fn eigvecs_diagonalize(b in -2.0f64..2.0, g in -2.0f64..2.0, s in -2.0f64..2.0, v in -1.0f64..1.0) {
            let p = ReducedTwoLevel { beta: b, gamma: g, sigma: s, vbar: v };
            prop_assume!(p.s() > 1e-6);
            let (t, f) = adiabatic_angles(&p).unwrap();
            let e = adiabatic_eigvecs(t, f);
            let m = p.matrix();
            let (ma, mb) = p.eigenvalues();
            let ga = mat_vec(&m, &e.a);
            let gb = mat_vec(&m, &e.b);
            for k in 0..2 {
                prop_assert!((ga[k] - e.a[k] * ma).norm() < 1e-12);
                prop_assert!((gb[k] - e.b[k] * mb).norm() < 1e-12);
            }
            let ov = e.a[0].conj() * e.b[0] + e.a[1].conj() * e.b[1];
            prop_assert!(ov.norm() < 1e-14);
        }

        #[test]
        fn reconstruction_matches_direct_diagonalization(b in -2.0f64..2.0, g in -2.0f64..2.0, s in -2.0f64..2.0, v in -1.0f64..1.0) {
            let p = ReducedTwoLevel { beta: b, gamma: g, sigma: s, vbar: v };
            let m = p.matrix();
            let tr = (m[0][0] + m[1][1]).re;
            let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).re;
            let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
            let (a, bb) = p.eigenvalues();
            prop_assert!((a - (tr / 2.0 + disc)).abs() < 1e-12);
            prop_assert!((bb - (tr / 2.0 - disc)).abs() < 1e-12);
        }
    }
}
