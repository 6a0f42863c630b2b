//! Born–Oppenheimer states in the outer regime and the inner state near
//! the crossing, sampled on the wave-field lattice.

use num_complex::Complex64;

use super::cutoff::cutoff;
use super::hagedorn::HagedornPacket;
use crate::angular::TwoLevelFrame;
use crate::classical::ClassicalState;
use crate::error::{Error, Result};
use crate::exact::{Grid, WaveField};
use crate::par::{self, Execution};

/// Nuclear part `F · φ_j · e^{iS/δ²}` of a Born–Oppenheimer state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoState {
    pub state: ClassicalState,
    pub index: usize,
    pub packet: HagedornPacket,
    pub delta: f64,
    pub delta_prime: f64,
}

impl BoState {
    /// Packet with `ħ = δ²` on `state`; `previous_sqrt` continues the branch
    /// of `A^{1/2}` from an earlier sample.
    pub fn new(
        state: &ClassicalState,
        index: usize,
        delta: f64,
        delta_prime: f64,
        previous_sqrt: Option<Complex64>,
    ) -> Result<Self> {
        let mut packet = HagedornPacket::new(state.a_mat, state.b_mat, delta * delta, state.a, state.eta)?;
        if let Some(p) = previous_sqrt {
            packet = packet.with_branch_near(p);
        }
        Ok(Self { state: *state, index, packet, delta, delta_prime })
    }

    /// Scalar amplitude at `x`.
    pub fn amplitude(&self, x: f64) -> Complex64 {
        let f = cutoff(x, self.state.a, self.delta, self.delta_prime);
        if f == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let phase = Complex64::from_polar(1.0, self.state.action / (self.delta * self.delta));
        self.packet.eval(self.index, x) * phase * f
    }

    /// `F φ_j e^{iS/δ²} e^{iλ} Φ_C` with `vectors[i] = Φ_C(x_i)` and optional
    /// transport phase `lambda[i]`, on the lattice of `template`.
    pub fn assemble(
        &self,
        vectors: &[Vec<Complex64>],
        lambda: Option<&[f64]>,
        template: &WaveField,
    ) -> Result<WaveField> {
        let grid = template.grid;
        if vectors.len() != grid.n || lambda.is_some_and(|l| l.len() != grid.n) {
            return Err(Error::InvalidParameters("angular data does not match the grid".into()));
        }
        let mut out = WaveField { t: self.state.t, ..template.clone() };
        let m = out.basis.count;
        for i in 0..grid.n {
            let x = grid.x(i);
            let mut amp = self.amplitude(x);
            if let Some(l) = lambda {
                amp *= Complex64::from_polar(1.0, l[i]);
            }
            let g = out.gauge(x) * amp;
            for k in 0..m {
                out.data[i * m + k] = vectors[i][k] * g;
            }
        }
        Ok(out)
    }
}

/// Born–Oppenheimer state of index `j` on the classical `state`.
#[allow(clippy::too_many_arguments)]
pub fn assemble_bo_state(
    state: &ClassicalState,
    j: usize,
    delta: f64,
    delta_prime: f64,
    vectors: &[Vec<Complex64>],
    lambda: Option<&[f64]>,
    template: &WaveField,
) -> Result<WaveField> {
    BoState::new(state, j, delta, delta_prime, None)?.assemble(vectors, lambda, template)
}

/// `(ψ₁(x_i), ψ₂(x_i))` on every grid point.
pub fn frame_on_grid(
    frame: &TwoLevelFrame,
    delta: f64,
    grid: &Grid,
    exec: Execution,
) -> Result<Vec<[Vec<Complex64>; 2]>> {
    par::try_map(exec, &grid.points(), |&x| {
        let (p1, p2, _, _) = frame.vectors(x, delta)?;
        Ok([p1, p2])
    })
}

/// `F(|y| δ^{δ′}) exp(iS/δ² + iηy/δ) (f₀(y)ψ₁ + g₀(y)ψ₂)` with
/// `y = (x − a)/δ`, from the mean classical data `mean`.
///
/// `amplitudes(y)` returns `(f₀, g₀)`; `inner_edge` is `δ^{1−ξ}`.
pub fn assemble_inner_state<F>(
    amplitudes: F,
    mean: &ClassicalState,
    frame: &[[Vec<Complex64>; 2]],
    delta: f64,
    delta_prime: f64,
    inner_edge: f64,
    template: &WaveField,
) -> Result<WaveField>
where
    F: Fn(f64) -> Result<[Complex64; 2]>,
{
    if mean.t.abs() > inner_edge {
        return Err(Error::RegimeViolation(format!(
            "inner state requested at t = {} outside |t| <= {inner_edge}",
            mean.t
        )));
    }
    let grid = template.grid;
    if frame.len() != grid.n {
        return Err(Error::InvalidParameters("frame does not match the grid".into()));
    }
    let mut out = WaveField { t: mean.t, ..template.clone() };
    let m = out.basis.count;
    let d2 = delta * delta;
    for i in 0..grid.n {
        let x = grid.x(i);
        let f = cutoff(x, mean.a, delta, delta_prime);
        if f == 0.0 {
            continue;
        }
        let y = (x - mean.a) / delta;
        let [f0, g0] = amplitudes(y)?;
        let g = out.gauge(x) * Complex64::from_polar(f, mean.action / d2 + mean.eta * y / delta);
        for k in 0..m {
            out.data[i * m + k] = (frame[i][0][k] * f0 + frame[i][1][k] * g0) * g;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::{FiberModel, Level, ModeBasis, Perturbation};
    use crate::exact::LevelProjector;
    use crate::surface::{ProfileShape, SurfaceProfile};
    use approx::assert_relative_eq;

    fn model() -> FiberModel {
        let p = SurfaceProfile::new(ProfileShape::TanhNeck { base: 1.0, amplitude: 0.4, width: 1.0 }, 1.0);
        FiberModel::new(p, Perturbation::transverse_field(0.9))
    }

    fn state(a: f64) -> ClassicalState {
        let one = Complex64::new(1.0, 0.0);
        ClassicalState::new(-0.3, a, 1.0, 0.1, one, Complex64::new(1.0, 0.4))
    }

    #[test]
    fn norm_is_one_up_to_cutoff_tail() {
        let delta = 0.05;
        let grid = Grid::covering(-1.0, 0.0, 0.001).unwrap();
        let basis = ModeBasis::new(0, 1);
        let template = WaveField::zeros(grid, basis, 0.0, delta, 20.0, 0.3);
        let vectors = vec![vec![Complex64::new(1.0, 0.0)]; grid.n];
        let s = state(-0.5);
        let f = assemble_bo_state(&s, 0, delta, 0.2, &vectors, None, &template).unwrap();
        let bare: f64 = grid
            .points()
            .iter()
            .map(|&x| BoState::new(&s, 0, delta, 0.2, None).unwrap().packet.eval(0, x).norm_sqr())
            .sum::<f64>()
            * grid.dx;
        assert_relative_eq!(bare, 1.0, epsilon = 1e-10);
        let n = f.norm_sqr();
        assert!(n < 1.0 && n > 0.99, "{n}");
        assert_eq!(f.t, s.t);
    }

    #[test]
    fn far_from_crossing_state_lies_on_its_level() {
        let delta = 0.05;
        let grid = Grid::covering(-0.9, -0.3, 0.002).unwrap();
        let basis = ModeBasis::around(0, -1, 8);
        let proj = LevelProjector::new(&model(), delta, grid, basis, (0, -1), Execution::Sequential).unwrap();
        let template = WaveField::zeros(grid, basis, 0.0, delta, 0.0, 0.0);
        for (c, level) in [(0usize, Level::A), (1, Level::B)] {
            let vectors: Vec<Vec<Complex64>> = proj.vectors.iter().map(|v| v[c].clone()).collect();
            let f = assemble_bo_state(&state(-0.6), 1, delta, 0.2, &vectors, None, &template).unwrap();
            let (pa, pb) = proj.populations(&f);
            let n = f.norm_sqr();
            let (own, other) = if level == Level::A { (pa, pb) } else { (pb, pa) };
            assert_relative_eq!(own, n, epsilon = 1e-12);
            assert!(other < 1e-12);
        }
    }

    #[test]
    fn frozen_inner_state_is_a_pure_first_component_packet() {
        let delta = 0.05;
        let grid = Grid::covering(-0.3, 0.3, 0.001).unwrap();
        let basis = ModeBasis::around(0, -1, 8);
        let frame = TwoLevelFrame::new(model(), (0, -1), basis).unwrap();
        let vecs = frame_on_grid(&frame, delta, &grid, Execution::Sequential).unwrap();
        let template = WaveField::zeros(grid, basis, 0.0, delta, 0.0, 0.0);
        let mean = ClassicalState::new(0.0, 0.0, 1.0, 0.0, Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
        let gauss = |y: f64| Complex64::new((-y * y / 2.0).exp() * std::f64::consts::PI.powf(-0.25), 0.0);
        let f = assemble_inner_state(
            |y| Ok([gauss(y), Complex64::new(0.0, 0.0)]),
            &mean,
            &vecs,
            delta,
            0.2,
            0.12,
            &template,
        )
        .unwrap();
        let mut on_second = 0.0;
        for i in 0..grid.n {
            let amp: Complex64 = vecs[i][1].iter().zip(f.column(i)).map(|(a, b)| a.conj() * b).sum();
            on_second += amp.norm_sqr();
        }
        assert!(on_second < 1e-20);
        // ∫|f₀((x − a)/δ)|² dx = δ ‖f₀‖², less the cutoff tail.
        let n = f.norm_sqr() / delta;
        assert!(n < 1.0 && n > 0.99, "{n}");
    }

    #[test]
    fn inner_state_outside_window_is_rejected() {
        let grid = Grid::covering(-0.3, 0.3, 0.01).unwrap();
        let basis = ModeBasis::new(0, 2);
        let template = WaveField::zeros(grid, basis, 0.0, 0.05, 0.0, 0.0);
        let mean = ClassicalState::new(0.5, 0.0, 1.0, 0.0, Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
        let e = assemble_inner_state(|_| Ok([Complex64::new(1.0, 0.0); 2]), &mean, &[], 0.05, 0.2, 0.12, &template)
            .unwrap_err();
        assert!(matches!(e, Error::RegimeViolation(_)));
    }
}
