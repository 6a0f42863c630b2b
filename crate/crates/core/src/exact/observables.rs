//! Level populations, overlaps and residual norms on wave fields.

use num_complex::Complex64;

use super::banded::BandedMatrix;
use super::grid::WaveField;
use super::hamiltonian::DiscreteHamiltonian;
use crate::angular::{fix_gauge, FiberModel, ModeBasis};
use crate::error::{Error, Result};
use crate::exact::grid::Grid;
use crate::par::{self, Execution};

/// Exact adiabatic eigenvectors `Φ_A(x_i, δ)`, `Φ_B(x_i, δ)` of the crossing
/// pair on every grid point, with the component on the first mode of the
/// pair real and positive.
#[derive(Debug, Clone)]
pub struct LevelProjector {
    pub grid: Grid,
    pub basis: ModeBasis,
    /// `vectors[i] = [Φ_A, Φ_B]` at `x_i`.
    pub vectors: Vec<[Vec<Complex64>; 2]>,
    /// `values[i] = [μ_A, μ_B]`.
    pub values: Vec<[f64; 2]>,
}

impl LevelProjector {
    pub fn new(
        model: &FiberModel,
        delta: f64,
        grid: Grid,
        basis: ModeBasis,
        pair: (i64, i64),
        exec: Execution,
    ) -> Result<Self> {
        let ka = basis.index(pair.0).ok_or_else(|| Error::InvalidParameters("pair outside the mode basis".into()))?;
        if basis.index(pair.1).is_none() {
            return Err(Error::InvalidParameters("pair outside the mode basis".into()));
        }
        let rows = par::try_map(exec, &grid.points(), |&x| -> Result<([Vec<Complex64>; 2], [f64; 2])> {
            let e = model.eigen(x, delta, &basis)?;
            let (up, lo) = e.pair_indices(&basis, pair.0, pair.1)?;
            let mut va = e.vector(up);
            let mut vb = e.vector(lo);
            fix_gauge(&mut va, ka);
            fix_gauge(&mut vb, ka);
            Ok(([va, vb], [e.values[up], e.values[lo]]))
        })?;
        let (vectors, values) = rows.into_iter().unzip();
        Ok(Self { grid, basis, vectors, values })
    }

    /// `Φ_C(x_i)` for every grid point (`C = A` is column 0).
    pub fn level_vectors(&self, column: usize) -> Vec<Vec<Complex64>> {
        self.vectors.iter().map(|v| v[column].clone()).collect()
    }

    /// `⟨Φ_C, ∂ₓΦ_C⟩` at the grid points by differences of the samples,
    /// keeping the imaginary part (exact for unit vectors).
    pub fn connection(&self, column: usize) -> Vec<Complex64> {
        let n = self.grid.n;
        let dot = |i: usize, j: usize| -> Complex64 {
            self.vectors[i][column].iter().zip(&self.vectors[j][column]).map(|(a, b)| a.conj() * b).sum()
        };
        (0..n)
            .map(|i| {
                let (lo, hi) = (i.saturating_sub(1), (i + 1).min(n - 1));
                let d = (dot(i, hi) - dot(i, lo)) / ((hi - lo) as f64 * self.grid.dx);
                Complex64::new(0.0, d.im)
            })
            .collect()
    }

    /// `(P_A, P_B)` of the field.
    pub fn populations(&self, field: &WaveField) -> (f64, f64) {
        let mut p = [0.0; 2];
        for i in 0..self.grid.n {
            let col = field.column(i);
            for (c, v) in self.vectors[i].iter().enumerate() {
                let amp: Complex64 = v.iter().zip(col).map(|(a, b)| a.conj() * b).sum();
                p[c] += amp.norm_sqr() * self.grid.dx;
            }
        }
        (p[0], p[1])
    }
}

/// `|⟨a, b⟩|` for fields on the same grid and gauge.
pub fn overlap(a: &WaveField, b: &WaveField) -> Result<f64> {
    if a.grid != b.grid || a.basis != b.basis || a.carrier != b.carrier {
        return Err(Error::InvalidParameters("fields live on different lattices".into()));
    }
    let phase = Complex64::from_polar(1.0, (a.energy_shift * a.t - b.energy_shift * b.t) / (a.delta * a.delta));
    Ok((a.inner(b) * phase).norm())
}

/// `‖iδ²∂ₜu − H u‖` at the middle of three equally spaced snapshots, with a
/// centered difference for the time derivative.
pub fn residual_norm(h: &DiscreteHamiltonian, prev: &WaveField, cur: &WaveField, next: &WaveField) -> f64 {
    let dt = 0.5 * (next.t - prev.t);
    let d2 = h.delta * h.delta;
    let hu = h.apply(&cur.data);
    let i = Complex64::i();
    let s: f64 =
        (0..cur.data.len()).map(|j| (i * d2 * (next.data[j] - prev.data[j]) / (2.0 * dt) - hu[j]).norm_sqr()).sum();
    (s * h.grid.dx).sqrt()
}

/// `‖R u‖` for the discrete metric correction `R`.
pub fn operator_norm_on(r: &BandedMatrix, field: &WaveField) -> f64 {
    let mut out = vec![Complex64::new(0.0, 0.0); field.data.len()];
    r.matvec(&field.data, &mut out);
    (out.iter().map(|v| v.norm_sqr()).sum::<f64>() * field.grid.dx).sqrt()
}

/// `ħ^{−1} ∫ μ dt` by the trapezoid rule.
pub fn integrated_bound(times: &[f64], residuals: &[f64], hbar: f64) -> f64 {
    times.windows(2).zip(residuals.windows(2)).map(|(t, r)| 0.5 * (t[1] - t[0]).abs() * (r[0] + r[1])).sum::<f64>()
        / hbar
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    num / den
}
