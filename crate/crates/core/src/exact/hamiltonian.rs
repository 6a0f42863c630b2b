//! Discretization of `H(δ) = −(δ⁴/2)∂ₓ(1 + δ⁴V₁)^{−1}∂ₓ + g(x, δ)` on the
//! grid × mode lattice.

use num_complex::Complex64;

use super::banded::BandedMatrix;
use super::grid::{Grid, WaveField};
use crate::angular::{FiberModel, ModeBasis};
use crate::error::{Error, Result};
use crate::par::{self, Execution};

/// Minimal number of grid points per envelope wavelength.
pub const MIN_POINTS_PER_WAVELENGTH: f64 = 12.0;

/// Assembled operator in the carrier gauge, shifted by `E₀`.
#[derive(Debug, Clone)]
pub struct DiscreteHamiltonian {
    pub matrix: BandedMatrix,
    pub grid: Grid,
    pub basis: ModeBasis,
    pub delta: f64,
    pub carrier: f64,
    pub energy_shift: f64,
}

/// Gauge, shift and resolution settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyOptions {
    /// Carrier wavenumber `k₀`.
    pub carrier: f64,
    /// Energy shift `E₀`.
    pub energy_shift: f64,
    /// Range of physical momenta the field is expected to carry.
    pub momentum_range: Option<(f64, f64)>,
    /// Keep the `δ⁴V₁` term in the kinetic coefficient.
    pub include_metric: bool,
    pub execution: Execution,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        Self {
            carrier: 0.0,
            energy_shift: 0.0,
            momentum_range: None,
            include_metric: true,
            execution: Execution::default(),
        }
    }
}

/// Adds `weight · (δ⁴/2) a |(∂ + ik₀)u|²` on links of length `stride·dx`
/// between points `l` and `l + stride`, for every mode.
#[allow(clippy::too_many_arguments)]
fn add_kinetic(
    m: &mut BandedMatrix,
    grid: &Grid,
    modes: usize,
    delta: f64,
    k0: f64,
    coeff: &[f64],
    stride: usize,
    weight: f64,
) {
    let d4 = delta.powi(4);
    let h = grid.dx * stride as f64;
    let inv = 1.0 / h;
    let q = Complex64::new(inv, -k0 / 2.0);
    let diag = inv * inv + k0 * k0 / 4.0;
    for (l, &a) in coeff.iter().enumerate() {
        let w = 0.5 * d4 * a * weight;
        let off = -q * q * w;
        for k in 0..modes {
            let (r0, r1) = (l * modes + k, (l + stride) * modes + k);
            m.add(r0, r0, Complex64::new(w * diag, 0.0));
            m.add(r1, r1, Complex64::new(w * diag, 0.0));
            m.add(r1, r0, off);
            m.add(r0, r1, off.conj());
        }
    }
}

/// Link coefficients `1/(1 + δ⁴V₁)` at the link midpoints, minus `shift`.
fn link_coefficients(
    model: &FiberModel,
    grid: &Grid,
    delta: f64,
    metric: bool,
    stride: usize,
    shift: f64,
) -> Result<Vec<f64>> {
    let d4 = delta.powi(4);
    if grid.n <= stride {
        return Ok(Vec::new());
    }
    (0..grid.n - stride)
        .map(|l| {
            if metric {
                let xm = grid.x(l) + 0.5 * stride as f64 * grid.dx;
                Ok(1.0 / (1.0 + d4 * model.profile.v1(xm, delta)?) - shift)
            } else {
                Ok(1.0 - shift)
            }
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
/// Fourth-order kinetic term: `(4/3)K(dx) − (1/3)K(2dx)`.
fn assemble_kinetic(
    m: &mut BandedMatrix,
    model: &FiberModel,
    grid: &Grid,
    modes: usize,
    delta: f64,
    k0: f64,
    metric: bool,
    shift: f64,
) -> Result<()> {
    for (stride, weight) in [(1usize, 4.0 / 3.0), (2usize, -1.0 / 3.0)] {
        let coeff = link_coefficients(model, grid, delta, metric, stride, shift)?;
        add_kinetic(m, grid, modes, delta, k0, &coeff, stride, weight);
    }
    Ok(())
}

/// Assembles the full operator; fails with `GridTooCoarse` if the
/// envelope is sampled with fewer than twelve points per wavelength.
pub fn build_hamiltonian(
    model: &FiberModel,
    delta: f64,
    grid: Grid,
    basis: ModeBasis,
    opts: &AssemblyOptions,
) -> Result<DiscreteHamiltonian> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameters(format!("delta must be positive, got {delta}")));
    }
    if let Some((lo, hi)) = opts.momentum_range {
        let hbar = delta * delta;
        let kmax = (lo - opts.carrier * hbar).abs().max((hi - opts.carrier * hbar).abs()) / hbar;
        if kmax > 0.0 {
            let ppw = 2.0 * std::f64::consts::PI / (kmax * grid.dx);
            if ppw < MIN_POINTS_PER_WAVELENGTH {
                return Err(Error::GridTooCoarse(format!(
                    "{ppw:.1} points per envelope wavelength at dx = {:.3e}",
                    grid.dx
                )));
            }
        }
    }
    let m = basis.count;
    let mut h = BandedMatrix::zeros(grid.n * m, 2 * m, 2 * m);
    let blocks = par::try_map(opts.execution, &grid.points(), |&x| model.matrix(x, delta, &basis))?;
    for (i, g) in blocks.iter().enumerate() {
        for r in 0..m {
            for c in 0..m {
                let v = g[(r, c)];
                if v.norm() != 0.0 {
                    h.add(i * m + r, i * m + c, v);
                }
            }
            h.add(i * m + r, i * m + r, Complex64::new(-opts.energy_shift, 0.0));
        }
    }
    assemble_kinetic(&mut h, model, &grid, m, delta, opts.carrier, opts.include_metric, 0.0)?;
    Ok(DiscreteHamiltonian { matrix: h, grid, basis, delta, carrier: opts.carrier, energy_shift: opts.energy_shift })
}

/// The discrete `R(x, ∂ₓ, δ)`: full kinetic term minus `−(δ⁴/2)∂ₓ²`.
pub fn metric_correction(
    model: &FiberModel,
    delta: f64,
    grid: Grid,
    basis: ModeBasis,
    carrier: f64,
) -> Result<BandedMatrix> {
    let m = basis.count;
    let mut h = BandedMatrix::zeros(grid.n * m, 2 * m, 2 * m);
    assemble_kinetic(&mut h, model, &grid, m, delta, carrier, true, 1.0)?;
    Ok(h)
}

impl DiscreteHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.n
    }

    /// `H u` on raw data.
    pub fn apply(&self, u: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); u.len()];
        self.matrix.matvec(u, &mut out);
        out
    }

    /// `⟨u, H u⟩` including the grid measure.
    pub fn expectation(&self, field: &WaveField) -> f64 {
        let hu = self.apply(&field.data);
        field.data.iter().zip(&hu).map(|(a, b)| (a.conj() * b).re).sum::<f64>() * self.grid.dx
    }

    /// Largest `|⟨φ, Hψ⟩ − ⟨Hφ, ψ⟩|` over pseudo-random vector pairs.
    pub fn hermiticity_check(&self, pairs: usize, seed: u64) -> f64 {
        let n = self.dim();
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let mut worst = 0.0f64;
        for _ in 0..pairs {
            let phi: Vec<Complex64> = (0..n).map(|_| Complex64::new(next(), next())).collect();
            let psi: Vec<Complex64> = (0..n).map(|_| Complex64::new(next(), next())).collect();
            let hphi = self.apply(&phi);
            let hpsi = self.apply(&psi);
            let a: Complex64 = phi.iter().zip(&hpsi).map(|(x, y)| x.conj() * y).sum();
            let b: Complex64 = hphi.iter().zip(&psi).map(|(x, y)| x.conj() * y).sum();
            let scale = phi.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
                * psi.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
                * self.operator_scale();
            worst = worst.max((a - b).norm() / scale);
        }
        worst
    }

    /// Largest absolute matrix entry.
    pub fn operator_scale(&self) -> f64 {
        let mut s = 0.0f64;
        for r in 0..self.dim() {
            let (lo, hi) = self.matrix.row_range(r);
            for c in lo..hi {
                s = s.max(self.matrix.get(r, c).norm());
            }
        }
        s.max(f64::MIN_POSITIVE)
    }
}
