//! The fiber operator `g(x, δ) = h(R(x)) + V₂(x, δ) + δW(x, θ)` on a
//! truncated lattice of angular modes.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::coupling::Perturbation;
use super::spectrum::{eigenvalue, eigenvalue_dr};
use crate::error::{Error, Result};
use crate::surface::SurfaceProfile;

/// The two adiabatic levels at an avoided crossing: `A` above, `B` below.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Level {
    A,
    B,
}

impl Level {
    /// `+1` for the upper level, `−1` for the lower one.
    pub fn sign(self) -> f64 {
        match self {
            Level::A => 1.0,
            Level::B => -1.0,
        }
    }

    pub fn other(self) -> Level {
        match self {
            Level::A => Level::B,
            Level::B => Level::A,
        }
    }

    pub fn parse(tag: &str) -> Result<Level> {
        match tag {
            "A" | "a" => Ok(Level::A),
            "B" | "b" => Ok(Level::B),
            other => Err(Error::InvalidLevel(other.to_string())),
        }
    }
}

/// Consecutive angular modes `n = first, …, first + count − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeBasis {
    pub first: i64,
    pub count: usize,
}

impl ModeBasis {
    pub fn new(first: i64, count: usize) -> Self {
        Self { first, count }
    }

    /// `count` modes centred on the pair `(n, m)`.
    pub fn around(n: i64, m: i64, count: usize) -> Self {
        let lo = n.min(m);
        let hi = n.max(m);
        let span = (hi - lo + 1) as usize;
        let extra = count.saturating_sub(span);
        let first = lo - (extra / 2) as i64;
        Self { first, count: count.max(span) }
    }

    pub fn mode(&self, k: usize) -> i64 {
        self.first + k as i64
    }

    pub fn index(&self, n: i64) -> Option<usize> {
        let k = n - self.first;
        (k >= 0 && (k as usize) < self.count).then_some(k as usize)
    }

    pub fn modes(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.count).map(|k| self.mode(k))
    }
}

/// Eigen-decomposition of the truncated fiber matrix, ascending.
#[derive(Debug, Clone)]
pub struct FiberEigen {
    pub values: Vec<f64>,
    /// Column `j` is the eigenvector of `values[j]`.
    pub vectors: DMatrix<Complex64>,
}

impl FiberEigen {
    /// Indices `(upper, lower)` of the two eigenvectors with the largest
    /// weight on the diabatic modes `n` and `m`.
    pub fn pair_indices(&self, basis: &ModeBasis, n: i64, m: i64) -> Result<(usize, usize)> {
        let kn = basis.index(n).ok_or_else(|| Error::InvalidParameters(format!("mode {n} outside basis")))?;
        let km = basis.index(m).ok_or_else(|| Error::InvalidParameters(format!("mode {m} outside basis")))?;
        let mut w: Vec<(usize, f64)> = (0..self.values.len())
            .map(|j| {
                let v = self.vectors.column(j);
                (j, v[kn].norm_sqr() + v[km].norm_sqr())
            })
            .collect();
        w.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let (i, j) = (w[0].0, w[1].0);
        Ok(if self.values[i] >= self.values[j] { (i, j) } else { (j, i) })
    }

    pub fn vector(&self, j: usize) -> Vec<Complex64> {
        self.vectors.column(j).iter().copied().collect()
    }
}

/// Rotates `v` so that component `k` is real and nonnegative.
pub fn fix_gauge(v: &mut [Complex64], k: usize) {
    let c = v[k];
    if c.norm() > 0.0 {
        let ph = c.conj() / c.norm();
        v.iter_mut().for_each(|z| *z *= ph);
    }
}

/// Surface plus coupling: everything needed to build `g(x, δ)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiberModel {
    pub profile: SurfaceProfile,
    pub coupling: Perturbation,
}

impl FiberModel {
    pub fn new(profile: SurfaceProfile, coupling: Perturbation) -> Self {
        Self { profile, coupling }
    }

    pub fn magnetic_field(&self) -> f64 {
        self.profile.magnetic_field
    }

    /// `λₙ(R(x))`.
    pub fn level(&self, n: i64, x: f64) -> Result<f64> {
        eigenvalue(n, self.profile.radius(x)?, self.magnetic_field())
    }

    /// `d λₙ(R(x)) / dx`.
    pub fn level_dx(&self, n: i64, x: f64) -> Result<f64> {
        let d = self.profile.derivs(x)?;
        Ok(eigenvalue_dr(n, d.r, self.magnetic_field())? * d.d1)
    }

    /// Diagonal entry `λₙ(R(x)) + V₂(x, δ)`.
    pub fn diagonal(&self, n: i64, x: f64, delta: f64) -> Result<f64> {
        let d = self.profile.derivs_at(x, delta)?;
        Ok(eigenvalue(n, d.r, self.magnetic_field())? + self.profile.v2(x, delta)?)
    }

    /// `⟨φₙ, W(x) φₘ⟩`.
    pub fn coupling(&self, n: i64, m: i64, x: f64) -> Result<Complex64> {
        Ok(self.coupling.element(self.profile.radius(x)?, n, m))
    }

    /// Matrix of `g(x, δ)` on the mode basis.
    pub fn matrix(&self, x: f64, delta: f64, basis: &ModeBasis) -> Result<DMatrix<Complex64>> {
        let d = self.profile.derivs_at(x, delta)?;
        let v2 = self.profile.v2(x, delta)?;
        let b = self.magnetic_field();
        let bw = self.coupling.bandwidth();
        let mut g = DMatrix::<Complex64>::zeros(basis.count, basis.count);
        for i in 0..basis.count {
            let n = basis.mode(i);
            g[(i, i)] = Complex64::new(eigenvalue(n, d.r, b)? + v2, 0.0);
            if delta != 0.0 {
                let lo = i.saturating_sub(bw);
                let hi = (i + bw + 1).min(basis.count);
                for j in lo..hi {
                    if j != i {
                        g[(i, j)] += self.coupling.element(d.r, n, basis.mode(j)) * delta;
                    }
                }
            }
        }
        Ok(g)
    }

    /// Dense Hermitian diagonalization of `g(x, δ)`.
    pub fn eigen(&self, x: f64, delta: f64, basis: &ModeBasis) -> Result<FiberEigen> {
        let g = self.matrix(x, delta, basis)?;
        let se = SymmetricEigen::new(g);
        let mut order: Vec<usize> = (0..basis.count).collect();
        order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
        let values = order.iter().map(|&j| se.eigenvalues[j]).collect();
        let vectors = DMatrix::from_fn(basis.count, basis.count, |r, c| se.eigenvectors[(r, order[c])]);
        Ok(FiberEigen { values, vectors })
    }

    /// Exact adiabatic level `μ_C(x, δ)` and its eigenvector, with the
    /// component on `gauge_mode` made real and positive.
    pub fn adiabatic(
        &self,
        x: f64,
        delta: f64,
        basis: &ModeBasis,
        pair: (i64, i64),
        level: Level,
        gauge_mode: i64,
    ) -> Result<(f64, Vec<Complex64>)> {
        let e = self.eigen(x, delta, basis)?;
        let (up, lo) = e.pair_indices(basis, pair.0, pair.1)?;
        let j = match level {
            Level::A => up,
            Level::B => lo,
        };
        let mut v = e.vector(j);
        let k = basis
            .index(gauge_mode)
            .ok_or_else(|| Error::InvalidParameters(format!("gauge mode {gauge_mode} outside basis")))?;
        fix_gauge(&mut v, k);
        Ok((e.values[j], v))
    }
}
