//! Complex banded matrices with an unpivoted LU factorization.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Square matrix with `lower` sub- and `upper` super-diagonals stored row
/// by row: entry `(r, c)` lives at `r * width + (c + lower − r)`.
#[derive(Debug, Clone)]
pub struct BandedMatrix {
    pub n: usize,
    pub lower: usize,
    pub upper: usize,
    data: Vec<Complex64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        Self { n, lower, upper, data: vec![Complex64::new(0.0, 0.0); n * (lower + upper + 1)] }
    }

    pub fn width(&self) -> usize {
        self.lower + self.upper + 1
    }

    pub fn in_band(&self, r: usize, c: usize) -> bool {
        c + self.lower >= r && c <= r + self.upper && r < self.n && c < self.n
    }

    fn idx(&self, r: usize, c: usize) -> usize {
        r * self.width() + (c + self.lower - r)
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        if self.in_band(r, c) {
            self.data[self.idx(r, c)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// Adds `v` to entry `(r, c)`, which must lie in the band.
    pub fn add(&mut self, r: usize, c: usize, v: Complex64) {
        assert!(self.in_band(r, c), "entry ({r}, {c}) outside the band");
        let i = self.idx(r, c);
        self.data[i] += v;
    }

    /// Columns `[lo, hi)` that can be nonzero in row `r`.
    pub fn row_range(&self, r: usize) -> (usize, usize) {
        (r.saturating_sub(self.lower), (r + self.upper + 1).min(self.n))
    }

    /// `y = M x`.
    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        let w = self.width();
        for (r, yr) in y.iter_mut().enumerate().take(self.n) {
            let (lo, hi) = self.row_range(r);
            let row = &self.data[r * w..(r + 1) * w];
            let off = lo + self.lower - r;
            *yr = row[off..off + (hi - lo)].iter().zip(&x[lo..hi]).map(|(a, b)| a * b).sum();
        }
    }

    /// `I·α + β·M` as a new matrix.
    pub fn shifted(&self, alpha: Complex64, beta: Complex64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= beta);
        for r in 0..self.n {
            out.add(r, r, alpha);
        }
        out
    }

    /// `max |M − M^†|` over the band.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.n {
            let (lo, hi) = self.row_range(r);
            for c in lo..hi {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// In-place LU factorization without pivoting; valid when the
    /// Hermitian part of the matrix is positive definite.
    pub fn factor(mut self) -> Result<BandedLu> {
        let n = self.n;
        for k in 0..n {
            let pivot = self.get(k, k);
            if pivot.norm() < 1e-300 {
                return Err(Error::SolverBreakdown { row: k });
            }
            let rmax = (k + self.lower + 1).min(n);
            let cmax = (k + self.upper + 1).min(n);
            for r in k + 1..rmax {
                let ir = self.idx(r, k);
                let l = self.data[ir] / pivot;
                self.data[ir] = l;
                for c in k + 1..cmax {
                    let u = self.data[self.idx(k, c)];
                    let i = self.idx(r, c);
                    self.data[i] -= l * u;
                }
            }
        }
        Ok(BandedLu { m: self })
    }
}

/// Packed `L U` factors (unit lower triangle implicit).
#[derive(Debug, Clone)]
pub struct BandedLu {
    m: BandedMatrix,
}

impl BandedLu {
    /// Solves `M x = b` in place.
    pub fn solve(&self, b: &mut [Complex64]) {
        let m = &self.m;
        let n = m.n;
        let w = m.width();
        for r in 0..n {
            let lo = r.saturating_sub(m.lower);
            let row = &m.data[r * w..(r + 1) * w];
            let mut acc = b[r];
            for c in lo..r {
                acc -= row[c + m.lower - r] * b[c];
            }
            b[r] = acc;
        }
        for r in (0..n).rev() {
            let hi = (r + m.upper + 1).min(n);
            let row = &m.data[r * w..(r + 1) * w];
            let mut acc = b[r];
            for c in r + 1..hi {
                acc -= row[c + m.lower - r] * b[c];
            }
            b[r] = acc / row[m.lower];
        }
    }
}
