//! Axial grid and wave fields on the grid × angular-mode lattice.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angular::ModeBasis;
use crate::error::{Error, Result};

/// Uniform grid `x_i = x0 + i dx`, `i < n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x0: f64,
    pub dx: f64,
    pub n: usize,
}

impl Grid {
    /// Grid on `[x0, x1]` with spacing at most `dx`.
    pub fn covering(x0: f64, x1: f64, dx: f64) -> Result<Self> {
        if !(x1 > x0) || !(dx > 0.0) {
            return Err(Error::InvalidParameters(format!("bad grid [{x0}, {x1}] with dx = {dx}")));
        }
        let n = ((x1 - x0) / dx).ceil() as usize + 1;
        Ok(Self { x0, dx: (x1 - x0) / (n - 1) as f64, n })
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    pub fn end(&self) -> f64 {
        self.x(self.n - 1)
    }

    /// Same extent with half the spacing.
    pub fn refined(&self) -> Self {
        Self { x0: self.x0, dx: self.dx / 2.0, n: 2 * self.n - 1 }
    }
}

/// `ψ(x_i, n)` stored x-major (`i * modes + k`) in the carrier gauge:
/// the physical wavefunction is `e^{i k₀ x} e^{−i E₀ t/δ²} u(x, n)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WaveField {
    pub grid: Grid,
    pub basis: ModeBasis,
    pub t: f64,
    pub delta: f64,
    pub carrier: f64,
    pub energy_shift: f64,
    pub data: Vec<Complex64>,
}

impl WaveField {
    pub fn zeros(grid: Grid, basis: ModeBasis, t: f64, delta: f64, carrier: f64, energy_shift: f64) -> Self {
        let data = vec![Complex64::new(0.0, 0.0); grid.n * basis.count];
        Self { grid, basis, t, delta, carrier, energy_shift, data }
    }

    /// Gauge factor `u = factor · ψ` at `(x, t)`.
    pub fn gauge(&self, x: f64) -> Complex64 {
        Complex64::from_polar(1.0, -self.carrier * x + self.energy_shift * self.t / (self.delta * self.delta))
    }

    /// Fills the field from physical amplitudes `f(x) ∈ ℂ^modes`.
    pub fn fill<F: Fn(f64) -> Result<Vec<Complex64>>>(&mut self, f: F) -> Result<()> {
        let m = self.basis.count;
        for i in 0..self.grid.n {
            let x = self.grid.x(i);
            let v = f(x)?;
            if v.len() != m {
                return Err(Error::InvalidParameters("mode vector has the wrong length".into()));
            }
            let g = self.gauge(x);
            for k in 0..m {
                self.data[i * m + k] = v[k] * g;
            }
        }
        Ok(())
    }

    pub fn column(&self, i: usize) -> &[Complex64] {
        let m = self.basis.count;
        &self.data[i * m..(i + 1) * m]
    }

    /// Physical amplitudes at grid point `i`.
    pub fn physical_column(&self, i: usize) -> Vec<Complex64> {
        let g = self.gauge(self.grid.x(i)).conj();
        self.column(i).iter().map(|v| v * g).collect()
    }

    /// `⟨self, other⟩` (both fields must share grid and gauge).
    pub fn inner(&self, other: &WaveField) -> Complex64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum::<Complex64>() * self.grid.dx
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|v| *v *= s);
    }

    /// Population of every mode in the basis.
    pub fn mode_populations(&self) -> Vec<f64> {
        let m = self.basis.count;
        let mut out = vec![0.0; m];
        for (j, v) in self.data.iter().enumerate() {
            out[j % m] += v.norm_sqr() * self.grid.dx;
        }
        out
    }

    /// Fraction of the norm in the outermost tenth of the mode band.
    pub fn mode_tail_mass(&self) -> f64 {
        let pops = self.mode_populations();
        let band = (self.basis.count / 10).max(1);
        let total: f64 = pops.iter().sum();
        let tail: f64 = pops[..band].iter().chain(&pops[pops.len() - band..]).sum();
        if total > 0.0 {
            tail / total
        } else {
            0.0
        }
    }

    /// Position density `Σₙ |ψ(x_i, n)|²`.
    pub fn density(&self) -> Vec<f64> {
        (0..self.grid.n).map(|i| self.column(i).iter().map(|v| v.norm_sqr()).sum()).collect()
    }

    /// Writes `<stem>.bin` (little-endian `f64` pairs, x-major) and
    /// `<stem>.json` with the grid, gauge and any extra metadata.
    pub fn write_snapshot(&self, dir: &Path, stem: &str, extra: serde_json::Value) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut bytes = Vec::with_capacity(self.data.len() * 16);
        for v in &self.data {
            bytes.extend_from_slice(&v.re.to_le_bytes());
            bytes.extend_from_slice(&v.im.to_le_bytes());
        }
        fs::File::create(dir.join(format!("{stem}.bin")))?.write_all(&bytes)?;
        let meta = serde_json::json!({
            "layout": "x-major complex128 little-endian, index = i * modes + k",
            "grid": self.grid,
            "modes": { "first": self.basis.first, "count": self.basis.count },
            "t": self.t,
            "delta": self.delta,
            "carrier": self.carrier,
            "energy_shift": self.energy_shift,
            "norm": self.norm(),
            "extra": extra,
        });
        fs::write(dir.join(format!("{stem}.json")), serde_json::to_string_pretty(&meta)?)?;
        Ok(())
    }

    /// Reads a snapshot written by [`WaveField::write_snapshot`].
    pub fn read_snapshot(dir: &Path, stem: &str) -> Result<Self> {
        let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join(format!("{stem}.json")))?)?;
        let grid: Grid = serde_json::from_value(meta["grid"].clone())?;
        let basis = ModeBasis::new(
            meta["modes"]["first"].as_i64().unwrap_or(0),
            meta["modes"]["count"].as_u64().unwrap_or(0) as usize,
        );
        let num = |k: &str| meta[k].as_f64().unwrap_or(0.0);
        let bytes = fs::read(dir.join(format!("{stem}.bin")))?;
        if bytes.len() != grid.n * basis.count * 16 {
            return Err(Error::Config(format!("snapshot {stem} has {} bytes", bytes.len())));
        }
        let data = bytes
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
                let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
                Complex64::new(re, im)
            })
            .collect();
        Ok(Self {
            grid,
            basis,
            t: num("t"),
            delta: num("delta"),
            carrier: num("carrier"),
            energy_shift: num("energy_shift"),
            data,
        })
    }
}
