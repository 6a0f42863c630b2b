//! Scenario configuration read from TOML.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angular::{crossing, FiberModel, FourierTerm, Harmonic, ModeBasis, Perturbation, TwoLevelFrame};
use crate::classical::RegimeExponents;
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::surface::{ProfileShape, SurfaceProfile};

/// The symmetry-breaking perturbation, optionally rescaled so that the
/// crossing has a prescribed Landau–Zener ratio `r/η⁰`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSpec {
    #[serde(default = "default_terms")]
    pub terms: Vec<FourierTerm>,
    /// Target `r/η⁰`; when set, all amplitudes are scaled by one factor.
    #[serde(default)]
    pub lz_ratio: Option<f64>,
}

fn default_terms() -> Vec<FourierTerm> {
    vec![FourierTerm { order: 1, kind: Harmonic::Sin, amplitude: 1.0, radius_power: 1 }]
}

impl Default for CouplingSpec {
    fn default() -> Self {
        Self { terms: default_terms(), lz_ratio: Some(1.0) }
    }
}

/// Incoming packet at the crossing: index `j`, `A(0)`, `B(0)` and the
/// constant action phase `S₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketSpec {
    #[serde(default)]
    pub index: usize,
    #[serde(default = "unit")]
    pub a0: [f64; 2],
    #[serde(default = "unit")]
    pub b0: [f64; 2],
    #[serde(default)]
    pub s0_phase: f64,
}

fn unit() -> [f64; 2] {
    [1.0, 0.0]
}

impl Default for PacketSpec {
    fn default() -> Self {
        Self { index: 0, a0: unit(), b0: unit(), s0_phase: 0.0 }
    }
}

impl PacketSpec {
    pub fn a_mat(&self) -> Complex64 {
        Complex64::new(self.a0[0], self.a0[1])
    }

    pub fn b_mat(&self) -> Complex64 {
        Complex64::new(self.b0[0], self.b0[1])
    }
}

/// Discretization controls; the `*_scale` factors shrink (< 1) or grow the
/// automatically chosen steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Resolution {
    /// Angular modes kept around the pair.
    #[serde(default = "default_modes")]
    pub modes: usize,
    /// Upper bound when doubling the mode count on a failed tail test.
    #[serde(default = "default_max_modes")]
    pub max_modes: usize,
    /// Grid points per shortest envelope wavelength.
    #[serde(default = "default_ppw")]
    pub points_per_wavelength: f64,
    /// Largest `ω dt` for the fastest resolved envelope frequency.
    #[serde(default = "default_phase_step")]
    pub phase_per_step: f64,
    #[serde(default = "one")]
    pub dx_scale: f64,
    #[serde(default = "one")]
    pub dt_scale: f64,
    /// Observation cadence in time steps (0 chooses about 200 samples).
    #[serde(default)]
    pub observe_every: usize,
    /// Modes beyond the pair in the second-order resolvent sums.
    #[serde(default = "default_truncation")]
    pub truncation: usize,
}

fn default_modes() -> usize {
    16
}
fn default_max_modes() -> usize {
    128
}
fn default_ppw() -> f64 {
    24.0
}
fn default_phase_step() -> f64 {
    0.2
}
fn one() -> f64 {
    1.0
}
fn default_truncation() -> usize {
    12
}

impl Default for Resolution {
    fn default() -> Self {
        Self {
            modes: default_modes(),
            max_modes: default_max_modes(),
            points_per_wavelength: default_ppw(),
            phase_per_step: default_phase_step(),
            dx_scale: 1.0,
            dt_scale: 1.0,
            observe_every: 0,
            truncation: default_truncation(),
        }
    }
}

/// Everything that defines a crossing experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_name")]
    pub name: String,
    /// Profile preset; rescaled so that `R(0) = R_{n,m}`.
    #[serde(default = "default_surface")]
    pub surface: ProfileShape,
    #[serde(default = "one")]
    pub magnetic_field: f64,
    /// Crossing pair `(n, m)`, `n + m < 0`; the packet comes in on mode `n`.
    #[serde(default = "default_pair")]
    pub pair: (i64, i64),
    /// Momentum `η⁰` of the mean trajectory at the crossing.
    #[serde(default = "one")]
    pub momentum: f64,
    #[serde(default)]
    pub coupling: CouplingSpec,
    #[serde(default)]
    pub packet: PacketSpec,
    #[serde(default = "default_deltas")]
    pub deltas: Vec<f64>,
    #[serde(default)]
    pub exponents: RegimeExponents,
    #[serde(default)]
    pub resolution: Resolution,
    #[serde(default = "default_parallel")]
    pub parallel: bool,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_name() -> String {
    "crossing".into()
}
fn default_surface() -> ProfileShape {
    ProfileShape::TanhNeck { base: 1.0, amplitude: 0.4, width: 1.0 }
}
fn default_pair() -> (i64, i64) {
    (0, -1)
}
fn default_deltas() -> Vec<f64> {
    vec![0.05]
}
fn default_parallel() -> bool {
    true
}

impl Default for Scenario {
    fn default() -> Self {
        toml::from_str("").expect("empty scenario uses defaults")
    }
}

/// A scenario resolved into the objects the experiment works with.
#[derive(Debug, Clone)]
pub struct Calibrated {
    pub model: FiberModel,
    /// Amplitude factor applied to the configured coupling terms.
    pub coupling_scale: f64,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        crossing(self.pair.0, self.pair.1, self.magnetic_field)?;
        if !(self.momentum > 0.0) {
            return bad(format!("momentum must be positive, got {}", self.momentum));
        }
        if self.deltas.is_empty() || self.deltas.iter().any(|d| !(*d > 0.0 && *d < 1.0)) {
            return bad("deltas must be a nonempty list in (0, 1)".into());
        }
        if let Some(k) = self.coupling.lz_ratio {
            if !(k > 0.0) {
                return bad(format!("lz_ratio must be positive, got {k}"));
            }
            if self.coupling.terms.iter().all(|t| t.amplitude == 0.0) {
                return bad("lz_ratio needs a nonzero coupling term to scale".into());
            }
        }
        Perturbation { terms: self.coupling.terms.clone() }.validate()?;
        self.exponents.validate()?;
        let r = &self.resolution;
        if r.modes < (self.pair.0 - self.pair.1).unsigned_abs() as usize + 1 || r.max_modes < r.modes {
            return bad("mode window must contain the pair and max_modes >= modes".into());
        }
        if !(r.points_per_wavelength >= 12.0) || !(r.phase_per_step > 0.0) {
            return bad("need points_per_wavelength >= 12 and phase_per_step > 0".into());
        }
        if !(r.dx_scale > 0.0) || !(r.dt_scale > 0.0) {
            return bad("resolution scales must be positive".into());
        }
        let a = self.packet.a_mat();
        let b = self.packet.b_mat();
        if ((a.conj() * b).re - 1.0).abs() > 1e-10 {
            return bad("packet must satisfy Re(conj(A0) B0) = 1".into());
        }
        Ok(())
    }

    pub fn execution(&self) -> Execution {
        if self.parallel {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }

    pub fn basis(&self, modes: usize) -> ModeBasis {
        ModeBasis::around(self.pair.0, self.pair.1, modes)
    }

    /// Profile rescaled so that the pair crosses at `x = 0`, and the
    /// coupling scaled to the requested `r/η⁰` when one is given.
    pub fn calibrate(&self) -> Result<Calibrated> {
        let cp = crossing(self.pair.0, self.pair.1, self.magnetic_field)?;
        let profile = SurfaceProfile::new(self.surface.clone(), self.magnetic_field).calibrated(cp.radius)?;
        let base = Perturbation { terms: self.coupling.terms.clone() };
        let Some(target) = self.coupling.lz_ratio else {
            return Ok(Calibrated { model: FiberModel::new(profile, base), coupling_scale: 1.0 });
        };
        let probe = FiberModel::new(profile.clone(), base.clone());
        let nf = TwoLevelFrame::new(probe, self.pair, self.basis(self.resolution.modes))?.analytic_normal_form()?;
        // r/η⁰ = c₂² / (b₁ η⁰) in physical units, and c₂ is linear in the amplitude.
        let c2 = (target * nf.b1.abs() * self.momentum).sqrt();
        let scale = c2 / nf.c2;
        let terms = base.terms.iter().map(|t| FourierTerm { amplitude: t.amplitude * scale, ..*t }).collect();
        Ok(Calibrated { model: FiberModel::new(profile, Perturbation { terms }), coupling_scale: scale })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn defaults_round_trip() {
        let s = Scenario::default();
        s.validate().unwrap();
        let back = Scenario::from_toml(&s.to_toml().unwrap()).unwrap();
        assert_eq!(back.pair, (0, -1));
        assert_eq!(back.deltas, vec![0.05]);
        assert_eq!(back.resolution, s.resolution);
    }

    #[test]
    fn headline_calibration() {
        let c = Scenario::default().calibrate().unwrap();
        let w0 = c.model.coupling.terms[0].amplitude;
        assert_relative_eq!(c.model.profile.radius(0.0).unwrap(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(w0, 2.0 * 0.2f64.sqrt(), epsilon = 1e-12);
        let frame = TwoLevelFrame::new(c.model, (0, -1), ModeBasis::around(0, -1, 8)).unwrap();
        let nf = frame.analytic_normal_form().unwrap();
        assert_relative_eq!(nf.lz_ratio(1.0), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Scenario::from_toml("pair = [1, 2]").is_err());
        assert!(Scenario::from_toml("deltas = []").is_err());
        assert!(Scenario::from_toml("bogus = 1").is_err());
        assert!(Scenario::from_toml("[packet]\na0 = [2.0, 0.0]").is_err());
        let s = Scenario::from_toml(
            "deltas = [0.1]\n[surface]\nkind = \"gaussian_bump\"\nbase = 1.0\namplitude = 0.3\nwidth = 2.0\n",
        )
        .unwrap();
        assert!(matches!(s.surface, ProfileShape::GaussianBump { .. }));
    }
}
