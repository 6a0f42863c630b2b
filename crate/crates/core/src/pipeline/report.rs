//! Run reports, acceptance thresholds and file output.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::convergence::{run_convergence_suite, ConvergenceSummary};
use super::experiment::{run_crossing, CrossingRun, DeltaReport};
use super::scenario::Scenario;
use crate::angular::{crossing, eigenvalue};
use crate::error::{Error, Result};
use crate::landauzener::{transition_matrix, LzParameters};

/// Largest accepted `|P_A − predicted|`.
pub const POPULATION_TOLERANCE: f64 = 0.05;
/// Smallest accepted `P_A + P_B` after the crossing.
pub const TOTAL_POPULATION_MIN: f64 = 0.995;
/// Largest accepted `P_A + P_B`.
pub const TOTAL_POPULATION_MAX: f64 = 1.0 + 1e-6;
/// Smallest accepted Born–Oppenheimer overlap before the crossing.
pub const BO_OVERLAP_MIN: f64 = 0.95;
/// Largest accepted norm drift per unit time.
pub const NORM_DRIFT_MAX: f64 = 1e-9;
/// Accepted distance of the metric-term exponent from `3 − ξ`.
pub const METRIC_EXPONENT_WINDOW: f64 = 0.5;

/// Everything a run produced, with the resolved configuration embedded.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: Scenario,
    pub coupling_scale: f64,
    pub entries: Vec<DeltaReport>,
    pub convergence: Option<ConvergenceSummary>,
}

/// One row of `error_vs_delta.csv` and `summary.csv`.
#[derive(Debug, Clone, Serialize)]
struct SummaryRow {
    delta: f64,
    predicted_p_a: f64,
    predicted_p_b: f64,
    measured_p_a: f64,
    measured_p_b: f64,
    population_error: f64,
    mode_transfer: f64,
    bo_overlap_min: f64,
    bo_error: f64,
    bo_residual_bound: f64,
    inner_overlap: Option<f64>,
    metric_residual_bound: Option<f64>,
    post_overlap_a: f64,
    post_overlap_b: f64,
    norm_drift_per_time: f64,
    mode_tail_mass: f64,
    modes: usize,
    grid_points: usize,
    steps: usize,
}

impl From<&DeltaReport> for SummaryRow {
    fn from(r: &DeltaReport) -> Self {
        Self {
            delta: r.delta,
            predicted_p_a: r.predicted_p_a,
            predicted_p_b: r.predicted_p_b,
            measured_p_a: r.measured_p_a,
            measured_p_b: r.measured_p_b,
            population_error: r.population_error,
            mode_transfer: r.mode_transfer,
            bo_overlap_min: r.bo_overlap_min,
            bo_error: r.bo_error,
            bo_residual_bound: r.bo_residual_bound,
            inner_overlap: r.inner_overlap,
            metric_residual_bound: r.metric_residual_bound,
            post_overlap_a: r.post_overlap_a,
            post_overlap_b: r.post_overlap_b,
            norm_drift_per_time: r.norm_drift_per_time,
            mode_tail_mass: r.mode_tail_mass,
            modes: r.discretization.modes,
            grid_points: r.discretization.grid.n,
            steps: r.discretization.steps,
        }
    }
}

/// File-name tag for one δ, e.g. `d0.05`.
pub fn delta_tag(delta: f64) -> String {
    format!("d{delta}")
}

impl RunReport {
    /// Threshold violations, one message each.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for r in &self.entries {
            let d = r.delta;
            let total = r.measured_p_a + r.measured_p_b;
            for (name, p) in [("P_A", r.measured_p_a), ("P_B", r.measured_p_b)] {
                if !(0.0..=1.0).contains(&p) {
                    out.push(format!("delta {d}: {name} = {p} outside [0, 1]"));
                }
            }
            if total > TOTAL_POPULATION_MAX {
                out.push(format!("delta {d}: P_A + P_B = {total} exceeds 1"));
            }
            if total < TOTAL_POPULATION_MIN {
                out.push(format!("delta {d}: P_A + P_B = {total} below {TOTAL_POPULATION_MIN}"));
            }
            if r.population_error > POPULATION_TOLERANCE {
                out.push(format!(
                    "delta {d}: |P_A - predicted| = {:.4} above {POPULATION_TOLERANCE}",
                    r.population_error
                ));
            }
            if r.bo_overlap_min < BO_OVERLAP_MIN {
                out.push(format!("delta {d}: BO overlap {:.4} below {BO_OVERLAP_MIN}", r.bo_overlap_min));
            }
            if r.norm_drift_per_time > NORM_DRIFT_MAX {
                out.push(format!("delta {d}: norm drift {:.2e} per unit time", r.norm_drift_per_time));
            }
            if r.under_resolved {
                out.push(format!("delta {d}: under-resolved, mode tail mass {:.2e}", r.mode_tail_mass));
            }
        }
        if let Some(c) = &self.convergence {
            if !c.population_error_monotone {
                out.push(format!("population error not monotone in delta: {:?}", c.population_errors));
            }
            if let Some(p) = c.bo_error_exponent {
                if !(p > 0.0) {
                    out.push(format!("BO error exponent {p:.3} not positive"));
                }
            }
            if !c.bound_dominates {
                out.push("BO residual bound below the measured error".into());
            }
            if let Some(p) = c.metric_residual_exponent {
                if (p - c.metric_residual_target).abs() > METRIC_EXPONENT_WINDOW {
                    out.push(format!(
                        "metric residual exponent {p:.3} outside {:.2} ± {METRIC_EXPONENT_WINDOW}",
                        c.metric_residual_target
                    ));
                }
            }
        }
        out
    }

    /// Writes `report.json`, `summary.csv` and one `populations_<δ>.csv`
    /// per entry; returns the paths written.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut paths = Vec::new();
        let json = dir.join("report.json");
        fs::write(&json, serde_json::to_string_pretty(self)?)?;
        paths.push(json);
        let summary = dir.join("summary.csv");
        let mut w = csv::Writer::from_path(&summary)?;
        for r in &self.entries {
            w.serialize(SummaryRow::from(r))?;
        }
        w.flush()?;
        paths.push(summary);
        for r in &self.entries {
            let p = dir.join(format!("populations_{}.csv", delta_tag(r.delta)));
            write_populations(r, &p)?;
            paths.push(p);
        }
        Ok(paths)
    }
}

/// Population time series as CSV.
pub fn write_populations(report: &DeltaReport, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for s in &report.series {
        w.serialize(s)?;
    }
    w.flush()?;
    Ok(())
}

/// Runs every δ of the scenario and, with more than one δ, the trend fits.
pub fn run_crossing_experiment(scenario: &Scenario) -> Result<(RunReport, Vec<CrossingRun>)> {
    let cal = scenario.calibrate()?;
    let (runs, convergence) = if scenario.deltas.len() > 1 {
        let (runs, summary) = run_convergence_suite(scenario, &cal)?;
        (runs, Some(summary))
    } else {
        (vec![run_crossing(scenario, &cal, scenario.deltas[0])?], None)
    };
    let report = RunReport {
        scenario: scenario.clone(),
        coupling_scale: cal.coupling_scale,
        entries: runs.iter().map(|r| r.report.clone()).collect(),
        convergence,
    };
    Ok((report, runs))
}

/// One row of a Landau–Zener transition table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionRow {
    pub r: f64,
    pub eta0: f64,
    pub delta: f64,
    pub p_a: f64,
    pub p_b: f64,
    pub phase: f64,
    pub unitarity_defect: f64,
}

/// Predicted transitions for every `r/η⁰` in `ratios` at fixed `η⁰`, `δ`
/// (rescaled units) and phase offset `s0`.
pub fn transition_table(ratios: &[f64], eta0: f64, delta: f64, s0: f64) -> Result<Vec<TransitionRow>> {
    ratios
        .iter()
        .map(|&k| {
            let params = LzParameters::new(k * eta0, eta0)?;
            let t = transition_matrix(&params, delta, s0);
            Ok(TransitionRow {
                r: params.r,
                eta0,
                delta,
                p_a: t.p_a,
                p_b: t.p_b,
                phase: t.phase,
                unitarity_defect: t.unitarity_defect(),
            })
        })
        .collect()
}

/// One crossing of the free fiber spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub b: f64,
    pub n: i64,
    pub m: i64,
    pub radius: f64,
    pub energy: f64,
    /// Largest `|λₙ(R) − E|`, `|λₘ(R) − E|` relative to `max(1, |E|)`.
    pub defect: f64,
}

/// All crossings `n > m`, `n + m < 0`, `|n|, |m| ≤ max_mode` at field `b`.
pub fn spectrum_table(b: f64, max_mode: i64) -> Result<Vec<SpectrumRow>> {
    if !(b > 0.0) {
        return Err(Error::InvalidParameters(format!("magnetic field must be positive, got {b}")));
    }
    let mut rows = Vec::new();
    for n in -max_mode..=max_mode {
        for m in -max_mode..n {
            if n + m < 0 {
                let c = crossing(n, m, b)?;
                let scale = c.energy.abs().max(1.0);
                let defect =
                    (eigenvalue(n, c.radius, b)? - c.energy).abs().max((eigenvalue(m, c.radius, b)? - c.energy).abs())
                        / scale;
                rows.push(SpectrumRow { b, n, m, radius: c.radius, energy: c.energy, defect });
            }
        }
    }
    Ok(rows)
}

/// Writes `rows` as `<stem>.csv` and `<stem>.json`.
pub fn write_table<T: Serialize>(rows: &[T], dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let mut w = csv::Writer::from_path(&csv_path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    let json_path = dir.join(format!("{stem}.json"));
    fs::write(&json_path, serde_json::to_string_pretty(rows)?)?;
    Ok(vec![csv_path, json_path])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transition_table_is_unitary() {
        let rows = transition_table(&[0.1, 0.5, 1.0, 2.0, 5.0], 1.0, 0.02, 0.0).unwrap();
        for r in &rows {
            assert!(r.unitarity_defect < 1e-10);
        }
        assert!((rows[2].p_a - (-std::f64::consts::PI).exp()).abs() < 1e-12);
    }

    #[test]
    fn spectrum_table_lists_valid_pairs() {
        let rows = spectrum_table(1.0, 2).unwrap();
        assert!(rows.iter().all(|r| r.n + r.m < 0 && r.n > r.m && r.defect < 1e-14));
        let r = rows.iter().find(|r| r.n == 0 && r.m == -1).unwrap();
        assert_eq!(r.radius, 1.0);
        assert_eq!(r.energy, 0.125);
    }

    #[test]
    fn tables_write_csv_and_json() {
        let dir = tempfile::tempdir().unwrap();
        let rows = spectrum_table(0.5, 1).unwrap();
        let paths = write_table(&rows, dir.path(), "spectrum").unwrap();
        let text = fs::read_to_string(&paths[0]).unwrap();
        assert!(text.starts_with("b,n,m,radius,energy,defect"));
        let back: Vec<SpectrumRow> = serde_json::from_str(&fs::read_to_string(&paths[1]).unwrap()).unwrap();
        assert_eq!(back, rows);
    }
}
