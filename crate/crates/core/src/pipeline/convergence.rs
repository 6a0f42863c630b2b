//! δ-sweeps of the crossing experiment and the fitted decay exponents.

use serde::{Deserialize, Serialize};

use super::experiment::{run_crossing, CrossingRun, DeltaReport};
use super::scenario::{Calibrated, Scenario};
use crate::error::Result;
use crate::exact::loglog_slope;
use crate::par;

/// Trends across the δ list, ordered from the largest δ down.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceSummary {
    pub deltas: Vec<f64>,
    pub population_errors: Vec<f64>,
    /// `|measured − predicted|` is non-increasing as δ decreases.
    pub population_error_monotone: bool,
    /// Log-log slope of `‖ψ − Ψ_BO‖` against δ.
    pub bo_error_exponent: Option<f64>,
    /// Log-log slope of the integrated Born–Oppenheimer residual bound.
    pub bo_residual_exponent: Option<f64>,
    /// Log-log slope of the integrated metric-term residual.
    pub metric_residual_exponent: Option<f64>,
    /// Expected metric-term exponent `3 − ξ`.
    pub metric_residual_target: f64,
    /// The residual bound exceeds the measured error at every δ.
    pub bound_dominates: bool,
}

fn slope(deltas: &[f64], values: &[Option<f64>]) -> Option<f64> {
    let (x, y): (Vec<f64>, Vec<f64>) =
        deltas.iter().zip(values).filter_map(|(&d, v)| v.filter(|v| *v > 0.0 && v.is_finite()).map(|v| (d, v))).unzip();
    (x.len() >= 2).then(|| loglog_slope(&x, &y))
}

/// Summarizes reports given in any order.
pub fn summarize(reports: &[DeltaReport], xi: f64) -> ConvergenceSummary {
    let mut sorted: Vec<&DeltaReport> = reports.iter().collect();
    sorted.sort_by(|a, b| b.delta.total_cmp(&a.delta));
    let deltas: Vec<f64> = sorted.iter().map(|r| r.delta).collect();
    let population_errors: Vec<f64> = sorted.iter().map(|r| r.population_error).collect();
    let population_error_monotone = population_errors.windows(2).all(|w| w[1] <= w[0]);
    let pick = |f: fn(&DeltaReport) -> Option<f64>| -> Vec<Option<f64>> { sorted.iter().map(|r| f(r)).collect() };
    ConvergenceSummary {
        bo_error_exponent: slope(&deltas, &pick(|r| Some(r.bo_error))),
        bo_residual_exponent: slope(&deltas, &pick(|r| Some(r.bo_residual_bound))),
        metric_residual_exponent: slope(&deltas, &pick(|r| r.metric_residual_bound)),
        metric_residual_target: 3.0 - xi,
        bound_dominates: sorted.iter().all(|r| r.bo_residual_bound >= r.bo_error),
        deltas,
        population_errors,
        population_error_monotone,
    }
}

/// Runs the experiment at every δ of the scenario (concurrently when the
/// scenario allows it) and fits the trends.
pub fn run_convergence_suite(scenario: &Scenario, cal: &Calibrated) -> Result<(Vec<CrossingRun>, ConvergenceSummary)> {
    let runs = par::try_map(scenario.execution(), &scenario.deltas, |&d| run_crossing(scenario, cal, d))?;
    let reports: Vec<DeltaReport> = runs.iter().map(|r| r.report.clone()).collect();
    let summary = summarize(&reports, scenario.exponents.xi);
    Ok((runs, summary))
}
