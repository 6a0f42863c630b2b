//! Scenario configuration, the crossing experiment, convergence studies
//! and report output.

pub mod convergence;
pub mod experiment;
pub mod report;
pub mod scenario;

pub use convergence::{run_convergence_suite, summarize, ConvergenceSummary};
pub use experiment::{run_crossing, CrossingRun, DeltaReport, Discretization, PopulationSample, MODE_TAIL_LIMIT};
pub use report::{
    delta_tag, run_crossing_experiment, spectrum_table, transition_table, write_populations, write_table, RunReport,
    SpectrumRow, TransitionRow,
};
pub use scenario::{Calibrated, CouplingSpec, PacketSpec, Resolution, Scenario};
