//! `surfwave`: run crossing experiments, convergence sweeps and the
//! Landau–Zener and spectrum tables from the command line.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use surfwave::pipeline::{
    delta_tag, run_crossing_experiment, spectrum_table, transition_table, write_table, CrossingRun, RunReport, Scenario,
};
use surfwave::Result;

/// Largest accepted unitarity defect in transition tables.
const UNITARITY_TOL: f64 = 1e-10;
/// Largest accepted relative defect of the crossing closed forms.
const SPECTRUM_TOL: f64 = 1e-13;
/// δ list used by `converge` when the scenario names fewer than two.
const DEFAULT_SWEEP: [f64; 3] = [0.1, 0.05, 0.025];

#[derive(Parser)]
#[command(
    name = "surfwave",
    version,
    about = "Landau-Zener transitions of wave packets on a magnetic surface of revolution"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate the incoming packet through the crossing at each δ.
    Crossing(RunArgs),
    /// Run a δ sweep and fit the convergence exponents.
    Converge(RunArgs),
    /// Tabulate predicted transition probabilities.
    LzTable(LzArgs),
    /// Tabulate crossings of the free fiber spectrum.
    Spectrum(SpectrumArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (TOML); defaults apply when omitted.
    #[arg(short, long)]
    scenario: Option<PathBuf>,
    /// Output directory (overrides the scenario's `output`).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Comma-separated δ values.
    #[arg(long, value_delimiter = ',')]
    deltas: Option<Vec<f64>>,
    /// Initial angular mode window.
    #[arg(long)]
    modes: Option<usize>,
    /// Factor applied to the grid spacing.
    #[arg(long)]
    dx_scale: Option<f64>,
    /// Factor applied to the time step.
    #[arg(long)]
    dt_scale: Option<f64>,
    /// Run δ values and grid assembly on one thread.
    #[arg(long)]
    sequential: bool,
    /// Exit with status 1 if any acceptance threshold is violated.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct LzArgs {
    /// Comma-separated values of r/η⁰.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.5,1,2,5")]
    ratios: Vec<f64>,
    /// Crossing momentum η⁰ (rescaled units).
    #[arg(long, default_value_t = 1.0)]
    eta0: f64,
    /// Semiclassical parameter δ (rescaled units).
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Action phase S₀ of the outgoing A state.
    #[arg(long, default_value_t = 0.0)]
    s0: f64,
    #[arg(short, long, default_value = "out")]
    output: PathBuf,
    /// Exit with status 1 if any row violates unitarity.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Comma-separated magnetic field strengths.
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,4")]
    field: Vec<f64>,
    /// Largest |n| considered.
    #[arg(long, default_value_t = 10)]
    max_mode: i64,
    #[arg(short, long, default_value = "out")]
    output: PathBuf,
    /// Exit with status 1 if a closed form is not reproduced.
    #[arg(long)]
    check: bool,
}

fn resolve(args: &RunArgs, sweep: bool) -> Result<Scenario> {
    let mut s = match &args.scenario {
        Some(p) => Scenario::load(p)?,
        None => Scenario::default(),
    };
    if let Some(d) = &args.deltas {
        s.deltas = d.clone();
    } else if sweep && s.deltas.len() < 2 {
        s.deltas = DEFAULT_SWEEP.to_vec();
    }
    if let Some(m) = args.modes {
        s.resolution.modes = m;
        s.resolution.max_modes = s.resolution.max_modes.max(m);
    }
    if let Some(f) = args.dx_scale {
        s.resolution.dx_scale = f;
    }
    if let Some(f) = args.dt_scale {
        s.resolution.dt_scale = f;
    }
    if args.sequential {
        s.parallel = false;
    }
    if let Some(o) = &args.output {
        s.output = Some(o.clone());
    }
    s.validate()?;
    Ok(s)
}

fn write_run(run: &CrossingRun, dir: &Path) -> Result<()> {
    let tag = delta_tag(run.report.delta);
    run.incoming.save_csv(&dir.join(format!("trajectory_B_in_{tag}.csv")))?;
    run.outgoing_a.save_csv(&dir.join(format!("trajectory_A_out_{tag}.csv")))?;
    run.outgoing_b.save_csv(&dir.join(format!("trajectory_B_out_{tag}.csv")))?;
    let meta = serde_json::json!({
        "measured_p_a": run.report.measured_p_a,
        "measured_p_b": run.report.measured_p_b,
    });
    run.final_field.write_snapshot(dir, &format!("final_{tag}"), meta)?;
    Ok(())
}

fn print_report(report: &RunReport) {
    println!("{:>8} {:>10} {:>10} {:>10} {:>10} {:>10}", "delta", "P_A", "P_A pred", "P_B", "|error|", "BO min");
    for r in &report.entries {
        println!(
            "{:>8} {:>10.6} {:>10.6} {:>10.6} {:>10.2e} {:>10.6}",
            r.delta, r.measured_p_a, r.predicted_p_a, r.measured_p_b, r.population_error, r.bo_overlap_min
        );
    }
    if let Some(c) = &report.convergence {
        let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.3}"));
        println!("population error monotone: {}", c.population_error_monotone);
        println!("BO error exponent: {}", fmt(c.bo_error_exponent));
        println!("BO residual exponent: {}", fmt(c.bo_residual_exponent));
        println!(
            "metric residual exponent: {} (expected {:.2})",
            fmt(c.metric_residual_exponent),
            c.metric_residual_target
        );
        println!("residual bound dominates error: {}", c.bound_dominates);
    }
}

fn run(args: &RunArgs, sweep: bool) -> Result<Vec<String>> {
    let scenario = resolve(args, sweep)?;
    let dir = scenario.output.clone().unwrap_or_else(|| PathBuf::from("out"));
    let (report, runs) = run_crossing_experiment(&scenario)?;
    report.write(&dir)?;
    for r in &runs {
        write_run(r, &dir)?;
    }
    print_report(&report);
    println!("wrote {}", dir.display());
    Ok(report.violations())
}

fn lz_table(args: &LzArgs) -> Result<Vec<String>> {
    let rows = transition_table(&args.ratios, args.eta0, args.delta, args.s0)?;
    write_table(&rows, &args.output, "transitions")?;
    println!("{:>8} {:>12} {:>12} {:>12}", "r/eta0", "P_A", "P_B", "phase");
    for r in &rows {
        println!("{:>8} {:>12.8} {:>12.8} {:>12.6}", r.r / r.eta0, r.p_a, r.p_b, r.phase);
    }
    Ok(rows
        .iter()
        .filter(|r| r.unitarity_defect > UNITARITY_TOL)
        .map(|r| format!("r = {}: unitarity defect {:.2e}", r.r, r.unitarity_defect))
        .collect())
}

fn spectrum(args: &SpectrumArgs) -> Result<Vec<String>> {
    let mut rows = Vec::new();
    for &b in &args.field {
        rows.extend(spectrum_table(b, args.max_mode)?);
    }
    write_table(&rows, &args.output, "spectrum")?;
    let worst = rows.iter().map(|r| r.defect).fold(0.0, f64::max);
    println!("{} crossings, largest closed-form defect {worst:.2e}", rows.len());
    Ok(rows
        .iter()
        .filter(|r| r.defect > SPECTRUM_TOL)
        .map(|r| format!("B = {}, ({}, {}): defect {:.2e}", r.b, r.n, r.m, r.defect))
        .collect())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, check) = match &cli.command {
        Command::Crossing(a) => (run(a, false), a.check),
        Command::Converge(a) => (run(a, true), a.check),
        Command::LzTable(a) => (lz_table(a), a.check),
        Command::Spectrum(a) => (spectrum(a), a.check),
    };
    match result {
        Ok(violations) => {
            for v in &violations {
                eprintln!("threshold violated: {v}");
            }
            if check && !violations.is_empty() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
