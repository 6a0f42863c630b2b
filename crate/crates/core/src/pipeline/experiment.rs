//! The end-to-end crossing experiment: incoming Born–Oppenheimer state on
//! the lower level, exact propagation through the avoided crossing and
//! comparison with the Landau–Zener prediction.

use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::scenario::{Calibrated, Scenario};
use crate::angular::{EffectivePair, FiberModel, Level, ModeBasis, NormalForm, TwoLevelFrame};
use crate::classical::potential::five_point;
use crate::classical::{
    integrate_classical, integrate_tilded, tilded_initial_data, Branch, ClassicalState, ModifiedLevel, OdeOptions,
    Potential, TildedSetup, Trajectory,
};
use crate::error::{Error, Result, StageExt};
use crate::exact::{
    build_hamiltonian, integrated_bound, metric_correction, operator_norm_on, residual_norm, AssemblyOptions,
    BandedMatrix, Grid, LevelProjector, Propagator, WaveField,
};
use crate::landauzener::{
    matching_coefficients, transition_matrix, IncomingPacket, InnerSolution, LzParameters, TransitionResult,
};
use crate::packets::{assemble_inner_state, frame_on_grid, transport_phase_on_grid, BoState};
use crate::par::{self, Execution};

/// Mode tail mass above which a run counts as under-resolved.
pub const MODE_TAIL_LIMIT: f64 = 1e-8;

/// Number of inner-window samples for the metric-term residual.
const INNER_SAMPLES: usize = 9;

/// One observation of the propagated field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationSample {
    pub t: f64,
    pub p_a: f64,
    pub p_b: f64,
    /// Populations of the diabatic modes `n` and `m`.
    pub p_n: f64,
    pub p_m: f64,
    pub norm: f64,
    /// `|⟨ψ, Ψ_BO⟩| / ‖Ψ_BO‖` while the incoming state is in the outer regime.
    pub bo_overlap: Option<f64>,
}

/// Discretization actually used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discretization {
    pub grid: Grid,
    pub modes: usize,
    pub dt: f64,
    pub steps: usize,
    pub observe_every: usize,
    pub carrier: f64,
    pub energy_shift: f64,
}

/// Results for one `δ`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeltaReport {
    pub delta: f64,
    pub discretization: Discretization,
    /// Normal form `β ≈ b₁x + b₂δ`, `γ ≈ c₂δ` (absent without coupling).
    pub normal_form: Option<NormalForm>,
    /// Landau–Zener prediction in rescaled units.
    pub prediction: Option<TransitionResult>,
    pub predicted_p_a: f64,
    pub predicted_p_b: f64,
    pub measured_p_a: f64,
    pub measured_p_b: f64,
    /// Population that left the incoming diabatic mode.
    pub mode_transfer: f64,
    pub population_error: f64,
    pub norm_drift_per_time: f64,
    pub mode_tail_mass: f64,
    pub under_resolved: bool,
    /// Smallest Born–Oppenheimer overlap on `[−T, −δ^{1−ξ}]`.
    pub bo_overlap_min: f64,
    /// `‖ψ − Ψ_BO‖` at the last outer sample before the crossing.
    pub bo_error: f64,
    /// `δ⁻² ∫ ‖iδ²∂ₜΨ_BO − HΨ_BO‖ dt` over the same window.
    pub bo_residual_bound: f64,
    /// Overlap with the inner state at `t = 0`.
    pub inner_overlap: Option<f64>,
    /// `δ⁻² ∫ ‖R ψ_I‖ dt` over the inner window.
    pub metric_residual_bound: Option<f64>,
    /// Overlaps of the level projections with the outgoing states.
    pub post_overlap_a: f64,
    pub post_overlap_b: f64,
    pub series: Vec<PopulationSample>,
    #[serde(skip)]
    pub seconds: f64,
}

/// A finished run with the data the command line writes out.
#[derive(Debug, Clone)]
pub struct CrossingRun {
    pub report: DeltaReport,
    pub final_field: WaveField,
    pub incoming: Trajectory,
    pub outgoing_a: Trajectory,
    pub outgoing_b: Trajectory,
}

/// Level geometry and classical data shared by all stages of one run.
struct Setup<'a> {
    scenario: &'a Scenario,
    delta: f64,
    model: FiberModel,
    frame: TwoLevelFrame,
    normal_form: Option<NormalForm>,
    eta_bar: f64,
    energy: f64,
    s0: f64,
    dv3: f64,
}

impl<'a> Setup<'a> {
    fn new(scenario: &'a Scenario, cal: &Calibrated, delta: f64, basis: ModeBasis) -> Result<Self> {
        let model = cal.model.clone();
        let frame = TwoLevelFrame::new(model.clone(), scenario.pair, basis)?;
        let normal_form = if model.coupling.is_zero() { None } else { Some(frame.analytic_normal_form()?) };
        let trunc = scenario.resolution.truncation;
        let pair0 = EffectivePair::new(&frame, 0.0, trunc)?;
        let dv3 = five_point(|x| Ok(EffectivePair::new(&frame, x, trunc)?.v3(delta)), 0.0, 1e-3)?;
        let eta_bar = scenario.momentum;
        Ok(Self {
            scenario,
            delta,
            energy: 0.5 * eta_bar * eta_bar + pair0.v3(delta),
            s0: pair0.s(delta),
            dv3,
            model,
            frame,
            normal_form,
            eta_bar,
        })
    }

    fn potential(&self, branch: Branch) -> ModifiedLevel {
        ModifiedLevel {
            frame: self.frame.clone(),
            branch,
            delta: self.delta,
            truncation: self.scenario.resolution.truncation,
        }
    }

    /// `η^C(0) = √(η⁰² ∓ 2s(0))`.
    fn crossing_momentum(&self, level: Level) -> Result<f64> {
        let k = self.eta_bar * self.eta_bar - 2.0 * level.sign() * self.s0;
        if !(k > 0.0) {
            return Err(Error::TurningPoint { a: 0.0, kinetic: k / 2.0 });
        }
        Ok(k.sqrt())
    }

    fn lz(&self) -> Result<Option<(LzParameters, NormalForm)>> {
        match self.normal_form {
            Some(nf) => Ok(Some((LzParameters::new(nf.r(), nf.eta_to_rescaled(self.eta_bar))?, nf))),
            None => Ok(None),
        }
    }

    /// Level-`C` states at `times` (all on the side `sign` of the crossing),
    /// from the tilded construction, or by direct integration from the
    /// crossing when there is no coupling.
    fn level_states(&self, level: Level, sign: f64, times: &[f64]) -> Result<Vec<ClassicalState>> {
        let pot = self.potential(Branch::Level(level));
        let p = &self.scenario.packet;
        let eta0 = self.crossing_momentum(level)?;
        match self.normal_form {
            Some(nf) => {
                let setup = TildedSetup {
                    potential: &pot,
                    level,
                    normal_form: nf,
                    eta0,
                    dv3: self.dv3,
                    delta: self.delta,
                    exponents: self.scenario.exponents,
                    a0: p.a_mat(),
                    b0: p.b_mat(),
                };
                let start = tilded_initial_data(&setup, sign)?;
                sample(times, start.t, |ts| integrate_tilded(&setup, &start, ts))
            }
            None => {
                let start = ClassicalState::new(0.0, 0.0, eta0, 0.0, p.a_mat(), p.b_mat()).with_level(level);
                sample(times, 0.0, |ts| integrate_classical(&pot, &start, ts, &OdeOptions::default()))
            }
        }
    }

    fn mean_states(&self, times: &[f64]) -> Result<Vec<ClassicalState>> {
        let pot = self.potential(Branch::Mean);
        let p = &self.scenario.packet;
        let start = ClassicalState::new(0.0, 0.0, self.eta_bar, 0.0, p.a_mat(), p.b_mat());
        sample(times, 0.0, |ts| integrate_classical(&pot, &start, ts, &OdeOptions::default()))
    }
}

/// Integrates outward from `t_start` and returns states in the order of
/// `times`.
fn sample<F>(times: &[f64], t_start: f64, integrate: F) -> Result<Vec<ClassicalState>>
where
    F: Fn(&[f64]) -> Result<Trajectory>,
{
    let mut out: Vec<Option<ClassicalState>> = vec![None; times.len()];
    for dir in [1.0, -1.0] {
        let mut idx: Vec<usize> =
            (0..times.len()).filter(|&i| out[i].is_none() && (times[i] - t_start) * dir >= 0.0).collect();
        if idx.is_empty() {
            continue;
        }
        idx.sort_by(|&a, &b| ((times[a] - t_start) * dir).total_cmp(&((times[b] - t_start) * dir)));
        let ts: Vec<f64> = idx.iter().map(|&i| times[i]).collect();
        let tr = integrate(&ts)?;
        for (k, &i) in idx.iter().enumerate() {
            out[i] = Some(tr.states[k]);
        }
    }
    Ok(out.into_iter().map(|s| s.expect("every time lies on one side")).collect())
}

fn sorted_trajectory(mut states: Vec<ClassicalState>) -> Trajectory {
    states.sort_by(|a, b| a.t.total_cmp(&b.t));
    states.dedup_by(|a, b| a.t == b.t);
    Trajectory { states }
}

/// Time grid: `steps` is a multiple of `2 · every`, so `t = 0` is observed.
fn time_grid(scenario: &Scenario, omega: f64) -> (usize, usize, f64) {
    let span = 2.0 * scenario.exponents.horizon;
    let res = &scenario.resolution;
    let dt_max = res.phase_per_step / omega * res.dt_scale;
    let raw = (span / dt_max).ceil().max(2.0) as usize;
    let every = if res.observe_every > 0 { res.observe_every } else { (raw / 200).max(1) };
    let steps = raw.div_ceil(2 * every) * 2 * every;
    (steps, every, span / steps as f64)
}

/// Runs the experiment at one `δ`, doubling the mode window while the
/// tail test fails.
pub fn run_crossing(scenario: &Scenario, cal: &Calibrated, delta: f64) -> Result<CrossingRun> {
    let mut modes = scenario.resolution.modes;
    loop {
        let run = run_with_modes(scenario, cal, delta, modes)?;
        if !run.report.under_resolved || 2 * modes > scenario.resolution.max_modes {
            return Ok(run);
        }
        modes *= 2;
    }
}

fn run_with_modes(scenario: &Scenario, cal: &Calibrated, delta: f64, modes: usize) -> Result<CrossingRun> {
    let clock = Instant::now();
    let exec = scenario.execution();
    let basis = scenario.basis(modes);
    let setup = Setup::new(scenario, cal, delta, basis).stage("calibration")?;
    let ex = scenario.exponents;
    let horizon = ex.horizon;
    let hbar = delta * delta;
    let j = scenario.packet.index;
    let inner_edge = ex.inner_edge(delta);
    let t0 = ex.t0(delta);
    if !(horizon > inner_edge) {
        return Err(Error::InvalidParameters(format!("horizon {horizon} inside the inner window {inner_edge}")));
    }

    let lz = setup.lz().stage("calibration")?;
    let prediction =
        lz.map(|(params, nf)| transition_matrix(&params, nf.delta_to_rescaled(delta), scenario.packet.s0_phase));
    let (predicted_p_a, predicted_p_b) = prediction.map_or((1.0, 0.0), |p| (p.p_a, p.p_b));

    // Lattice sized from the trajectory endpoints.
    let ends = [
        setup.level_states(Level::B, -1.0, &[-horizon]).stage("classical")?[0],
        setup.level_states(Level::A, 1.0, &[horizon]).stage("classical")?[0],
        setup.level_states(Level::B, 1.0, &[horizon]).stage("classical")?[0],
    ];
    let jf = (j as f64 + 0.5).sqrt();
    let sigma = ends.iter().map(|s| delta * s.a_mat.norm() * jf).fold(0.0, f64::max);
    let dp = ends.iter().map(|s| (s.eta - setup.eta_bar).abs() + 6.0 * delta * s.b_mat.norm() * jf).fold(0.0, f64::max);
    let pad = 10.0 * sigma + 2.0 * ex.cutoff_radius(delta);
    let lo = ends.iter().map(|s| s.a).fold(f64::INFINITY, f64::min) - pad;
    let hi = ends.iter().map(|s| s.a).fold(f64::NEG_INFINITY, f64::max) + pad;
    let res = &scenario.resolution;
    let dx = 2.0 * std::f64::consts::PI * hbar / (res.points_per_wavelength * dp) * res.dx_scale;
    let grid = Grid::covering(lo, hi, dx)?;
    let pot_a = setup.potential(Branch::Level(Level::A));
    let pot_b = setup.potential(Branch::Level(Level::B));
    let mut split: f64 = 0.0;
    for s in &ends {
        split = split.max(0.5 * (pot_a.value(s.a)? - pot_b.value(s.a)?).abs());
    }
    let eta_max = ends.iter().map(|s| s.eta.abs()).fold(setup.eta_bar, f64::max);
    let (steps, every, dt) = time_grid(scenario, (eta_max * dp + split) / hbar);
    let carrier = setup.eta_bar / hbar;
    let discretization =
        Discretization { grid, modes, dt, steps, observe_every: every, carrier, energy_shift: setup.energy };

    let opts = AssemblyOptions {
        carrier,
        energy_shift: setup.energy,
        momentum_range: Some((setup.eta_bar - dp, setup.eta_bar + dp)),
        include_metric: true,
        execution: exec,
    };
    let h = build_hamiltonian(&setup.model, delta, grid, basis, &opts).stage("assembly")?;
    let projector = LevelProjector::new(&setup.model, delta, grid, basis, scenario.pair, exec).stage("assembly")?;
    let template = WaveField::zeros(grid, basis, -horizon, delta, carrier, setup.energy);
    let (vec_a, vec_b) = (projector.level_vectors(0), projector.level_vectors(1));
    let (conn_a, conn_b) = (projector.connection(0), projector.connection(1));

    // Incoming classical data at the outer observation times and their neighbours.
    let h_t = 0.1 * dt;
    let obs_times: Vec<f64> = (0..=steps / every).map(|k| -horizon + (k * every) as f64 * dt).collect();
    let mut in_times = Vec::new();
    for &t in obs_times.iter().filter(|&&t| t <= -inner_edge) {
        in_times.extend([t, t - h_t, t + h_t]);
    }
    let in_states = setup.level_states(Level::B, -1.0, &in_times).stage("classical")?;
    let state_at = |t: f64| -> Result<ClassicalState> {
        in_times
            .iter()
            .position(|&s| s == t)
            .map(|i| in_states[i])
            .ok_or_else(|| Error::InvalidParameters(format!("no classical sample at t = {t}")))
    };
    let a_start = state_at(-horizon)?.a;
    let bo_field = |t: f64, norm: f64| -> Result<WaveField> {
        let st = state_at(t)?;
        let lam = transport_phase_on_grid(&conn_b, grid.x0, grid.dx, a_start, st.a)?;
        let mut f = BoState::new(&st, j, delta, ex.delta_prime, None)?.assemble(&vec_b, Some(&lam), &template)?;
        f.scale(1.0 / norm);
        Ok(f)
    };

    let mut field = bo_field(-horizon, 1.0).stage("incoming state")?;
    let norm0 = field.norm();
    field.scale(1.0 / norm0);
    let k_n = basis.index(scenario.pair.0).expect("pair in basis");
    let k_m = basis.index(scenario.pair.1).expect("pair in basis");
    let p_n0 = field.mode_populations()[k_n];

    let prop = Propagator::new(&h, dt).stage("propagation")?;
    let mut series = Vec::with_capacity(obs_times.len());
    let mut bo_overlap_min: f64 = 1.0;
    let mut bo_error = f64::NAN;
    let (mut res_t, mut res_v) = (Vec::new(), Vec::new());
    let mut inner_overlap = None;
    let mut observe = |k: usize, f: &WaveField| -> Result<()> {
        let t = obs_times[k];
        let (p_a, p_b) = projector.populations(f);
        let pops = f.mode_populations();
        let mut bo_overlap = None;
        if t <= -inner_edge {
            let bo = bo_field(t, norm0)?;
            let ov = f.inner(&bo).norm() / bo.norm();
            bo_overlap_min = bo_overlap_min.min(ov);
            bo_overlap = Some(ov);
            let diff: f64 = f.data.iter().zip(&bo.data).map(|(a, b)| (a - b).norm_sqr()).sum();
            bo_error = (diff * grid.dx).sqrt();
            let prev = bo_field(t - h_t, norm0)?;
            let next = bo_field(t + h_t, norm0)?;
            res_t.push(t);
            res_v.push(residual_norm(&h, &prev, &bo, &next));
        }
        if k * every == steps / 2 {
            if let Some((params, nf)) = lz {
                let mean = setup.mean_states(&[0.0])?[0];
                let psi_i = inner_state(&setup, &params, &nf, &WaveField { t, ..template.clone() }, &mean)?;
                inner_overlap = Some(f.inner(&psi_i).norm());
            }
        }
        series.push(PopulationSample { t, p_a, p_b, p_n: pops[k_n], p_m: pops[k_m], norm: f.norm(), bo_overlap });
        Ok(())
    };
    observe(0, &field).stage("observation")?;
    let mut count = 0;
    prop.advance(&mut field, steps, every, |f| {
        count += 1;
        observe(count, f)
    })
    .stage("propagation")?;
    let bo_residual_bound = integrated_bound(&res_t, &res_v, hbar);

    // Outgoing comparison at t = T.
    let a_out = setup.level_states(Level::A, 1.0, &[t0, horizon]).stage("classical")?;
    let b_out = setup.level_states(Level::B, 1.0, &[t0, horizon]).stage("classical")?;
    let end = WaveField { t: field.t, ..template.clone() };
    let post = |states: &[ClassicalState], vecs: &[Vec<Complex64>], conn: &[Complex64], p: f64| -> Result<f64> {
        let lam = transport_phase_on_grid(conn, grid.x0, grid.dx, states[0].a, states[1].a)?;
        let psi = BoState::new(&states[1], j, delta, ex.delta_prime, None)?.assemble(vecs, Some(&lam), &end)?;
        let psi = WaveField { t: field.t, ..psi };
        Ok(if p > 0.0 { field.inner(&psi).norm() / (psi.norm() * p.sqrt()) } else { 0.0 })
    };
    let (measured_p_a, measured_p_b) = projector.populations(&field);
    let post_overlap_a = post(&a_out, &vec_a, &conn_a, measured_p_a).stage("outgoing state")?;
    let post_overlap_b = post(&b_out, &vec_b, &conn_b, measured_p_b).stage("outgoing state")?;

    let metric_residual_bound = match lz {
        Some((params, nf)) => {
            let r_op = metric_correction(&setup.model, delta, grid, basis, carrier).stage("assembly")?;
            Some(metric_bound(&setup, &params, &nf, &template, &r_op, inner_edge, exec).stage("inner state")?)
        }
        None => None,
    };

    let pops = field.mode_populations();
    let tail = field.mode_tail_mass();
    let norm_drift_per_time = series.iter().map(|s| (s.norm - 1.0).abs()).fold(0.0, f64::max) / (2.0 * horizon);
    let report = DeltaReport {
        delta,
        discretization,
        normal_form: setup.normal_form,
        prediction,
        predicted_p_a,
        predicted_p_b,
        measured_p_a,
        measured_p_b,
        mode_transfer: (p_n0 - pops[k_n]).max(0.0),
        population_error: (measured_p_a - predicted_p_a).abs(),
        norm_drift_per_time,
        mode_tail_mass: tail,
        under_resolved: tail > MODE_TAIL_LIMIT,
        bo_overlap_min,
        bo_error,
        bo_residual_bound,
        inner_overlap,
        metric_residual_bound,
        post_overlap_a,
        post_overlap_b,
        series,
        seconds: clock.elapsed().as_secs_f64(),
    };
    Ok(CrossingRun {
        report,
        final_field: field,
        incoming: sorted_trajectory(in_states.into_iter().step_by(3).collect()),
        outgoing_a: sorted_trajectory(a_out),
        outgoing_b: sorted_trajectory(b_out),
    })
}

/// Normalized `ψ_I` on the mean trajectory state `mean`, on the lattice and
/// at the time of `template`.
fn inner_state(
    setup: &Setup,
    params: &LzParameters,
    nf: &NormalForm,
    template: &WaveField,
    mean: &ClassicalState,
) -> Result<WaveField> {
    let delta = setup.delta;
    let ex = setup.scenario.exponents;
    let p = &setup.scenario.packet;
    let dr = nf.delta_to_rescaled(delta);
    let s = nf.t_to_rescaled(mean.t) / dr;
    let yscale = nf.b1 / nf.c2;
    let incoming = IncomingPacket {
        level: Level::B,
        index: p.index,
        a0: p.a_mat() * yscale,
        b0: p.b_mat() / yscale,
        s0: p.s0_phase,
    };
    let inner = InnerSolution::new(*params);
    let frame = frame_on_grid(&setup.frame, delta, &template.grid, Execution::Sequential)?;
    let amplitudes = |y: f64| -> Result<[Complex64; 2]> {
        let yr = yscale * y;
        let (c1, c2) = matching_coefficients(&incoming, params, dr, ex.xi, yr)?;
        inner.eval(s, yr, c1, c2)
    };
    let mut f = assemble_inner_state(amplitudes, mean, &frame, delta, ex.delta_prime, ex.inner_edge(delta), template)?;
    let n = f.norm();
    if n > 0.0 {
        f.scale(1.0 / n);
    }
    Ok(f)
}

fn metric_bound(
    setup: &Setup,
    params: &LzParameters,
    nf: &NormalForm,
    template: &WaveField,
    r_op: &BandedMatrix,
    inner_edge: f64,
    exec: Execution,
) -> Result<f64> {
    let times: Vec<f64> =
        (0..INNER_SAMPLES).map(|k| -inner_edge + 2.0 * inner_edge * k as f64 / (INNER_SAMPLES - 1) as f64).collect();
    let means = setup.mean_states(&times)?;
    let norms = par::try_map(exec, &means, |mean| -> Result<f64> {
        let f = inner_state(setup, params, nf, &WaveField { t: mean.t, ..template.clone() }, mean)?;
        Ok(operator_norm_on(r_op, &f))
    })?;
    Ok(integrated_bound(&times, &norms, setup.delta * setup.delta))
}
