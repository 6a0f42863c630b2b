//! Acceptance suite: one line per criterion, nonzero exit on any failure.
#![allow(clippy::needless_range_loop)]

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use surfwave::angular::{
    crossing, eigenvalue, perturbation_series, FiberModel, Level, ModeBasis, Perturbation, TwoLevelFrame,
};
use surfwave::classical::{
    integrate_classical, integrate_trajectory, linspace, outer_asymptotics, Branch, ClassicalState, FnPotential,
    ModifiedLevel, OdeOptions,
};
use surfwave::exact::{build_hamiltonian, loglog_slope, AssemblyOptions, Grid};
use surfwave::landauzener::{gamma_complex, pcf_d, transition_matrix, InnerSolution, LzParameters};
use surfwave::packets::{scaled_fourier, HagedornPacket};
use surfwave::pipeline::{run_convergence_suite, run_crossing, summarize, CouplingSpec, DeltaReport, Scenario};
use surfwave::surface::{ProfileShape, SurfaceProfile};

/// Tolerances, pinned.
const UNITARITY_TOL: f64 = 1e-10;
const UNITARITY_SECONDS: f64 = 1.0;
const HEADLINE_TOL: f64 = 0.05;
const HEADLINE_TOTAL_MIN: f64 = 0.995;
const HEADLINE_SECONDS: f64 = 600.0;
const BO_OVERLAP_MIN: f64 = 0.95;
const INNER_RESIDUAL_TOL: f64 = 1e-7;
const INNER_POPULATION_TOL: f64 = 1e-3;
const GRAM_TOL: f64 = 1e-8;
const UNCERTAINTY_TOL: f64 = 1e-6;
const FOURIER_TOL: f64 = 1e-6;
const ENERGY_DRIFT_TOL: f64 = 1e-8;
const SYMPLECTIC_DRIFT_TOL: f64 = 1e-10;
const SPECTRUM_TOL: f64 = 1e-13;
const ORDER_SLOPE_MIN: f64 = 2.7;
const NORM_DRIFT_TOL: f64 = 1e-9;
const MODE_DRIFT_TOL: f64 = 1e-8;
const HERMITICITY_TOL: f64 = 1e-10;
const HALVING_TOL: f64 = 1e-4;
const SPECIAL_TOL: f64 = 1e-10;
const RECURRENCE_TOL: f64 = 1e-8;

const SWEEP: [f64; 3] = [0.1, 0.05, 0.025];

type Outcome = (bool, String);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn headline() -> Scenario {
    Scenario { deltas: SWEEP.to_vec(), ..Scenario::default() }
}

fn entry(reports: &[DeltaReport], delta: f64) -> &DeltaReport {
    reports.iter().find(|r| r.delta == delta).expect("delta in sweep")
}

fn unitarity() -> Outcome {
    let clock = Instant::now();
    let mut worst: f64 = 0.0;
    for k in [0.1, 0.5, 1.0, 2.0, 5.0] {
        let p = LzParameters::new(k, 1.0).unwrap();
        let t = transition_matrix(&p, 0.05, 0.0);
        let a = -(-PI * k / 2.0).exp();
        let b = (-PI * k / 4.0).exp() * (PI * k).sqrt() / gamma_complex(c(1.0, k / 2.0)).norm();
        worst = worst.max((a * a + b * b - 1.0).abs()).max(t.unitarity_defect());
    }
    let secs = clock.elapsed().as_secs_f64();
    (worst < UNITARITY_TOL && secs < UNITARITY_SECONDS, format!("max defect {worst:.1e} in {secs:.3} s"))
}

fn headline_transition(r: &DeltaReport) -> Outcome {
    let target = (-PI).exp();
    let err = (r.measured_p_a - target).abs();
    let total = r.measured_p_a + r.measured_p_b;
    (
        err <= HEADLINE_TOL && total >= HEADLINE_TOTAL_MIN && r.seconds <= HEADLINE_SECONDS,
        format!(
            "P_A = {:.5} vs e^-pi = {target:.5} (|diff| {err:.1e}), P_A + P_B = {total:.6}, {:.1} s",
            r.measured_p_a, r.seconds
        ),
    )
}

fn convergence_trend(reports: &[DeltaReport], xi: f64) -> Outcome {
    let s = summarize(reports, xi);
    let errs: Vec<String> = s.population_errors.iter().map(|e| format!("{e:.2e}")).collect();
    (s.population_error_monotone, format!("|measured - predicted| over delta {:?}: {}", s.deltas, errs.join(", ")))
}

fn bo_fidelity(r: &DeltaReport) -> Outcome {
    (r.bo_overlap_min >= BO_OVERLAP_MIN, format!("min overlap {:.5} on [-T, -delta^(1-xi)]", r.bo_overlap_min))
}

fn inner_residual() -> Outcome {
    let mut res: f64 = 0.0;
    let mut pop: f64 = 0.0;
    for (r, eta0) in [(1.0, 1.0), (0.5, 1.0), (2.0, 1.5)] {
        let p = LzParameters::new(r, eta0).unwrap();
        let sol = InnerSolution::new(p);
        let c2 = c((-PI * p.ratio() / 8.0).exp(), 0.0);
        for i in 0..=80 {
            let s = -40.0 + i as f64;
            res = res.max(sol.residual(s, 0.2, c(0.3, -0.1), c2).unwrap());
        }
        let (pa_in, pb_in) = sol.adiabatic_populations(p.u(-40.0, 0.0), c(0.0, 0.0), c2).unwrap();
        let (pa, pb) = sol.adiabatic_populations(p.u(40.0, 0.0), c(0.0, 0.0), c2).unwrap();
        let t = transition_matrix(&p, 0.05, 0.0);
        pop = pop.max(pa_in).max((pb_in - 1.0).abs()).max((pa - t.p_a).abs()).max((pb - t.p_b).abs());
    }
    (
        res < INNER_RESIDUAL_TOL && pop < INNER_POPULATION_TOL,
        format!("max residual {res:.1e}, asymptotic population mismatch {pop:.1e}"),
    )
}

fn hagedorn() -> Outcome {
    let a = c(0.8, 0.5);
    let b = c(1.0, -0.4) / a.conj();
    let hbar = 0.0025;
    let (q, eta) = (0.37, 1.3);
    let p = HagedornPacket::new(a, b, hbar, q, eta).unwrap();
    let half = p.support_half_width(5) * 1.6;
    let n = 4096;
    let dx = 2.0 * half / n as f64;
    let xs: Vec<f64> = (0..n).map(|k| q - half + k as f64 * dx).collect();
    let phis: Vec<Vec<Complex64>> = (0..6).map(|j| p.eval_grid(j, &xs)).collect();
    let mut gram: f64 = 0.0;
    for j in 0..6 {
        for k in 0..6 {
            let g: Complex64 = phis[j].iter().zip(&phis[k]).map(|(u, v)| u.conj() * v).sum::<Complex64>() * dx;
            gram = gram.max((g - if j == k { 1.0 } else { 0.0 }).norm());
        }
    }
    let mut unc: f64 = 0.0;
    for (j, phi) in phis.iter().enumerate() {
        let var: f64 = phi.iter().zip(&xs).map(|(v, x)| v.norm_sqr() * (x - q) * (x - q)).sum::<f64>() * dx;
        let env: Vec<Complex64> =
            phi.iter().zip(&xs).map(|(v, x)| v * Complex64::from_polar(1.0, -eta * x / hbar)).collect();
        let pvar: f64 = (2..n - 2)
            .map(|i| {
                let d = (-env[i + 2] + 8.0 * env[i + 1] - 8.0 * env[i - 1] + env[i - 2]) / (12.0 * dx);
                (hbar * d).norm_sqr()
            })
            .sum::<f64>()
            * dx;
        let jf = ((j as f64 + 0.5) * hbar).sqrt();
        unc = unc
            .max((var.sqrt() - jf * a.norm()).abs())
            .max((var.sqrt() - p.position_uncertainty(j)).abs())
            .max((pvar.sqrt() - jf * b.norm()).abs())
            .max((pvar.sqrt() - p.momentum_uncertainty(j)).abs());
    }
    let dual = HagedornPacket::new(b, a, hbar, eta, -q).unwrap();
    let mut fourier: f64 = 0.0;
    for j in 0..4 {
        let t = scaled_fourier(&phis[j], xs[0], dx, hbar, eta).unwrap();
        let phase = c(0.0, -1.0).powu(j as u32) * Complex64::from_polar(1.0, -eta * q / hbar);
        let peak = t.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (xi, v) in t.xi.iter().zip(&t.values) {
            fourier = fourier.max((v - phase * dual.eval(j, *xi)).norm() / peak);
        }
    }
    (
        gram < GRAM_TOL && unc < UNCERTAINTY_TOL && fourier < FOURIER_TOL,
        format!("Gram {gram:.1e}, uncertainties {unc:.1e}, Fourier identity {fourier:.1e}"),
    )
}

fn classical(scenario: &Scenario) -> Outcome {
    let cal = scenario.calibrate().unwrap();
    let frame = TwoLevelFrame::new(cal.model, scenario.pair, scenario.basis(16)).unwrap();
    let (a0, b0) = (scenario.packet.a_mat(), scenario.packet.b_mat());
    let (mut energy, mut sympl): (f64, f64) = (0.0, 0.0);
    for branch in [Branch::Mean, Branch::Level(Level::A), Branch::Level(Level::B)] {
        let v = ModifiedLevel { frame: frame.clone(), branch, delta: 0.05, truncation: 12 };
        let start = ClassicalState::new(-0.5, -0.5, scenario.momentum, 0.0, a0, b0);
        let tr = integrate_classical(&v, &start, &linspace(-0.5, 0.5, 101), &OdeOptions::default()).unwrap();
        energy = energy.max(tr.energy_drift(&v).unwrap());
        sympl = sympl.max(tr.symplectic_drift());
    }
    let delta: f64 = 0.01;
    let t = delta.powf(0.8);
    let env = t.powi(3) + delta.powi(4) / (t * t);
    let mut ratio: f64 = 0.0;
    for level in [Level::A, Level::B] {
        let pm = level.sign();
        let d2 = delta * delta;
        let v = FnPotential {
            value: Arc::new(move |x| Ok(pm * (x * x + d2).sqrt())),
            gradient: Arc::new(move |x| Ok(pm * x / (x * x + d2).sqrt())),
            hessian: Arc::new(move |x| Ok(pm * d2 / (x * x + d2).powf(1.5))),
        };
        let start = ClassicalState::new(0.0, 0.0, 1.0, 0.0, c(1.0, 0.0), c(1.0, 0.0));
        let opts = OdeOptions { rtol: 1e-12, atol: 1e-14, ..OdeOptions::default() };
        for tt in [t, -t] {
            let a = integrate_trajectory(&v, &start, &[tt], &opts).unwrap().states[0].a;
            let (aa, _) = outer_asymptotics(level, tt, delta, 1.0, 0.0, 1.0);
            ratio = ratio.max((a - aa).abs() / env);
        }
    }
    (
        energy < ENERGY_DRIFT_TOL && sympl < SYMPLECTIC_DRIFT_TOL && ratio < 1.0,
        format!("energy drift {energy:.1e}, Re(conj(A)B) drift {sympl:.1e}, asymptotics at {ratio:.2} of envelope"),
    )
}

fn spectrum() -> Outcome {
    let lam = |n: i64, r: f64, b: f64| {
        let v = n as f64 + b * r * r / 2.0;
        v * v / (2.0 * r * r)
    };
    let mut worst: f64 = 0.0;
    for b in [0.5, 1.0, 4.0] {
        for n in -10i64..=10 {
            for &r in &[0.3, 1.0, 2.5] {
                let got = eigenvalue(n, r, b).unwrap();
                worst = worst.max((got - lam(n, r, b)).abs() / got.abs().max(1.0));
                let split = eigenvalue(n, r, b).unwrap() - eigenvalue(-n, r, b).unwrap();
                worst = worst.max((split - b * n as f64).abs() / (b * 10.0));
            }
            for m in -10i64..n {
                if n + m >= 0 {
                    continue;
                }
                let cp = crossing(n, m, b).unwrap();
                let s = (n + m) as f64;
                let d = (n - m) as f64;
                let e = -b / 8.0 * d * d / s;
                worst = worst.max((cp.radius - (-s / b).sqrt()).abs() / cp.radius);
                worst = worst.max((cp.energy - e).abs() / e.abs().max(1.0));
                worst = worst.max((lam(n, cp.radius, b) - e).abs() / e.abs().max(1.0));
            }
        }
    }
    (worst < SPECTRUM_TOL, format!("max relative defect {worst:.1e}"))
}

fn perturbation_order() -> Outcome {
    let p = SurfaceProfile::new(ProfileShape::TanhNeck { base: 1.0, amplitude: 0.4, width: 1.0 }, 1.0);
    let m = FiberModel::new(p, Perturbation::transverse_field(0.8));
    let ds = SWEEP;
    let exact_level = |n: i64, x: f64, d: f64| {
        let basis = ModeBasis::around(n, n, 41);
        let e = m.eigen(x, d, &basis).unwrap();
        let k = basis.index(n).unwrap();
        let j =
            (0..basis.count).max_by(|&a, &b| e.vectors[(k, a)].norm().total_cmp(&e.vectors[(k, b)].norm())).unwrap();
        e.values[j]
    };
    let x = 0.5;
    let s = perturbation_series(&m, 1, x, 0.1, 64).unwrap();
    let iso: Vec<f64> = ds
        .iter()
        .map(|&d| {
            let v2 = m.profile.v2(x, d).unwrap() - m.profile.v2(x, 0.0).unwrap();
            (exact_level(1, x, d) - s.value(d) - v2).abs()
        })
        .collect();
    let frame = TwoLevelFrame::new(m.clone(), (0, -1), ModeBasis::around(0, -1, 24)).unwrap();
    let mut slope_mod = f64::INFINITY;
    for xc in [0.0, 0.03] {
        let pair = surfwave::angular::EffectivePair::new(&frame, xc, 64).unwrap();
        for level in [Level::A, Level::B] {
            let errs: Vec<f64> = ds
                .iter()
                .map(|&d| {
                    let (a, b) = frame.at(xc, d).unwrap().eigenvalues();
                    let exact = if level == Level::A { a } else { b };
                    (exact - surfwave::angular::modified_potential(&pair, level, d)).abs()
                })
                .collect();
            slope_mod = slope_mod.min(loglog_slope(&ds, &errs));
        }
    }
    let slope_iso = loglog_slope(&ds, &iso);
    (
        slope_iso >= ORDER_SLOPE_MIN && slope_mod >= ORDER_SLOPE_MIN,
        format!("isolated series slope {slope_iso:.2}, modified potential slope {slope_mod:.2}"),
    )
}

fn hygiene(scenario: &Scenario, reports: &[DeltaReport]) -> Outcome {
    let drift = reports.iter().map(|r| r.norm_drift_per_time).fold(0.0, f64::max);

    let mut free = Scenario { deltas: vec![0.05], ..scenario.clone() };
    free.coupling = CouplingSpec { terms: free.coupling.terms.clone(), lz_ratio: None };
    for t in &mut free.coupling.terms {
        t.amplitude = 0.0;
    }
    let cal = free.calibrate().unwrap();
    let run = run_crossing(&free, &cal, 0.05).unwrap().report;
    let p0 = run.series[0];
    let modes = run.series.iter().map(|s| (s.p_n - p0.p_n).abs().max((s.p_m - p0.p_m).abs())).fold(0.0, f64::max);

    let cal = scenario.calibrate().unwrap();
    let r = entry(reports, 0.05);
    let d = r.discretization;
    let opts = AssemblyOptions { carrier: d.carrier, energy_shift: d.energy_shift, ..AssemblyOptions::default() };
    let grid = Grid::covering(-0.3, 0.3, d.grid.dx).unwrap();
    let h = build_hamiltonian(&cal.model, 0.05, grid, scenario.basis(d.modes), &opts).unwrap();
    let herm = h.hermiticity_check(100, 11);

    let mut fine = scenario.clone();
    fine.resolution.dx_scale *= 0.5;
    fine.resolution.dt_scale *= 0.5;
    let refined = run_crossing(&fine, &cal, 0.05).unwrap().report;
    let change = (refined.measured_p_a - r.measured_p_a).abs().max((refined.measured_p_b - r.measured_p_b).abs());

    (
        drift < NORM_DRIFT_TOL && modes < MODE_DRIFT_TOL && herm < HERMITICITY_TOL && change < HALVING_TOL,
        format!(
            "norm drift {drift:.1e}/time, W=0 mode drift {modes:.1e} (P_A {:.1e}), Hermiticity {herm:.1e}, halving change {change:.1e}",
            run.measured_p_a
        ),
    )
}

fn special_functions() -> Outcome {
    let d0 = |z: f64| pcf_d(c(0.0, 0.0), c(z, 0.0)).unwrap();
    let d1 = |z: f64| pcf_d(c(1.0, 0.0), c(z, 0.0)).unwrap();
    let closed = (d0(0.0) - 1.0)
        .norm()
        .max((d0(2.0) - (-1.0f64).exp()).norm())
        .max((d1(1.0) - (-0.25f64).exp()).norm())
        .max((d1(-1.3) - (-1.3) * (-1.69f64 / 4.0).exp()).norm());
    let nu = c(0.0, 0.3);
    let z = c(1.0, 1.0);
    let rec = (pcf_d(nu + 1.0, z).unwrap() - z * pcf_d(nu, z).unwrap() + nu * pcf_d(nu - 1.0, z).unwrap()).norm();
    let g = gamma_complex(c(1.0, 1.0)).norm_sqr();
    let gerr = (g - PI / PI.sinh()).abs();
    (
        closed < SPECIAL_TOL && rec < RECURRENCE_TOL && gerr < SPECIAL_TOL,
        format!("closed forms {closed:.1e}, recurrence {rec:.1e}, |Gamma(1+i)|^2 {gerr:.1e}"),
    )
}

fn main() {
    let scenario = headline();
    let cal = scenario.calibrate().expect("headline calibration");
    let (runs, _) = run_convergence_suite(&scenario, &cal).expect("delta sweep");
    let reports: Vec<DeltaReport> = runs.into_iter().map(|r| r.report).collect();
    let head = entry(&reports, 0.05);

    let results: Vec<(&str, Outcome)> = vec![
        ("Landau-Zener unitarity", unitarity()),
        ("headline transition", headline_transition(head)),
        ("convergence trend", convergence_trend(&reports, scenario.exponents.xi)),
        ("pre-crossing BO fidelity", bo_fidelity(head)),
        ("inner ODE residual", inner_residual()),
        ("Hagedorn suite", hagedorn()),
        ("classical invariants", classical(&scenario)),
        ("spectrum exactness", spectrum()),
        ("perturbation order", perturbation_order()),
        ("exact-solver hygiene", hygiene(&scenario, &reports)),
        ("special functions", special_functions()),
    ];
    let mut failed = 0;
    for (k, (name, (pass, detail))) in results.iter().enumerate() {
        println!("criterion {:>2} {} {name}: {detail}", k + 1, if *pass { "PASS" } else { "FAIL" });
        if !pass {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
