//! Adaptive Dormand–Prince 5(4) integrator that lands exactly on the
//! requested output times.

use crate::error::{Error, Result};

/// Step-size control settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub initial_step: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, initial_step: 1e-4, max_step: f64::INFINITY, max_steps: 2_000_000 }
    }
}

/// Failure inside the right-hand side, with the last accepted state.
#[derive(Debug)]
pub struct OdeFailure<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub error: Error,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

/// Integrates `y' = f(t, y)` from `(t0, y0)` and returns `y` at each of
/// `t_eval`, which must be monotone in the direction of integration.
pub fn solve<const N: usize, F>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_eval: &[f64],
    opts: &OdeOptions,
) -> std::result::Result<Vec<[f64; N]>, OdeFailure<N>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let fail = |t: f64, y: [f64; N], error: Error| OdeFailure { t, y, error };
    let Some(&last) = t_eval.last() else {
        return Ok(Vec::new());
    };
    let dir = if last >= t0 { 1.0 } else { -1.0 };
    let mut prev = t0;
    for &t in t_eval {
        if (t - prev) * dir < 0.0 {
            return Err(fail(t0, y0, Error::InvalidParameters("output times are not monotone".into())));
        }
        prev = t;
    }

    let mut out = Vec::with_capacity(t_eval.len());
    let mut t = t0;
    let mut y = y0;
    let mut h = opts.initial_step.min(opts.max_step);
    let mut k0 = f(t, &y).map_err(|e| fail(t, y, e))?;
    let mut steps = 0usize;
    for &target in t_eval {
        while (target - t) * dir > 0.0 {
            steps += 1;
            if steps > opts.max_steps {
                return Err(fail(t, y, Error::InvalidParameters(format!("more than {} steps", opts.max_steps))));
            }
            let remaining = (target - t).abs();
            let hit = h >= remaining;
            let step = if hit { remaining } else { h } * dir;
            let mut k = [[0.0; N]; 7];
            k[0] = k0;
            let mut stage_error = None;
            for s in 1..7 {
                let mut ys = y;
                for i in 0..N {
                    let mut acc = 0.0;
                    for (j, kj) in k.iter().enumerate().take(s) {
                        acc += A[s][j] * kj[i];
                    }
                    ys[i] += step * acc;
                }
                match f(t + C[s] * step, &ys) {
                    Ok(v) => k[s] = v,
                    Err(e) => {
                        stage_error = Some(e);
                        break;
                    }
                }
            }
            if let Some(e) = stage_error {
                if h.abs() < 1e-14 * (1.0 + t.abs()) {
                    return Err(fail(t, y, e));
                }
                h *= 0.25;
                continue;
            }
            let mut y5 = y;
            let mut err = 0.0f64;
            for i in 0..N {
                let mut d5 = 0.0;
                let mut d4 = 0.0;
                for s in 0..7 {
                    d5 += B5[s] * k[s][i];
                    d4 += B4[s] * k[s][i];
                }
                y5[i] = y[i] + step * d5;
                let sc = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
                err = err.max((step * (d5 - d4)).abs() / sc);
            }
            if !err.is_finite() {
                h *= 0.25;
                continue;
            }
            if err <= 1.0 {
                t = if hit { target } else { t + step };
                y = y5;
                k0 = k[6];
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if !(hit && err <= 1.0) || factor < 1.0 {
                h = (step.abs() * factor).min(opts.max_step);
            }
        }
        out.push(y);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn harmonic_quarter_period() {
        let ts = [std::f64::consts::FRAC_PI_2];
        let ys = solve(|_, y: &[f64; 2]| Ok([y[1], -y[0]]), 0.0, [0.0, 1.0], &ts, &OdeOptions::default()).unwrap();
        assert_relative_eq!(ys[0][0], 1.0, epsilon = 1e-9);
        assert!(ys[0][1].abs() < 1e-9);
    }

    #[test]
    fn backward_integration_and_exact_times() {
        let ts: Vec<f64> = (1..=10).map(|k| -0.1 * k as f64).collect();
        let ys = solve(|_, y: &[f64; 1]| Ok([y[0]]), 0.0, [1.0], &ts, &OdeOptions::default()).unwrap();
        for (t, y) in ts.iter().zip(&ys) {
            assert_relative_eq!(y[0], t.exp(), max_relative = 1e-9);
        }
    }

    #[test]
    fn rhs_failure_reports_last_state() {
        let r = solve(
            |_, y: &[f64; 1]| {
                if y[0] > 1.5 {
                    Err(Error::InvalidRadius(y[0]))
                } else {
                    Ok([1.0])
                }
            },
            0.0,
            [0.0],
            &[3.0],
            &OdeOptions::default(),
        );
        let e = r.unwrap_err();
        assert!(e.y[0] <= 1.5 && e.y[0] > 1.4);
    }

    #[test]
    fn rejects_non_monotone_outputs() {
        assert!(solve(|_, y: &[f64; 1]| Ok([y[0]]), 0.0, [1.0], &[0.5, 0.2], &OdeOptions::default()).is_err());
    }
}
