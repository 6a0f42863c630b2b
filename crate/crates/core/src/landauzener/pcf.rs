//! Parabolic cylinder function `D_ν(z)` for complex order and argument.
//!
//! Three evaluators are combined:
//!
//! - the Maclaurin expansion through Kummer's function, accurate for small
//!   `|z|` where cancellation stays below a few thousand;
//! - the Poincaré expansion for large `|z|`, with the second exponential
//!   switched on beyond the Stokes line `|arg z| = π/2`;
//! - Taylor-series continuation of Weber's equation
//!   `w'' = (z²/4 − ν − 1/2) w` along the ray through `z`, started from
//!   whichever end makes `D_ν` the growing solution.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use super::gamma::{gamma_complex, rgamma};
use crate::error::{Error, Result};

/// How `D_ν(z)` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcfMethod {
    Auto,
    Series,
    Asymptotic,
    Continuation,
}

/// Switch radii and the argument cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcfOptions {
    /// Largest `|z|` handled by the power series.
    pub series_radius: f64,
    /// Smallest `|z|` handled by the asymptotic expansion.
    pub asymptotic_radius: f64,
    /// Largest accepted `|z|`.
    pub max_abs: f64,
}

impl Default for PcfOptions {
    fn default() -> Self {
        Self { series_radius: 4.0, asymptotic_radius: 12.0, max_abs: 50.0 }
    }
}

const TINY: f64 = 1e-17;
const MAX_TERMS: usize = 2000;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Kummer's `M(a, b, w)` by its power series.
fn kummer_m(a: Complex64, b: Complex64, w: Complex64) -> Result<Complex64> {
    let mut term = c(1.0);
    let mut sum = c(1.0);
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) / (b + kf) * w / (kf + 1.0);
        sum += term;
        if term.norm() <= TINY * sum.norm() && kf > w.norm() {
            return Ok(sum);
        }
    }
    Err(Error::SeriesDivergence(format!("Kummer series M({a}, {b}, {w}) did not converge in {MAX_TERMS} terms")))
}

/// `D_ν(z)` from the even/odd solutions of Weber's equation at the origin.
pub fn pcf_series(nu: Complex64, z: Complex64) -> Result<Complex64> {
    let sqrt_pi = PI.sqrt();
    let d0 = c(2.0).powc(nu / 2.0) * sqrt_pi * rgamma((1.0 - nu) / 2.0);
    let d1 = -c(2.0).powc((nu + 1.0) / 2.0) * sqrt_pi * rgamma(-nu / 2.0);
    let w = z * z / 2.0;
    let e = (-z * z / 4.0).exp();
    let mut out = c(0.0);
    if d0 != c(0.0) {
        out += d0 * e * kummer_m(-nu / 2.0, c(0.5), w)?;
    }
    if d1 != c(0.0) {
        out += d1 * z * e * kummer_m((1.0 - nu) / 2.0, c(1.5), w)?;
    }
    Ok(out)
}

/// Sum of `Σ_s (±1)^s (p)_{2s} / (s! (2z²)^s)` up to its smallest term.
fn poincare_sum(p: Complex64, z: Complex64, alternating: bool) -> Complex64 {
    let x = 1.0 / (2.0 * z * z);
    let mut term = c(1.0);
    let mut sum = c(1.0);
    let mut last = f64::INFINITY;
    for s in 0..MAX_TERMS {
        let sf = s as f64;
        let mut next = term * (p + 2.0 * sf) * (p + 2.0 * sf + 1.0) / (sf + 1.0) * x;
        if alternating {
            next = -next;
        }
        let size = next.norm();
        if size > last {
            break;
        }
        sum += next;
        term = next;
        last = size;
        if size <= TINY * sum.norm() {
            break;
        }
    }
    sum
}

/// Poincaré expansion of `D_ν(z)` for large `|z|`.
pub fn pcf_asymptotic(nu: Complex64, z: Complex64) -> Complex64 {
    let main = (-z * z / 4.0).exp() * z.powc(nu) * poincare_sum(-nu, z, true);
    let arg = z.arg();
    if arg.abs() <= PI / 2.0 {
        return main;
    }
    let sign = if arg > 0.0 { 1.0 } else { -1.0 };
    let rg = rgamma(-nu);
    if rg == c(0.0) {
        return main;
    }
    let second = (2.0 * PI).sqrt()
        * rg
        * (Complex64::i() * sign * PI * nu).exp()
        * (z * z / 4.0).exp()
        * z.powc(-nu - 1.0)
        * poincare_sum(nu + 1.0, z, false);
    main - second
}

/// Value and derivative `D'_ν = (z/2) D_ν − D_{ν+1}` with a fixed method.
fn value_and_slope(
    nu: Complex64,
    z: Complex64,
    eval: &dyn Fn(Complex64, Complex64) -> Result<Complex64>,
) -> Result<(Complex64, Complex64)> {
    let d = eval(nu, z)?;
    let up = eval(nu + 1.0, z)?;
    Ok((d, z / 2.0 * d - up))
}

/// Integrates Weber's equation from `z0` to `z1` on a straight segment.
fn continue_weber(
    nu: Complex64,
    z0: Complex64,
    w0: Complex64,
    dw0: Complex64,
    z1: Complex64,
) -> Result<(Complex64, Complex64)> {
    let span = z1 - z0;
    let len = span.norm();
    if len == 0.0 {
        return Ok((w0, dw0));
    }
    let steps = (len / 0.25).ceil().max(1.0) as usize;
    let h = span / steps as f64;
    let (mut w, mut dw) = (w0, dw0);
    let mut zc = z0;
    let mut coef = vec![c(0.0); 160];
    for _ in 0..steps {
        let q0 = zc * zc / 4.0 - nu - 0.5;
        let q1 = zc / 2.0;
        let q2 = c(0.25);
        coef[0] = w;
        coef[1] = dw;
        let mut val = w + dw * h;
        let mut der = dw;
        let mut hp = h;
        let mut converged = false;
        for k in 0..coef.len() - 2 {
            let mut acc = q0 * coef[k];
            if k >= 1 {
                acc += q1 * coef[k - 1];
            }
            if k >= 2 {
                acc += q2 * coef[k - 2];
            }
            let next = acc / (((k + 2) * (k + 1)) as f64);
            coef[k + 2] = next;
            der += next * (k + 2) as f64 * hp;
            hp *= h;
            let t = next * hp;
            val += t;
            if k > 4
                && t.norm() <= TINY * val.norm()
                && (next * (k + 2) as f64 * hp / h).norm() <= TINY * der.norm().max(val.norm())
            {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::SeriesDivergence(format!("Taylor step at z = {zc} did not converge")));
        }
        w = val;
        dw = der;
        zc += h;
    }
    Ok((w, dw))
}

/// `D_ν(z)` by ODE continuation along the ray through `z`.
pub fn pcf_continuation(nu: Complex64, z: Complex64, opts: &PcfOptions) -> Result<Complex64> {
    let r = z.norm();
    if r == 0.0 {
        return pcf_series(nu, z);
    }
    let dir = z / r;
    let series = |n: Complex64, x: Complex64| pcf_series(n, x);
    let asym = |n: Complex64, x: Complex64| Ok(pcf_asymptotic(n, x));
    if z.arg().abs() < FRAC_PI_4 {
        // D_ν is recessive here: come in from large |z|.
        let start = dir * opts.asymptotic_radius.max(r);
        let (w, dw) = value_and_slope(nu, start, &asym)?;
        Ok(continue_weber(nu, start, w, dw, z)?.0)
    } else {
        let start = dir * opts.series_radius.min(r);
        let (w, dw) = value_and_slope(nu, start, &series)?;
        Ok(continue_weber(nu, start, w, dw, z)?.0)
    }
}

fn check_abs(z: Complex64, opts: &PcfOptions) -> Result<()> {
    if !(z.norm() <= opts.max_abs) {
        return Err(Error::InvalidParameters(format!(
            "|z| = {} exceeds the configured maximum {}",
            z.norm(),
            opts.max_abs
        )));
    }
    Ok(())
}

/// `D_ν(z)` with explicit method and options.
pub fn pcf_d_with(nu: Complex64, z: Complex64, method: PcfMethod, opts: &PcfOptions) -> Result<Complex64> {
    check_abs(z, opts)?;
    let out = match method {
        PcfMethod::Series => pcf_series(nu, z)?,
        PcfMethod::Asymptotic => pcf_asymptotic(nu, z),
        PcfMethod::Continuation => pcf_continuation(nu, z, opts)?,
        PcfMethod::Auto => {
            let r = z.norm();
            if r <= opts.series_radius {
                pcf_series(nu, z)?
            } else if r >= opts.asymptotic_radius {
                pcf_asymptotic(nu, z)
            } else {
                pcf_continuation(nu, z, opts)?
            }
        }
    };
    if !out.re.is_finite() || !out.im.is_finite() {
        return Err(Error::SeriesDivergence(format!("D_{nu}({z}) evaluated to a non-finite value")));
    }
    Ok(out)
}

/// `D_ν(z)` with automatic method selection and `|z| ≤ 50`.
pub fn pcf_d(nu: Complex64, z: Complex64) -> Result<Complex64> {
    pcf_d_with(nu, z, PcfMethod::Auto, &PcfOptions::default())
}

/// `Γ` re-exported for callers that combine it with `D_ν`.
pub fn gamma(z: Complex64) -> Complex64 {
    gamma_complex(z)
}
