//! Small-`t` outer expansion of the level trajectories near the crossing.

use crate::angular::{Level, NormalForm};

/// `(a, η)` of the level-`C` trajectory in the normal-form frame where
/// `β = r x`, `γ = r δ`.
///
/// `eta0` is the level's own crossing momentum `η^C(0)` and `dv3` the
/// slope `∂ₓV₃(0, δ)`. Valid for `|t| ≫ δ` and `t³ ≪ δ²`; negative times
/// follow from time reversal of the positive branch.
pub fn outer_asymptotics(level: Level, t: f64, delta: f64, eta0: f64, dv3: f64, r: f64) -> (f64, f64) {
    let pm = level.sign();
    let sg = t.signum();
    let tt = t.abs();
    let e2 = eta0 * eta0;
    let d2 = delta * delta;
    let bracket =
        t * tt / 2.0 + sg * d2 * tt.ln() / (2.0 * e2) + sg * d2 / (4.0 * e2) * (1.0 + 2.0 * (2.0 * eta0).ln())
            - sg * d2 * delta.ln() / (2.0 * e2);
    let dbracket = tt + d2 / (2.0 * e2 * tt);
    let a = -dv3 * t * t / 2.0 + eta0 * t + pm * r / eta0 * delta * t - pm * r * bracket;
    let eta = -dv3 * t + eta0 + pm * r / eta0 * delta - pm * r * dbracket;
    (a, eta)
}

/// [`outer_asymptotics`] in physical units, mapped through the normal form
/// `β ≈ b₁x`, `γ ≈ c₂δ`.
pub fn outer_asymptotics_physical(
    nf: &NormalForm,
    level: Level,
    t: f64,
    delta: f64,
    eta0: f64,
    dv3: f64,
) -> (f64, f64) {
    let r = nf.r();
    let dv3r = r * dv3 / nf.b1;
    let (a, eta) =
        outer_asymptotics(level, nf.t_to_rescaled(t), nf.delta_to_rescaled(delta), nf.eta_to_rescaled(eta0), dv3r, r);
    (a / nf.b1, nf.eta_from_rescaled(eta))
}
