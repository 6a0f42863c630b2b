//! Smooth cutoff `F` with `F = 1` on `[0, 1]` and `F = 0` on `[2, ∞)`.

fn bump(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

/// `F(r)` for `r ≥ 0`.
pub fn smooth_cutoff(r: f64) -> f64 {
    let up = bump(2.0 - r);
    let down = bump(r - 1.0);
    if up + down == 0.0 {
        0.0
    } else {
        up / (up + down)
    }
}

/// `F(|x − center| / δ^{1−δ′})`.
pub fn cutoff(x: f64, center: f64, delta: f64, delta_prime: f64) -> f64 {
    smooth_cutoff((x - center).abs() / delta.powf(1.0 - delta_prime))
}
