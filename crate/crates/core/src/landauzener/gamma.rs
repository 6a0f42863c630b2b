//! Complex gamma function: Lanczos approximation with reflection.

use std::f64::consts::PI;

use num_complex::Complex64;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// `ln Γ(z)` for `Re z ≥ 1/2` (principal branch of the Lanczos form).
fn ln_gamma_right(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut a = Complex64::new(LANCZOS[0], 0.0);
    let t = z + LANCZOS_G + 0.5;
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

/// `Γ(z)`; infinite at the non-positive integers.
pub fn gamma_complex(z: Complex64) -> Complex64 {
    if is_nonpositive_integer(z) {
        return Complex64::new(f64::INFINITY, 0.0);
    }
    if z.re < 0.5 {
        PI / ((PI * z).sin() * gamma_complex(1.0 - z))
    } else {
        ln_gamma_right(z).exp()
    }
}

/// `1/Γ(z)`, an entire function: exactly zero at the non-positive integers.
pub fn rgamma(z: Complex64) -> Complex64 {
    if is_nonpositive_integer(z) {
        return Complex64::new(0.0, 0.0);
    }
    if z.re < 0.5 {
        (PI * z).sin() * gamma_complex(1.0 - z) / PI
    } else {
        (-ln_gamma_right(z)).exp()
    }
}
