//! Complex log-gamma (Lanczos, g = 7) with reflection for `Re z < 1/2`.

use std::f64::consts::PI;

use num_complex::Complex64;

const G: f64 = 7.0;
const COEF: [f64; 9] = [
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

/// `ln Γ(z)`. The imaginary part is only defined modulo `2π`; callers in this
/// crate use the real part, `ln |Γ(z)|`.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Γ(z)Γ(1-z) = π / sin(πz)
        return Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut x = Complex64::new(COEF[0], 0.0);
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// `ln sin(πz)` without overflow for large `|Im z|`.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im.abs() < 20.0 {
        return (Complex64::new(PI, 0.0) * z).sin().ln();
    }
    if z.im < 0.0 {
        return ln_sin_pi(z.conj()).conj();
    }
    // sin(πz) = e^{−iπz} (1 − e^{2iπz}) / (2i), with |e^{2iπz}| < e^{−40π}
    let i = Complex64::new(0.0, 1.0);
    let e = (2.0 * i * PI * z).exp();
    -i * PI * z + (1.0 - e).ln() - (2.0 * i).ln()
}

/// `ln |Γ(z)|`.
pub fn ln_abs_gamma(z: Complex64) -> f64 {
    ln_gamma(z).re
}

/// Real `ln Γ(x)` for `x > 0`.
pub fn ln_gamma_real(x: f64) -> f64 {
    ln_gamma(Complex64::new(x, 0.0)).re
}

/// `ln(1 + w)` for small complex `w`.
fn ln_1p_small(w: Complex64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut pw = w;
    for n in 1..=12 {
        let term = pw / n as f64;
        sum += if n % 2 == 1 { term } else { -term };
        pw *= w;
    }
    sum
}

fn stirling_correction(z: Complex64) -> Complex64 {
    let z2 = z * z;
    (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * z2)) / z2) / z2) / z
}

/// `ln |Γ(x1 + iy)| − ln |Γ(x2 + iy)|`, free of cancellation for large `|y|`.
pub fn ln_abs_gamma_ratio(x1: f64, x2: f64, y: f64) -> f64 {
    let y = y.abs();
    if y < 1e3 || (x1 - x2).abs() > 8.0 {
        return ln_abs_gamma(Complex64::new(x1, y)) - ln_abs_gamma(Complex64::new(x2, y));
    }
    let (z1, z2) = (Complex64::new(x1, y), Complex64::new(x2, y));
    let dz = z1 - z2;
    let l = ln_1p_small(dz / z2);
    ((z2 - 0.5) * l + dz * z1.ln() - dz + stirling_correction(z1) - stirling_correction(z2)).re
}
