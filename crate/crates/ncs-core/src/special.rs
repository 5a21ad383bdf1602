//! Gamma-family functions and the Bessel function J₀.
//!
//! Everything is built on the Stirling series, used only where |z| ≥ 15 and
//! reached through the recurrence `Γ(z) = Γ(z+N) / z(z+1)…(z+N−1)`. Real Γ is
//! anchored at an argument in [15, 16) and carried to x by exact-ish
//! multiplications, which keeps its relative error near 1e−15 over the whole
//! representable range (statrs is an order of magnitude or two worse here, too
//! coarse for the polynomial-exactness checks of the quadrature rules).
//!
//! Only `exp(ln Γ)` is ever used downstream, so the branch of the complex
//! logarithm is irrelevant and no attempt is made to keep it continuous.

use num_complex::Complex64;
use std::f64::consts::PI;

/// `B_{2k} / (2k (2k−1))` for k = 1..8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

/// Real part of the argument beyond which the asymptotic series is used directly.
const SHIFT_TO: f64 = 15.0;

fn stirling_tail(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut pow = inv;
    for c in STIRLING {
        series += pow * c;
        pow *= inv2;
    }
    series
}

fn stirling_real(x: f64) -> f64 {
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + stirling_tail(x)
}

/// Γ(x) for real x, with reflection below 1/2. Poles give ±∞ or NaN.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    if x > 171.7 {
        return f64::INFINITY;
    }
    let base = SHIFT_TO + (x - SHIFT_TO).rem_euclid(1.0);
    // multiplicative Stirling form: exp of the full log would cost a few ulps of 25
    let mut g = (2.0 * PI).sqrt() * base.powf(base - 0.5) * (-base).exp() * stirling_tail(base).exp();
    if x >= base {
        let mut z = base;
        while z < x - 0.5 {
            g *= z;
            z += 1.0;
        }
    } else {
        let mut z = base;
        while z > x + 0.5 {
            z -= 1.0;
            g /= z;
        }
    }
    g
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    if x > 0.5 && x < 170.0 {
        return gamma(x).ln();
    }
    if x < SHIFT_TO {
        // sum of logs, not log of product: the product can underflow near 0
        let mut z = x;
        let mut shift = 0.0;
        while z < SHIFT_TO {
            shift += z.ln();
            z += 1.0;
        }
        stirling_real(z) - shift
    } else {
        stirling_real(x)
    }
}

/// Complex ln Γ(z), valid away from the poles at z = 0, −1, −2, …
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    // The series is accurate once |z| ≥ 15 away from the negative axis. The
    // shift is accumulated as one product (at most ~20 factors of modest
    // size) and a single logarithm; the branch does not matter.
    let mut z = z;
    let mut prod = Complex64::new(1.0, 0.0);
    while z.norm_sqr() < SHIFT_TO * SHIFT_TO || z.re < 0.0 {
        prod *= z;
        z += 1.0;
    }
    let shift = if prod == Complex64::new(1.0, 0.0) { Complex64::new(0.0, 0.0) } else { prod.ln() };
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING {
        series += pow * c;
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series - shift
}

/// ln of the Pochhammer ratio Γ(a+n)/Γ(a) for a > 0, via ln Γ.
pub fn ln_pochhammer(a: f64, n: f64) -> f64 {
    ln_gamma(a + n) - ln_gamma(a)
}

/// Bessel function of the first kind, order zero.
///
/// Periodic trapezoid rule on `J₀(w) = (1/2π) ∫₀^{2π} cos(w sin θ) dθ`. The
/// aliasing error is of order `J_N(w)`, below 1e−30 for N ≥ 2|w| + 40.
pub fn bessel_j0(w: f64) -> f64 {
    let n = (2.0 * w.abs()).ceil() as usize + 40;
    let h = 2.0 * PI / n as f64;
    let sum: f64 = (0..n).map(|j| (w * (h * j as f64).sin()).cos()).sum();
    sum / n as f64
}
