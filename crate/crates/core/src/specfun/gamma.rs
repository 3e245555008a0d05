use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

// Lanczos approximation, g = 607/128, 15 terms.
const LANCZOS_G_HALF: f64 = 5.242_187_5;
const LANCZOS_C0: f64 = 0.999_999_999_999_997_1;
const LANCZOS: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];

/// ln Γ(x) for x > 0 without argument checks.
pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    let t = x + LANCZOS_G_HALF;
    let mut ser = LANCZOS_C0;
    let mut y = x;
    for c in LANCZOS {
        y += 1.0;
        ser += c / y;
    }
    (x + 0.5) * t.ln() - t + LN_SQRT_2PI + (ser / x).ln()
}

/// Natural logarithm of the gamma function for positive real arguments.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    Ok(ln_gamma_unchecked(x))
}

/// Digamma ψ(x) = d/dx ln Γ(x) for x > 0.
///
/// Upward recurrence to x ≥ 10 followed by the asymptotic expansion.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::domain(format!("digamma requires x > 0, got {x}")));
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2
                                        * (1.0 / 132.0
                                            - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    Ok(acc + x.ln() - 0.5 * inv - tail)
}

/// ln B(x, y), evaluated as a sum of log-gammas.
pub fn ln_beta(x: f64, y: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0 && y.is_finite() && y > 0.0) {
        return Err(Error::domain(format!(
            "beta requires x, y > 0, got ({x}, {y})"
        )));
    }
    Ok(ln_gamma_unchecked(x) + ln_gamma_unchecked(y) - ln_gamma_unchecked(x + y))
}

/// Euler beta function B(x, y) = Γ(x)Γ(y)/Γ(x+y).
pub fn beta(x: f64, y: f64) -> Result<f64> {
    ln_beta(x, y).map(f64::exp)
}

fn lanczos_complex(z: Complex64) -> Complex64 {
    let t = z + LANCZOS_G_HALF;
    let mut ser = Complex64::new(LANCZOS_C0, 0.0);
    let mut y = z;
    for c in LANCZOS {
        y += 1.0;
        ser += c / y;
    }
    (z + 0.5) * t.ln() - t + LN_SQRT_2PI + (ser / z).ln()
}

// ln sin(πz), stable for large |Im z|. The branch of the imaginary part is
// irrelevant to callers, which only exponentiate.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im < 0.0 {
        return ln_sin_pi(z.conj()).conj();
    }
    if z.im < 5.0 {
        return (z * PI).sin().ln();
    }
    // sin(πz) = (i/2) e^{-iπz} (1 - e^{2iπz})
    let i = Complex64::i();
    let e2 = (i * 2.0 * PI * z).exp();
    Complex64::new(0.5f64.ln(), PI / 2.0) - i * PI * z + (Complex64::new(1.0, 0.0) - e2).ln()
}

/// Principal-ish ln Γ(z) for complex z away from the poles.
///
/// The real part is ln|Γ(z)|; the imaginary part is correct modulo 2π, which
/// is all that exponentiation needs. Real negative non-integers are
/// supported, the sign of Γ shows up as an imaginary part of π.
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - lanczos_complex(Complex64::new(1.0, 0.0) - z)
    } else {
        lanczos_complex(z)
    }
}

/// ln|Γ(x)| and sign(Γ(x)) for real x that is not a non-positive integer.
pub(crate) fn ln_gamma_signed(x: f64) -> (f64, f64) {
    if x > 0.0 {
        return (ln_gamma_unchecked(x), 1.0);
    }
    let v = ln_gamma_complex(Complex64::new(x, 0.0));
    // Γ(x) for x in (-k-1, -k) has sign (-1)^{k+1}
    let k = (-x).floor();
    let sign = if (k as i64) % 2 == 0 { -1.0 } else { 1.0 };
    (v.re, sign)
}
