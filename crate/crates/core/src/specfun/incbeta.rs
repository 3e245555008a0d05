use super::gamma::ln_gamma_unchecked;
use crate::error::{Error, Result};

const MAX_ITER: usize = 10_000;

// Modified Lentz evaluation of the incomplete-beta continued fraction.
fn beta_cf(a: f64, b: f64, x: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            return Ok(h);
        }
    }
    Err(Error::numeric(
        format!("incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})"),
        Some(h),
    ))
}

/// Regularized incomplete beta I_x(a, b).
pub fn beta_reg(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::domain(format!(
            "incomplete beta requires a, b > 0, got ({a}, {b})"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!(
            "incomplete beta requires x in [0, 1], got {x}"
        )));
    }
    if x == 0.0 || x == 1.0 {
        return Ok(x);
    }
    let ln_front = ln_gamma_unchecked(a + b) - ln_gamma_unchecked(a) - ln_gamma_unchecked(b)
        + a * x.ln()
        + b * (-x).ln_1p();
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok((ln_front.exp() * beta_cf(a, b, x)? / a).clamp(0.0, 1.0))
    } else {
        Ok((1.0 - ln_front.exp() * beta_cf(b, a, 1.0 - x)? / b).clamp(0.0, 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elementary_cases() {
        // I_x(1, b) = 1 - (1-x)^b
        for &(b, x) in &[(2.0, 0.5), (5.0, 0.1), (0.5, 0.9)] {
            let want = 1.0 - (1.0f64 - x).powf(b);
            assert!((beta_reg(1.0, b, x).unwrap() - want).abs() < 1e-14);
        }
        // I_x(a, 1) = x^a
        assert!((beta_reg(3.5, 1.0, 0.3).unwrap() - 0.3f64.powf(3.5)).abs() < 1e-14);
        // symmetry I_x(a,b) = 1 - I_{1-x}(b,a)
        let s = beta_reg(7.0, 13.0, 0.4).unwrap() + beta_reg(13.0, 7.0, 0.6).unwrap();
        assert!((s - 1.0).abs() < 1e-14);
        assert_eq!(beta_reg(2.0, 3.0, 0.0).unwrap(), 0.0);
        assert_eq!(beta_reg(2.0, 3.0, 1.0).unwrap(), 1.0);
        assert!(beta_reg(2.0, 3.0, 1.5).is_err());
        assert!(beta_reg(0.0, 3.0, 0.5).is_err());
    }
}
