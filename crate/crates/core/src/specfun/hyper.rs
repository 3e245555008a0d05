//! Gauss hypergeometric ₂F₁ on the non-positive real axis.

use crate::error::{Error, Result};

const MAX_TERMS: usize = 10_000;
const SERIES_TOL: f64 = 1e-15;
// Rescale the running sum before it leaves the f64 range.
const RESCALE_AT: f64 = 1e250;

/// Which series produced a ₂F₁ value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hyp2f1Path {
    /// Σ (a)_k (b)_k / ((c)_k k!) z^k directly.
    Direct,
    /// (1-z)^{-a} ₂F₁(a, c-b; c; z/(z-1)).
    Pfaff,
}

/// A ₂F₁ value kept as sign and log-magnitude, so that results far below
/// the smallest double remain usable in products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyp2f1Eval {
    pub ln_abs: f64,
    pub sign: f64,
    pub path: Hyp2f1Path,
    pub terms: usize,
    /// Estimated relative error of the value.
    pub rel_error: f64,
}

impl Hyp2f1Eval {
    pub fn value(&self) -> f64 {
        self.sign * self.ln_abs.exp()
    }
}

struct SeriesSum {
    ln_abs: f64,
    sign: f64,
    terms: usize,
    rel_error: f64,
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

fn series(a: f64, b: f64, c: f64, z: f64) -> Result<SeriesSum> {
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut max_abs = 1.0f64;
    let mut ln_scale = 0.0f64;
    let mut k = 0usize;
    loop {
        if k >= MAX_TERMS {
            return Err(Error::numeric(
                format!("2F1({a}, {b}; {c}; {z}) series not converged after {MAX_TERMS} terms"),
                Some(sum * ln_scale.exp()),
            ));
        }
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        k += 1;
        max_abs = max_abs.max(term.abs());
        if term == 0.0 {
            break;
        }
        let kn = k as f64;
        let ratio = ((a + kn) * (b + kn) / ((c + kn) * (kn + 1.0)) * z).abs();
        if ratio < 1.0 {
            let tail = term.abs() * ratio / (1.0 - ratio);
            if tail <= SERIES_TOL * sum.abs() {
                break;
            }
        }
        if sum.abs() > RESCALE_AT {
            sum /= RESCALE_AT;
            term /= RESCALE_AT;
            max_abs /= RESCALE_AT;
            ln_scale += RESCALE_AT.ln();
        }
    }
    if sum == 0.0 {
        return Err(Error::numeric(
            format!("2F1({a}, {b}; {c}; {z}) series cancelled to zero"),
            Some(0.0),
        ));
    }
    let cancellation = max_abs / sum.abs();
    Ok(SeriesSum {
        ln_abs: sum.abs().ln() + ln_scale,
        sign: sum.signum(),
        terms: k,
        rel_error: 4.0 * f64::EPSILON * cancellation * (k as f64).sqrt() + SERIES_TOL,
    })
}

fn check_args(a: f64, b: f64, c: f64, z: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite() && c.is_finite() && z.is_finite()) {
        return Err(Error::domain("2F1 arguments must be finite"));
    }
    if is_nonpositive_integer(c) {
        return Err(Error::domain(format!(
            "2F1 lower parameter c = {c} is a non-positive integer"
        )));
    }
    if z > 0.0 {
        return Err(Error::domain(format!(
            "2F1 evaluator supports z <= 0, got {z}"
        )));
    }
    Ok(())
}

/// ₂F₁(a, b; c; z) for z ≤ 0 through a forced series path.
///
/// The direct path is only offered for z > -1.
pub fn gauss_2f1_via(a: f64, b: f64, c: f64, z: f64, path: Hyp2f1Path) -> Result<Hyp2f1Eval> {
    check_args(a, b, c, z)?;
    if z == 0.0 {
        return Ok(Hyp2f1Eval {
            ln_abs: 0.0,
            sign: 1.0,
            path,
            terms: 0,
            rel_error: 0.0,
        });
    }
    match path {
        Hyp2f1Path::Direct => {
            if z <= -1.0 {
                return Err(Error::domain(format!(
                    "direct 2F1 series diverges at z = {z}"
                )));
            }
            let s = series(a, b, c, z)?;
            Ok(Hyp2f1Eval {
                ln_abs: s.ln_abs,
                sign: s.sign,
                path,
                terms: s.terms,
                rel_error: s.rel_error,
            })
        }
        Hyp2f1Path::Pfaff => {
            let w = z / (z - 1.0);
            let s = series(a, c - b, c, w)?;
            Ok(Hyp2f1Eval {
                ln_abs: s.ln_abs - a * (1.0 - z).ln(),
                sign: s.sign,
                path,
                terms: s.terms,
                rel_error: s.rel_error + 4.0 * f64::EPSILON * (a * (1.0 - z).ln()).abs(),
            })
        }
    }
}

/// ₂F₁(a, b; c; z) for z ≤ 0 with automatic path selection.
///
/// Near the origin the direct series runs; when it cancels badly, fails to
/// converge, or z ≤ -1/2, the Pfaff transform maps the argument into [0, 1)
/// and the better-conditioned of the two results is kept.
pub fn gauss_2f1_eval(a: f64, b: f64, c: f64, z: f64) -> Result<Hyp2f1Eval> {
    check_args(a, b, c, z)?;
    if z > -0.5 {
        let direct = gauss_2f1_via(a, b, c, z, Hyp2f1Path::Direct);
        match direct {
            Ok(d) if d.rel_error < 1e-12 => return Ok(d),
            Ok(d) => {
                return Ok(match gauss_2f1_via(a, b, c, z, Hyp2f1Path::Pfaff) {
                    Ok(p) if p.rel_error < d.rel_error => p,
                    _ => d,
                })
            }
            Err(_) => return gauss_2f1_via(a, b, c, z, Hyp2f1Path::Pfaff),
        }
    }
    gauss_2f1_via(a, b, c, z, Hyp2f1Path::Pfaff)
}

/// Gauss hypergeometric function ₂F₁(a, b; c; z) for z ≤ 0.
pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    gauss_2f1_eval(a, b, c, z).map(|e| e.value())
}
