//! Numerical Meijer G-function on the positive real axis.
//!
//! ```text
//!              1    ⌠  ∏_{j≤m} Γ(b_j − s) ∏_{j≤n} Γ(1 − a_j + s)
//! G(z)  =  ──────── │  ───────────────────────────────────────────── z^s ds
//!           2πi     ⌡L ∏_{j>m} Γ(1 − b_j + s) ∏_{j>n} Γ(a_j − s)
//! ```
//!
//! Three evaluation routes, tried in order by [`meijer_g`]:
//!
//! 1. the elementary identity G^{1,1}_{1,1}[z | α; β] = Γ(1−α+β) z^β (1+z)^{α−β−1};
//! 2. Slater's residue sum over the right poles (or, after z → 1/z, over the
//!    left poles) when those poles are all simple and the series converges
//!    quickly;
//! 3. direct quadrature of the Mellin-Barnes integrand along a vertical line
//!    Re s = c separating the two pole families. This is the reference route
//!    and the only one that copes with coincident (higher order) poles.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::gamma::{ln_gamma_complex, ln_gamma_signed, ln_gamma_unchecked};
use super::legendre::{gauss_legendre, GL_ORDER};
use crate::error::{Error, Result};

const INT_TOL: f64 = 1e-9;
const MAX_EVALS: usize = 100_000;
const MAX_RESIDUE_TERMS: usize = 5_000;
const PANEL_REL_TOL: f64 = 1e-12;
/// Truncate the contour once the integrand falls this far below its peak.
const LN_TRUNCATION: f64 = -41.446_531_673_892_82; // ln(1e-18)
const MAX_CONTOUR_HEIGHT: f64 = 1e4;

fn near_integer(x: f64) -> bool {
    (x - x.round()).abs() < INT_TOL
}

fn nonpositive_integer(x: f64) -> bool {
    x < 0.5 && near_integer(x)
}

/// Parameters of G^{m,n}_{p,q}[z | a_front, a_rest ; b_front, b_rest].
///
/// `m = b_front.len()`, `n = a_front.len()`, `p = n + a_rest.len()`,
/// `q = m + b_rest.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeijerGSpec {
    a_front: Vec<f64>,
    a_rest: Vec<f64>,
    b_front: Vec<f64>,
    b_rest: Vec<f64>,
    argument: f64,
}

impl MeijerGSpec {
    /// Validate and build a spec.
    ///
    /// Rejects a non-positive or non-finite argument and any pair with
    /// `a_front[k] − b_front[j]` a positive integer, for which left and right
    /// poles collide and the function is undefined.
    pub fn new(
        a_front: Vec<f64>,
        a_rest: Vec<f64>,
        b_front: Vec<f64>,
        b_rest: Vec<f64>,
        argument: f64,
    ) -> Result<Self> {
        let all = a_front.iter().chain(&a_rest).chain(&b_front).chain(&b_rest);
        if all.clone().any(|v| !v.is_finite()) {
            return Err(Error::domain("Meijer G parameters must be finite"));
        }
        if !(argument.is_finite() && argument > 0.0) {
            return Err(Error::domain(format!(
                "Meijer G argument must be positive, got {argument}"
            )));
        }
        if a_front.is_empty() && b_front.is_empty() {
            return Err(Error::domain("Meijer G needs m > 0 or n > 0"));
        }
        for (k, a) in a_front.iter().enumerate() {
            for (j, b) in b_front.iter().enumerate() {
                let d = a - b;
                if d > 0.5 && near_integer(d) {
                    return Err(Error::domain(format!(
                        "a_front[{k}] - b_front[{j}] = {d} is a positive integer: left and right poles collide"
                    )));
                }
            }
        }
        Ok(Self {
            a_front,
            a_rest,
            b_front,
            b_rest,
            argument,
        })
    }

    pub fn with_argument(&self, argument: f64) -> Result<Self> {
        Self::new(
            self.a_front.clone(),
            self.a_rest.clone(),
            self.b_front.clone(),
            self.b_rest.clone(),
            argument,
        )
    }

    /// (m, n, p, q).
    pub fn orders(&self) -> (usize, usize, usize, usize) {
        let m = self.b_front.len();
        let n = self.a_front.len();
        (m, n, n + self.a_rest.len(), m + self.b_rest.len())
    }

    pub fn a_front(&self) -> &[f64] {
        &self.a_front
    }
    pub fn a_rest(&self) -> &[f64] {
        &self.a_rest
    }
    pub fn b_front(&self) -> &[f64] {
        &self.b_front
    }
    pub fn b_rest(&self) -> &[f64] {
        &self.b_rest
    }
    pub fn argument(&self) -> f64 {
        self.argument
    }

    /// Cancel Γ-factor pairs that appear in both numerator and denominator
    /// (a_front against b_rest, b_front against a_rest).
    fn reduced(&self) -> Self {
        let mut out = self.clone();
        cancel_pairs(&mut out.a_front, &mut out.b_rest);
        cancel_pairs(&mut out.b_front, &mut out.a_rest);
        out
    }

    /// G^{m,n}_{p,q}(z | a; b) = G^{n,m}_{q,p}(1/z | 1−b; 1−a).
    fn inverted(&self) -> Self {
        let flip = |v: &[f64]| v.iter().map(|x| 1.0 - x).collect::<Vec<_>>();
        Self {
            a_front: flip(&self.b_front),
            a_rest: flip(&self.b_rest),
            b_front: flip(&self.a_front),
            b_rest: flip(&self.a_rest),
            argument: 1.0 / self.argument,
        }
    }

    /// ln of the Γ-ratio in the integrand (without z^s).
    fn ln_kernel(&self, s: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for &b in &self.b_front {
            acc += ln_gamma_complex(b - s);
        }
        for &a in &self.a_front {
            acc += ln_gamma_complex(one - a + s);
        }
        for &b in &self.b_rest {
            acc -= ln_gamma_complex(one - b + s);
        }
        for &a in &self.a_rest {
            acc -= ln_gamma_complex(a - s);
        }
        acc
    }
}

fn cancel_pairs(num: &mut Vec<f64>, den: &mut Vec<f64>) {
    let mut i = 0;
    while i < num.len() {
        if let Some(j) = den
            .iter()
            .position(|d| (d - num[i]).abs() <= 1e-14 * (1.0 + d.abs()))
        {
            num.remove(i);
            den.remove(j);
        } else {
            i += 1;
        }
    }
}

/// How a Meijer G value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EvalMethod {
    ResidueSeries,
    ContourQuadrature,
    ClosedIdentity,
}

impl EvalMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            EvalMethod::ResidueSeries => "residue_series",
            EvalMethod::ContourQuadrature => "contour_quadrature",
            EvalMethod::ClosedIdentity => "closed_identity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub value: f64,
    /// Finite, non-negative bound on |value − exact|.
    pub abs_error_estimate: f64,
    pub method: EvalMethod,
}

/// Evaluate G with automatic method selection.
pub fn meijer_g(spec: &MeijerGSpec) -> Result<EvalReport> {
    meijer_g_scaled(spec, 0.0)
}

/// Evaluate exp(ln_scale)·G.
///
/// Folding a large or tiny prefactor into the integrand keeps the
/// evaluation inside the f64 range when G alone would overflow.
pub fn meijer_g_scaled(spec: &MeijerGSpec, ln_scale: f64) -> Result<EvalReport> {
    let reduced = spec.reduced();
    if let Some(r) = closed_identity(&reduced, ln_scale) {
        return Ok(r);
    }
    if let Ok(r) = residue_series(&reduced, ln_scale) {
        if r.value.is_finite() && r.abs_error_estimate <= 1e-11 * r.value.abs() {
            return Ok(r);
        }
    }
    contour_quadrature(&reduced, ln_scale)
}

/// Evaluate exp(ln_scale)·G through one specific route.
pub fn meijer_g_with(spec: &MeijerGSpec, method: EvalMethod, ln_scale: f64) -> Result<EvalReport> {
    let reduced = spec.reduced();
    match method {
        EvalMethod::ClosedIdentity => closed_identity(&reduced, ln_scale).ok_or_else(|| {
            Error::Unsupported("no elementary identity matches these parameters".into())
        }),
        EvalMethod::ResidueSeries => residue_series(&reduced, ln_scale),
        EvalMethod::ContourQuadrature => contour_quadrature(&reduced, ln_scale),
    }
}

fn closed_identity(spec: &MeijerGSpec, ln_scale: f64) -> Option<EvalReport> {
    if spec.orders() != (1, 1, 1, 1) {
        return None;
    }
    let (alpha, beta) = (spec.a_front[0], spec.b_front[0]);
    let shape = 1.0 - alpha + beta;
    if shape <= 0.0 {
        return None;
    }
    let z = spec.argument;
    let ln_v = ln_gamma_unchecked(shape) + beta * z.ln() - shape * z.ln_1p() + ln_scale;
    let value = ln_v.exp();
    Some(EvalReport {
        value,
        abs_error_estimate: value * 1e-14 * (1.0 + ln_v.abs()),
        method: EvalMethod::ClosedIdentity,
    })
}

/// One residue-series term: ln|R| and sign, or `None` when a reciprocal
/// gamma vanishes. `terminal` marks zeros that persist for all later k.
struct TermFactor {
    ln_abs: f64,
    sign: f64,
}

fn residue_factor(spec: &MeijerGSpec, h: usize, s: f64) -> (Option<TermFactor>, bool) {
    let mut ln_abs = 0.0;
    let mut sign = 1.0;
    for (j, &b) in spec.b_front.iter().enumerate() {
        if j == h {
            continue;
        }
        let (l, sg) = ln_gamma_signed(b - s);
        ln_abs += l;
        sign *= sg;
    }
    for &a in &spec.a_front {
        let (l, sg) = ln_gamma_signed(1.0 - a + s);
        ln_abs += l;
        sign *= sg;
    }
    for &b in &spec.b_rest {
        let x = 1.0 - b + s;
        if nonpositive_integer(x) {
            return (None, false);
        }
        let (l, sg) = ln_gamma_signed(x);
        ln_abs -= l;
        sign *= sg;
    }
    for &a in &spec.a_rest {
        let x = a - s;
        if nonpositive_integer(x) {
            // a - b_h - k only decreases with k
            return (None, true);
        }
        let (l, sg) = ln_gamma_signed(x);
        ln_abs -= l;
        sign *= sg;
    }
    (Some(TermFactor { ln_abs, sign }), false)
}

fn residue_series(spec: &MeijerGSpec, ln_scale: f64) -> Result<EvalReport> {
    let (_, _, p, q) = spec.orders();
    let z = spec.argument;
    let work = if p < q || (p == q && z < 0.5) {
        spec.clone()
    } else if p > q || (p == q && z > 2.0) {
        spec.inverted()
    } else {
        return Err(Error::Unsupported(format!(
            "residue series converges too slowly for p = q at z = {z}"
        )));
    };
    let bs = &work.b_front;
    for i in 0..bs.len() {
        for j in (i + 1)..bs.len() {
            if near_integer(bs[i] - bs[j]) {
                return Err(Error::Unsupported(format!(
                    "coincident poles: b_front values {} and {} differ by an integer",
                    bs[i], bs[j]
                )));
            }
        }
    }
    let ln_z = work.argument.ln();
    let mut terms: Vec<(f64, f64)> = Vec::new();
    let params: Vec<f64> = [&work.a_front, &work.a_rest, &work.b_front, &work.b_rest]
        .into_iter()
        .flatten()
        .copied()
        .collect();
    for h in 0..bs.len() {
        // term ratios only settle once s has passed every gamma argument's sign change
        let k_min = params.iter().map(|x| (x - bs[h]).abs()).fold(0.0, f64::max).ceil() as usize + 2;
        let mut prev: Option<f64> = None;
        let mut k = 0usize;
        loop {
            if k >= MAX_RESIDUE_TERMS {
                return Err(Error::numeric("residue series did not converge", None));
            }
            let s = bs[h] + k as f64;
            let (factor, terminal) = residue_factor(&work, h, s);
            match factor {
                Some(f) => {
                    let ln_t = f.ln_abs - ln_gamma_unchecked(k as f64 + 1.0) + s * ln_z + ln_scale;
                    let sign = f.sign * if k % 2 == 0 { 1.0 } else { -1.0 };
                    terms.push((ln_t, sign));
                    let ln_max = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
                    let decreasing = prev.is_some_and(|pv| ln_t < pv);
                    prev = Some(ln_t);
                    if k >= k_min && decreasing && ln_t < ln_max - 40.0 {
                        break;
                    }
                }
                None if terminal => break,
                None => {}
            }
            k += 1;
        }
    }
    if terms.is_empty() {
        return Ok(EvalReport {
            value: 0.0,
            abs_error_estimate: 0.0,
            method: EvalMethod::ResidueSeries,
        });
    }
    let ln_max = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    for &(l, sg) in &terms {
        let v = (l - ln_max).exp();
        sum += sg * v;
        abs_sum += v;
    }
    let scale = ln_max.exp();
    let value = sum * scale;
    if !(value.is_finite() && abs_sum * scale < f64::INFINITY) {
        return Err(Error::numeric(
            format!("residue terms reach e^{ln_max:.0}; cancellation exceeds the double range"),
            None,
        ));
    }
    // lnΓ carries ~1e-14 absolute error per factor
    let err =
        abs_sum * scale * (64.0 * f64::EPSILON + 1e-14 * (p + q) as f64) + 1e-17 * abs_sum * scale;
    Ok(EvalReport {
        value,
        abs_error_estimate: err,
        method: EvalMethod::ResidueSeries,
    })
}

struct Contour<'a> {
    spec: &'a MeijerGSpec,
    ln_z: f64,
    ln_scale: f64,
    c: f64,
}

impl Contour<'_> {
    fn ln_phi(&self, t: f64) -> Complex64 {
        let s = Complex64::new(self.c, t);
        self.spec.ln_kernel(s) + s * self.ln_z + self.ln_scale
    }
}

fn choose_abscissa(spec: &MeijerGSpec, ln_z: f64, lo: f64, hi: f64) -> f64 {
    let z = ln_z.exp();
    let lo = if lo.is_finite() {
        lo
    } else {
        hi - 40f64.max(2.0 * z)
    };
    let hi = if hi.is_finite() {
        hi
    } else {
        lo + 40f64.max(2.0 / z)
    };
    let cost = |c: f64| {
        let v = spec.ln_kernel(Complex64::new(c, 0.0)).re + c * ln_z;
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    const N: usize = 256;
    let width = hi - lo;
    let at = |i: usize| lo + width * (i as f64 + 0.5) / N as f64;
    let mut best = 0usize;
    let mut best_v = f64::INFINITY;
    for i in 0..N {
        let v = cost(at(i));
        if v < best_v {
            best_v = v;
            best = i;
        }
    }
    // golden-section refinement inside the neighbouring cells
    let (mut a, mut b) = (at(best.saturating_sub(1)), at((best + 1).min(N - 1)));
    let g = 0.618_033_988_749_894_9;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (cost(x1), cost(x2));
    for _ in 0..60 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = cost(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = cost(x2);
        }
    }
    let c = 0.5 * (a + b);
    if cost(c) <= best_v {
        c
    } else {
        at(best)
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    abs_value: f64,
    err: f64,
}

fn gl_panel(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let (x, w) = gauss_legendre();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut s = 0.0;
    let mut sa = 0.0;
    for i in 0..GL_ORDER {
        let v = f(mid + half * x[i]);
        s += w[i] * v;
        sa += w[i] * v.abs();
    }
    (s * half, sa * half)
}

fn make_panel(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Panel {
    let m = 0.5 * (a + b);
    let (coarse, _) = gl_panel(f, a, b);
    let (l, la) = gl_panel(f, a, m);
    let (r, ra) = gl_panel(f, m, b);
    let value = l + r;
    Panel {
        a,
        b,
        value,
        abs_value: la + ra,
        err: (value - coarse).abs(),
    }
}

fn contour_quadrature(spec: &MeijerGSpec, ln_scale: f64) -> Result<EvalReport> {
    let (m, n, p, q) = spec.orders();
    let decay = (m + n) as f64 - 0.5 * (p + q) as f64;
    if decay <= 0.0 {
        return Err(Error::Unsupported(format!(
            "integrand does not decay on vertical lines (m+n-(p+q)/2 = {decay})"
        )));
    }
    let lo = spec
        .a_front
        .iter()
        .map(|a| a - 1.0)
        .fold(f64::NEG_INFINITY, f64::max);
    let hi = spec.b_front.iter().copied().fold(f64::INFINITY, f64::min);
    if !(lo < hi) {
        return Err(Error::Unsupported(format!(
            "no vertical contour separates the pole families (left poles reach {lo}, right poles start at {hi})"
        )));
    }
    let ln_z = spec.argument.ln();
    let c = choose_abscissa(spec, ln_z, lo, hi);
    let contour = Contour {
        spec,
        ln_z,
        ln_scale,
        c,
    };

    // Find the truncation height T.
    let mut ln_peak = f64::NEG_INFINITY;
    let mut t = 0.0;
    let step = 0.25;
    let mut below = 0;
    let mut last = f64::INFINITY;
    let height = loop {
        let l = contour.ln_phi(t).re;
        if l > ln_peak {
            ln_peak = l;
        }
        if l < ln_peak + LN_TRUNCATION && l < last {
            below += 1;
            if below >= 4 {
                break t;
            }
        } else {
            below = 0;
        }
        last = l;
        t += step;
        if t > MAX_CONTOUR_HEIGHT {
            return Err(Error::numeric(
                format!("contour truncation bound exceeded at Im s = {MAX_CONTOUR_HEIGHT}"),
                None,
            ));
        }
    };
    if !ln_peak.is_finite() {
        return Err(Error::numeric(
            "Mellin-Barnes integrand is not finite on the contour",
            None,
        ));
    }

    let f = |t: f64| {
        let v = (contour.ln_phi(t) - ln_peak).exp().re;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let n_init = (height / 0.5).ceil().max(1.0) as usize;
    let w0 = height / n_init as f64;
    let mut panels: Vec<Panel> = (0..n_init)
        .map(|i| make_panel(&f, i as f64 * w0, (i + 1) as f64 * w0))
        .collect();
    let mut evals = n_init * 3 * GL_ORDER;
    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let l1: f64 = panels.iter().map(|p| p.abs_value).sum();
        let err: f64 = panels.iter().map(|p| p.err).sum();
        let roundoff = 1e3 * f64::EPSILON * l1;
        if err <= (PANEL_REL_TOL * total.abs()).max(roundoff) {
            let tail = (LN_TRUNCATION.exp()) / (PI * decay);
            let scale = (ln_peak).exp() / PI;
            return Ok(EvalReport {
                value: total * scale,
                abs_error_estimate: (err + roundoff + tail) * scale,
                method: EvalMethod::ContourQuadrature,
            });
        }
        if evals >= MAX_EVALS {
            return Err(Error::numeric(
                format!(
                    "contour quadrature exceeded {MAX_EVALS} evaluations (error estimate {err:e})"
                ),
                Some(total * ln_peak.exp() / PI),
            ));
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.err.total_cmp(&b.1.err))
            .map(|(i, _)| i)
            .unwrap();
        let pw = panels.swap_remove(worst);
        let mid = 0.5 * (pw.a + pw.b);
        panels.push(make_panel(&f, pw.a, mid));
        panels.push(make_panel(&f, mid, pw.b));
        evals += 6 * GL_ORDER;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::erfc;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn log_identity(z: f64) -> MeijerGSpec {
        MeijerGSpec::new(vec![1.0, 1.0], vec![], vec![1.0], vec![0.0], z).unwrap()
    }

    fn erfc_identity(z: f64) -> MeijerGSpec {
        MeijerGSpec::new(vec![], vec![1.0], vec![0.0, 0.5], vec![], z).unwrap()
    }

    #[test]
    fn elementary_reduction() {
        let s = MeijerGSpec::new(vec![-1.0], vec![], vec![1.0], vec![], 1.0).unwrap();
        let r = meijer_g(&s).unwrap();
        assert_eq!(r.method, EvalMethod::ClosedIdentity);
        assert!(rel(r.value, 0.25) < 1e-14);
        let via_contour = meijer_g_with(&s, EvalMethod::ContourQuadrature, 0.0).unwrap();
        assert!(
            rel(via_contour.value, 0.25) < 1e-10,
            "{}",
            via_contour.value
        );
    }

    #[test]
    fn log_identity_all_routes() {
        for z in [0.1, 1.0, 10.0, 100.0] {
            let r = meijer_g(&log_identity(z)).unwrap();
            assert!(rel(r.value, z.ln_1p()) < 1e-9, "z = {z}: {r:?}");
            assert!(r.abs_error_estimate.is_finite() && r.abs_error_estimate >= 0.0);
        }
        assert!(rel(meijer_g(&log_identity(1.0)).unwrap().value, 2f64.ln()) < 1e-9);
    }

    #[test]
    fn erfc_identity_all_routes() {
        for z in [0.01f64, 1.0, 4.0] {
            let want = PI.sqrt() * erfc(z.sqrt());
            let r = meijer_g(&erfc_identity(z)).unwrap();
            assert!(rel(r.value, want) < 1e-9, "z = {z}: {r:?}");
            let c = meijer_g_with(&erfc_identity(z), EvalMethod::ContourQuadrature, 0.0).unwrap();
            assert!(rel(c.value, want) < 1e-9, "contour z = {z}: {c:?}");
        }
        assert!(
            (meijer_g(&erfc_identity(1.0)).unwrap().value - 0.278_805_585_280_661_976_5).abs()
                < 1e-12
        );
    }

    #[test]
    fn colliding_poles_rejected() {
        // a_front = 1, b_front = 0
        let e = MeijerGSpec::new(
            vec![0.0, 1.0],
            vec![1.0],
            vec![5.0, 0.0, 1.0],
            vec![0.0],
            3.0,
        );
        assert!(matches!(e, Err(Error::Domain(_))));
        assert!(MeijerGSpec::new(vec![1.0], vec![], vec![0.0], vec![], 0.0).is_err());
        assert!(MeijerGSpec::new(vec![1.0], vec![], vec![0.5], vec![], -1.0).is_err());
    }

    #[test]
    fn interleaved_poles_have_no_straight_contour() {
        // a = 2.3 puts left poles at 1.3, 0.3, ...; right poles start at 0.5
        let s = MeijerGSpec::new(vec![2.3], vec![], vec![0.5], vec![], 0.7).unwrap();
        let e = meijer_g_with(&s, EvalMethod::ContourQuadrature, 0.0);
        assert!(matches!(e, Err(Error::Unsupported(_))));
    }

    #[test]
    fn contour_and_residue_agree_within_estimates() {
        let cases = vec![
            erfc_identity(0.3),
            erfc_identity(2.5),
            log_identity(0.2),
            // BER-type kernel with non-integer shadowing order
            MeijerGSpec::new(
                vec![0.0, -0.5, -2.3, 0.0],
                vec![],
                vec![0.3],
                vec![0.0, -1.0],
                40.0,
            )
            .unwrap(),
            MeijerGSpec::new(
                vec![0.0, -0.5, -2.3, 0.0],
                vec![],
                vec![0.3],
                vec![0.0, -1.0],
                3.0,
            )
            .unwrap(),
        ];
        for s in cases {
            let r = meijer_g_with(&s, EvalMethod::ResidueSeries, 0.0).unwrap();
            let c = meijer_g_with(&s, EvalMethod::ContourQuadrature, 0.0).unwrap();
            let diff = (r.value - c.value).abs();
            assert!(
                diff <= r.abs_error_estimate + c.abs_error_estimate,
                "{s:?}: residue {r:?} contour {c:?}"
            );
            assert!(diff <= 1e-9 * c.value.abs());
        }
    }

    #[test]
    fn scaled_evaluation_survives_overflowing_gammas() {
        // Γ(300 - s) overflows; the scale brings the product back into range.
        let s = MeijerGSpec::new(vec![], vec![], vec![300.0], vec![], 280.0).unwrap();
        // G^{1,0}_{0,1}[z | ; b] = z^b e^{-z}
        let ln_want = 300.0 * 280f64.ln() - 280.0;
        let r = meijer_g_scaled(&s, -ln_want).unwrap();
        assert!(rel(r.value, 1.0) < 1e-9, "{r:?}");
    }

    #[test]
    fn coincident_poles_need_contour() {
        // G^{2,0}_{0,2}[z | ; 0, 0] = 2 K_0(2√z)
        let s = MeijerGSpec::new(vec![], vec![], vec![0.0, 0.0], vec![], 0.25).unwrap();
        assert!(matches!(
            meijer_g_with(&s, EvalMethod::ResidueSeries, 0.0),
            Err(Error::Unsupported(_))
        ));
        let r = meijer_g(&s).unwrap();
        assert_eq!(r.method, EvalMethod::ContourQuadrature);
        // K_0(1) = 0.42102443824070833334
        assert!(
            rel(r.value, 2.0 * 0.421_024_438_240_708_333_3) < 1e-10,
            "{r:?}"
        );
    }
}
