//! Adaptive Gauss-Kronrod (G10/K21) quadrature.
//!
//! Deliberately independent of the Gauss-Legendre machinery used by the
//! Meijer G contour integrator, so the two can check each other.

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_254_519,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evals: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_evals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel: 1e-10,
            abs: 0.0,
            max_evals: 1_000_000,
        }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

fn kronrod(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[10];
    let mut g = 0.0;
    let mut fv = [0.0; 21];
    fv[10] = fc;
    for j in 0..10 {
        let dx = h * XGK[j];
        let (l, r) = (f(c - dx), f(c + dx));
        fv[j] = l;
        fv[20 - j] = r;
        k += WGK[j] * (l + r);
        if j % 2 == 1 {
            g += WG[j / 2] * (l + r);
        }
    }
    // QUADPACK's estimate: the raw |K − G| is too optimistic on x^α-type
    // endpoint behaviour
    let mean = 0.5 * k;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv[j] - mean).abs() + (fv[20 - j] - mean).abs());
    }
    let resasc = resasc * h.abs();
    let raw = ((k - g) * h).abs();
    let err = if resasc > 0.0 && raw > 0.0 {
        resasc * (200.0 * raw / resasc).powf(1.5).min(1.0)
    } else {
        raw
    };
    Segment {
        a,
        b,
        value: k * h,
        err,
    }
}

/// ∫ f over [points[0], points.last()], with every interior point used as an
/// initial breakpoint.
pub fn integrate(f: impl Fn(f64) -> f64, points: &[f64], tol: Tolerance) -> Result<QuadResult> {
    if points.len() < 2 || points.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::domain(
            "quadrature breakpoints must be strictly increasing",
        ));
    }
    let mut segs: Vec<Segment> = points.windows(2).map(|w| kronrod(&f, w[0], w[1])).collect();
    let mut evals = 21 * segs.len();
    loop {
        let value: f64 = segs.iter().map(|s| s.value).sum();
        let err: f64 = segs.iter().map(|s| s.err).sum();
        if !value.is_finite() {
            return Err(Error::numeric(
                "quadrature produced a non-finite value",
                None,
            ));
        }
        if err <= tol.abs.max(tol.rel * value.abs()) {
            return Ok(QuadResult {
                value,
                abs_error: err,
                evals,
            });
        }
        if evals >= tol.max_evals {
            return Err(Error::numeric(
                format!("quadrature not converged after {evals} evaluations (error {err:e})"),
                Some(value),
            ));
        }
        let worst = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i)
            .unwrap();
        let s = segs.swap_remove(worst);
        let m = 0.5 * (s.a + s.b);
        if !(s.a < m && m < s.b) {
            return Err(Error::numeric(
                "quadrature segment collapsed below resolution",
                Some(value),
            ));
        }
        segs.push(kronrod(&f, s.a, m));
        segs.push(kronrod(&f, m, s.b));
        evals += 42;
    }
}

/// ∫₀^∞ f(g) dg through g = t/(1−t). `g_breaks` are positive abscissae in
/// the original variable where the integrand has structure.
pub fn integrate_half_line(
    f: impl Fn(f64) -> f64,
    g_breaks: &[f64],
    tol: Tolerance,
) -> Result<QuadResult> {
    let mut t: Vec<f64> = g_breaks
        .iter()
        .filter(|g| g.is_finite() && **g > 0.0)
        .map(|g| g / (1.0 + g))
        .collect();
    t.extend((1..16).map(|i| i as f64 / 16.0));
    // grade geometrically toward the origin, where densities behave like g^α
    let t0 = t.iter().copied().fold(1.0 / 16.0, f64::min);
    t.extend((1..=40).map(|k| t0 * 0.5f64.powi(k)));
    t.push(0.0);
    t.push(1.0);
    t.sort_by(f64::total_cmp);
    t.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let mapped = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let one_minus = 1.0 - t;
        let v = f(t / one_minus) / (one_minus * one_minus);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(mapped, &t, tol)
}
