//! Direct quadrature of the defining expectations against the sum density.
//!
//! Integrands are evaluated in log space and normalised by their largest
//! probed value, so expectations down to ~1e-300 (and logs far below)
//! remain resolvable.

use std::f64::consts::LN_2;

use super::quad::{integrate, integrate_half_line, Tolerance};
use crate::error::{Error, Result};
use crate::fading::SumFadingModel;
use crate::metrics::{LinkConfig, Method, MetricResult};
use crate::specfun::ln_q_function;

/// Natural log of an expectation plus the quadrature's relative error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LnExpectation {
    pub ln_value: f64,
    pub rel_error: f64,
}

impl LnExpectation {
    pub fn value(&self) -> f64 {
        self.ln_value.exp()
    }

    pub fn into_metric(self) -> MetricResult {
        MetricResult::from_ln(self.ln_value, Method::Quadrature, self.rel_error.max(1e-15))
    }
}

/// Abscissae where the weighted integrands change character.
fn breakpoints(model: &SumFadingModel, eta: f64, extra: &[f64]) -> Vec<f64> {
    let a = model.shape_fading();
    let mean = 1.0 / model.xi();
    let mut pts = vec![
        mean * 1e-3,
        mean * 0.1,
        mean * 0.5,
        mean,
        mean * 2.0,
        mean * 10.0,
        1.0 / eta,
    ];
    for s in [0.1, 0.3, 1.0, 3.0, 10.0] {
        pts.push(s * a / eta);
    }
    pts.extend_from_slice(extra);
    pts.retain(|p| p.is_finite() && *p > 0.0);
    pts.sort_by(f64::total_cmp);
    // an octave ladder across all scales, so no single segment spans a
    // region where the integrand falls by many orders
    let (lo, hi) = (pts[0], pts[pts.len() - 1]);
    let octaves = (hi / lo).log2().ceil() as i32;
    pts.extend((1..octaves).map(|k| lo * 2f64.powi(k)));
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|x, y| (*x / *y - 1.0).abs() < 1e-9);
    pts
}

fn ln_peak(ln_f: &impl Fn(f64) -> f64, lo: f64, hi: f64, pts: &[f64]) -> f64 {
    let (l0, l1) = (lo.ln(), hi.ln());
    let probes = (0..=400).map(|i| (l0 + (l1 - l0) * i as f64 / 400.0).exp());
    probes
        .chain(pts.iter().copied())
        .filter(|g| *g >= lo && *g <= hi)
        .map(ln_f)
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// ln ∫₀^∞ exp(ln_h(g) + ln f(g)) dg.
fn ln_expectation(
    model: &SumFadingModel,
    eta: f64,
    ln_h: impl Fn(f64) -> f64,
    tol: Tolerance,
) -> Result<LnExpectation> {
    let pts = breakpoints(model, eta, &[]);
    let ln_f = |g: f64| ln_h(g) + model.ln_sum_pdf(g);
    let lo = pts[0] * 1e-12;
    let hi = pts[pts.len() - 1] * 1e12;
    let ln_ref = ln_peak(&ln_f, lo, hi, &pts);
    if !ln_ref.is_finite() {
        return Err(Error::numeric("integrand vanishes on every probe", None));
    }
    let r = integrate_half_line(|g| (ln_f(g) - ln_ref).exp(), &pts, tol)?;
    Ok(LnExpectation {
        ln_value: ln_ref + r.value.ln(),
        rel_error: r.abs_error / r.value,
    })
}

fn ln_capacity_term(eta: f64) -> impl Fn(f64) -> f64 {
    move |g: f64| ((eta * g).ln_1p() / LN_2).ln()
}

fn ln_ber_term(cfg: &LinkConfig) -> impl Fn(f64) -> f64 {
    let k = 2.0 * cfg.eta() * cfg.lambda_mod;
    move |g: f64| ln_q_function((k * g).sqrt())
}

/// ∫ log₂(1 + ηg) f(g) dg.
pub fn quad_capacity(cfg: &LinkConfig) -> Result<MetricResult> {
    cfg.validate()?;
    let model = cfg.model()?;
    Ok(ln_expectation(
        &model,
        cfg.eta(),
        ln_capacity_term(cfg.eta()),
        Tolerance::default(),
    )?
    .into_metric())
}

/// ∫ Q(√(2ηλg)) f(g) dg.
pub fn quad_ber(cfg: &LinkConfig) -> Result<MetricResult> {
    cfg.validate()?;
    let model = cfg.model()?;
    Ok(ln_expectation(&model, cfg.eta(), ln_ber_term(cfg), Tolerance::default())?.into_metric())
}

/// ∫₀^{γ_th/η} f(g) dg.
pub fn quad_outage(cfg: &LinkConfig, gamma_th: f64) -> Result<MetricResult> {
    Ok(ln_quad_outage(cfg, gamma_th)?.into_metric())
}

pub fn ln_quad_outage(cfg: &LinkConfig, gamma_th: f64) -> Result<LnExpectation> {
    cfg.validate()?;
    if !(gamma_th.is_finite() && gamma_th > 0.0) {
        return Err(Error::domain(format!(
            "gamma_th must be positive and finite, got {gamma_th}"
        )));
    }
    let model = cfg.model()?;
    let eta = cfg.eta();
    let upper = gamma_th / eta;
    let ln_f = |g: f64| model.ln_sum_pdf(g);
    let mut pts: Vec<f64> = breakpoints(&model, eta, &[])
        .into_iter()
        .filter(|p| *p < upper)
        .collect();
    let ln_ref = ln_peak(&ln_f, upper * 1e-12, upper, &pts);
    // the upper limit itself is always a probe
    let ln_ref = ln_ref.max(ln_f(upper));
    pts.insert(0, 0.0);
    pts.push(upper);
    let r = integrate(|g| (ln_f(g) - ln_ref).exp(), &pts, Tolerance::default())?;
    Ok(LnExpectation {
        ln_value: ln_ref + r.value.ln(),
        rel_error: r.abs_error / r.value,
    })
}

/// ln E[log₂(1 + ηg)²].
pub fn ln_second_moment_capacity(cfg: &LinkConfig) -> Result<LnExpectation> {
    let model = cfg.model()?;
    let h = ln_capacity_term(cfg.eta());
    ln_expectation(&model, cfg.eta(), |g| 2.0 * h(g), Tolerance::default())
}

/// ln E[Q(√(2ηλg))²].
pub fn ln_second_moment_ber(cfg: &LinkConfig) -> Result<LnExpectation> {
    let model = cfg.model()?;
    let h = ln_ber_term(cfg);
    ln_expectation(&model, cfg.eta(), |g| 2.0 * h(g), Tolerance::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fading::FadingParams;

    fn link(n: u32, m: f64, m_s: f64, eta: f64, lambda: f64) -> LinkConfig {
        LinkConfig::with_eta(FadingParams::new(m, m_s, 1.0).unwrap(), n, eta, lambda).unwrap()
    }

    #[test]
    fn reference_values() {
        let c = link(1, 1.0, 5.0, 100.0, 1.0);
        assert_rel!(quad_capacity(&c).unwrap().value, 6.0317707987276533, 1e-9);
        assert_rel!(quad_ber(&c).unwrap().value, 0.0024777588834653326, 1e-9);
        assert_rel!(
            quad_outage(&c, 1.0).unwrap().value,
            0.0099402788840186021,
            1e-9
        );
        let c = link(32, 4.0, 2.0, 1000.0, 1.0);
        assert_rel!(quad_ber(&c).unwrap().value, 3.8084729699493113e-274, 1e-8);
        assert!(quad_outage(&c, 1.0).unwrap().underflowed());
        let ln = ln_quad_outage(&c, 1.0).unwrap().ln_value / std::f64::consts::LN_10;
        assert!((ln - (1.78f64.log10() - 487.0)).abs() < 0.01, "{ln}");
    }

    #[test]
    fn limits() {
        let c = link(1, 1.0, 5.0, 1e-12, 1.0);
        assert!(quad_capacity(&c).unwrap().value < 1e-9);
        let v = quad_ber(&c).unwrap().value;
        assert!((v - 0.5).abs() < 1e-6, "{v}");
        for n in [1, 8, 32] {
            assert!(quad_ber(&link(n, 1.0, 2.0, 0.01, 0.5)).unwrap().value <= 0.5);
        }
    }

    #[test]
    fn second_moments_dominate_squares() {
        let c = link(8, 1.0, 5.0, 10.0, 1.0);
        let m1 = quad_capacity(&c).unwrap().value;
        assert!(ln_second_moment_capacity(&c).unwrap().value() > m1 * m1);
        let b1 = quad_ber(&c).unwrap().value;
        let b2 = ln_second_moment_ber(&c).unwrap().value();
        assert!(b2 > b1 * b1 && b2 < b1);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(40))]
        #[test]
        fn closed_forms_match_quadrature_off_grid(
            n in 1u32..33, m in 0.5f64..5.0, m_s in 1.5f64..10.0, eta_db in -10.0f64..40.0, bfsk: bool, g_db in -5.0f64..10.0,
        ) {
            use crate::metrics::{avg_ber, avg_capacity, ln_outage};
            let c = link(n, m, m_s, 10f64.powf(eta_db / 10.0), if bfsk { 0.5 } else { 1.0 });
            let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
            let (cf, q) = (avg_capacity(&c).unwrap().value, quad_capacity(&c).unwrap().value);
            proptest::prop_assert!(rel(cf, q) <= 1e-6, "capacity {} vs {}", cf, q);
            let (cf, q) = (avg_ber(&c).unwrap().value, quad_ber(&c).unwrap().value);
            proptest::prop_assert!(q < 1e-300 || rel(cf, q) <= 1e-6, "ber {} vs {}", cf, q);
            let g = 10f64.powf(g_db / 10.0);
            let (cf, q) = (ln_outage(&c, g).unwrap(), ln_quad_outage(&c, g).unwrap().ln_value);
            proptest::prop_assert!((cf - q).abs() <= 1e-6, "ln outage {} vs {}", cf, q);
        }
    }
}
