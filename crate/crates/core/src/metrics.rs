//! Average capacity, average BER and outage probability of the RIS link.

use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::fading::{FadingParams, SumFadingModel};
use crate::specfun::{
    beta_reg, digamma, gauss_2f1_eval, ln_gamma_unchecked, meijer_g_scaled, Hyp2f1Path, MeijerGSpec,
};

/// Values below this are reported as exactly zero with an `underflow` flag.
pub const UNDERFLOW_FLOOR: f64 = 1e-300;

/// Geometry and radio parameters of one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkConfig {
    pub fading: FadingParams,
    pub n_cells: u32,
    /// Source-to-destination distance in metres.
    pub r_d: f64,
    /// Path-loss exponent.
    pub beta: f64,
    /// Transmit power in watts.
    pub p_s: f64,
    /// Noise power in watts.
    pub n0: f64,
    /// Modulation constant: 1 for BPSK, 0.5 for BFSK.
    pub lambda_mod: f64,
}

impl LinkConfig {
    pub fn new(
        fading: FadingParams,
        n_cells: u32,
        r_d: f64,
        beta: f64,
        p_s: f64,
        n0: f64,
        lambda_mod: f64,
    ) -> Result<Self> {
        let cfg = Self {
            fading,
            n_cells,
            r_d,
            beta,
            p_s,
            n0,
            lambda_mod,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Unit-distance, unit-noise link whose transmit SNR factor is `eta`.
    pub fn with_eta(fading: FadingParams, n_cells: u32, eta: f64, lambda_mod: f64) -> Result<Self> {
        Self::new(fading, n_cells, 1.0, 2.7, eta, 1.0, lambda_mod)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_cells == 0 {
            return Err(Error::domain("n_cells must be at least 1"));
        }
        for (name, v) in [
            ("r_d", self.r_d),
            ("beta", self.beta),
            ("p_s", self.p_s),
            ("n0", self.n0),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.lambda_mod != 0.5 && self.lambda_mod != 1.0 {
            return Err(Error::domain(format!(
                "lambda must be 0.5 (BFSK) or 1 (BPSK), got {}",
                self.lambda_mod
            )));
        }
        let eta = self.eta();
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::domain(format!(
                "transmit SNR factor is not positive and finite: {eta}"
            )));
        }
        Ok(())
    }

    /// η = p_s · r_d^{−β} / n0.
    pub fn eta(&self) -> f64 {
        self.p_s * self.r_d.powf(-self.beta) / self.n0
    }

    pub fn model(&self) -> Result<SumFadingModel> {
        SumFadingModel::new(self.fading, self.n_cells)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    ClosedForm,
    Asymptotic,
    Quadrature,
    MonteCarlo,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Asymptotic => "asymptotic",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricResult {
    pub value: f64,
    pub method: Method,
    /// Numerical error bound, or the standard error for Monte-Carlo.
    pub error_estimate: f64,
    pub diagnostics: BTreeMap<String, String>,
}

impl MetricResult {
    pub(crate) fn new(value: f64, method: Method, error_estimate: f64) -> Self {
        Self {
            value,
            method,
            error_estimate,
            diagnostics: BTreeMap::new(),
        }
    }

    pub(crate) fn note(mut self, key: &str, value: impl ToString) -> Self {
        self.diagnostics.insert(key.to_string(), value.to_string());
        self
    }

    /// True when the value was flushed to zero below [`UNDERFLOW_FLOOR`].
    pub fn underflowed(&self) -> bool {
        self.diagnostics.contains_key("underflow")
    }

    // Flush values below the floor (or an exp of a very negative log) to 0.
    pub(crate) fn from_ln(ln_value: f64, method: Method, rel_error: f64) -> Self {
        let value = ln_value.exp();
        if value < UNDERFLOW_FLOOR {
            Self::new(0.0, method, 0.0).note("underflow", "true").note(
                "log10_value",
                format!("{:.6}", ln_value / std::f64::consts::LN_10),
            )
        } else {
            Self::new(value, method, value * rel_error)
        }
    }
}

/// E[log₂(1 + η g_D)] in bits/s/Hz via a Meijer G closed form.
///
/// Evaluated as (1/(Γ(Nm)Γ(Nm_s) ln 2)) · G^{2,3}_{3,3}[η/ξ | 1−Nm, 1, 1 ; Nm_s, 1, 0].
/// The textbook G^{3,3}_{4,4} form carries a colliding a = 1, b = 0 pair
/// that cancels formally; this is the same function with the pair removed.
pub fn avg_capacity(cfg: &LinkConfig) -> Result<MetricResult> {
    cfg.validate()?;
    let model = cfg.model()?;
    let (a, b) = (model.shape_fading(), model.shape_shadowing());
    let z = cfg.eta() / model.xi();
    let spec = MeijerGSpec::new(vec![1.0 - a, 1.0, 1.0], vec![], vec![b, 1.0], vec![0.0], z)?;
    let ln_scale = -ln_gamma_unchecked(a) - ln_gamma_unchecked(b);
    let rep = meijer_g_scaled(&spec, ln_scale)?;
    let value = rep.value / LN_2;
    let err = rep.abs_error_estimate / LN_2;
    if !(value.is_finite() && value > -err) {
        return Err(Error::numeric(
            format!("capacity evaluated to {value}"),
            Some(value),
        ));
    }
    Ok(MetricResult::new(value.max(0.0), Method::ClosedForm, err)
        .note("meijer_method", rep.method.as_str())
        .note("meijer_argument", format!("{z:e}")))
}

/// High-SNR capacity [ln(η/ξ) + ψ(Nm) − ψ(Nm_s)]/ln 2.
///
/// Can be negative at low η, where the asymptote is meaningless.
pub fn avg_capacity_asymptotic(cfg: &LinkConfig) -> Result<MetricResult> {
    cfg.validate()?;
    let model = cfg.model()?;
    let v = ((cfg.eta() / model.xi()).ln() + digamma(model.shape_fading())?
        - digamma(model.shape_shadowing())?)
        / LN_2;
    Ok(MetricResult::new(
        v,
        Method::Asymptotic,
        4.0 * f64::EPSILON * v.abs(),
    ))
}

fn ber_kernel(cfg: &LinkConfig) -> Result<(MeijerGSpec, f64)> {
    cfg.validate()?;
    let model = cfg.model()?;
    let (a, b) = (model.shape_fading(), model.shape_shadowing());
    let el = cfg.eta() * cfg.lambda_mod;
    let spec = MeijerGSpec::new(
        vec![0.0, -0.5, -b, 0.0],
        vec![],
        vec![a - 1.0],
        vec![0.0, -1.0],
        model.xi() / el,
    )?;
    let ln_scale = model.ln_lambda_norm() - (2.0 * PI.sqrt() * el).ln();
    Ok((spec, ln_scale))
}

/// E[Q(√(2ηλ g_D))] via
/// (Λ/(ηλ·2√π)) · G^{1,4}_{4,3}[ξ/(ηλ) | 0, −½, −Nm_s, 0 ; Nm−1, 0, −1].
pub fn avg_ber(cfg: &LinkConfig) -> Result<MetricResult> {
    let (spec, ln_scale) = ber_kernel(cfg)?;
    let rep = meijer_g_scaled(&spec, ln_scale)?;
    let mut out = if rep.value.abs() < UNDERFLOW_FLOOR && rep.abs_error_estimate < UNDERFLOW_FLOOR {
        MetricResult::new(0.0, Method::ClosedForm, 0.0).note("underflow", "true")
    } else {
        MetricResult::new(rep.value, Method::ClosedForm, rep.abs_error_estimate)
    };
    if out.value < -out.error_estimate || out.value > 0.5 + out.error_estimate {
        let v = out.value;
        out = out.note("out_of_range", format!("{v:e} outside [0, 0.5]"));
    } else {
        out.value = out.value.clamp(0.0, 0.5);
    }
    Ok(out
        .note("meijer_method", rep.method.as_str())
        .note("meijer_argument", format!("{:e}", spec.argument())))
}

/// Natural log of [`avg_ber`], computed with the asymptote folded into the
/// scale so that it stays finite far below the double range.
pub fn ln_avg_ber(cfg: &LinkConfig) -> Result<f64> {
    let (spec, ln_scale) = ber_kernel(cfg)?;
    let ln_ref = ln_avg_ber_asymptotic(cfg)?.min(0.5f64.ln());
    let rep = meijer_g_scaled(&spec, ln_scale - ln_ref)?;
    if !(rep.value > 0.0 && rep.value.is_finite()) {
        return Err(Error::numeric(
            format!("scaled BER evaluated to {}", rep.value),
            None,
        ));
    }
    Ok(rep.value.ln() + ln_ref)
}

/// High-SNR BER Γ(½+Nm)/(2√π B(Nm,Nm_s) Nm) · (m/(ηλNm_s))^{Nm}.
pub fn avg_ber_asymptotic(cfg: &LinkConfig) -> Result<MetricResult> {
    Ok(MetricResult::from_ln(
        ln_avg_ber_asymptotic(cfg)?,
        Method::Asymptotic,
        1e-13,
    ))
}

/// Natural log of [`avg_ber_asymptotic`].
pub fn ln_avg_ber_asymptotic(cfg: &LinkConfig) -> Result<f64> {
    cfg.validate()?;
    let model = cfg.model()?;
    let (a, b) = (model.shape_fading(), model.shape_shadowing());
    let ln_b = ln_gamma_unchecked(a) + ln_gamma_unchecked(b) - ln_gamma_unchecked(a + b);
    Ok(
        ln_gamma_unchecked(0.5 + a) - (2.0 * PI.sqrt()).ln() - ln_b - a.ln()
            + a * (cfg.fading.m() / (cfg.eta() * cfg.lambda_mod * b)).ln(),
    )
}

fn check_threshold(gamma_th: f64) -> Result<()> {
    if !(gamma_th.is_finite() && gamma_th > 0.0) {
        return Err(Error::domain(format!(
            "gamma_th must be positive and finite, got {gamma_th}"
        )));
    }
    Ok(())
}

// ln of Γ(Nm+Nm_s)/(Γ(1+Nm)Γ(Nm_s)) · x^{Nm}
fn ln_outage_leading(model: &SumFadingModel, x: f64) -> f64 {
    let (a, b) = (model.shape_fading(), model.shape_shadowing());
    ln_gamma_unchecked(a + b) - ln_gamma_unchecked(1.0 + a) - ln_gamma_unchecked(b) + a * x.ln()
}

struct OutageEval {
    ln_value: f64,
    rel_error: f64,
    path: &'static str,
    terms: usize,
    x: f64,
}

fn outage_eval(cfg: &LinkConfig, gamma_th: f64) -> Result<OutageEval> {
    cfg.validate()?;
    check_threshold(gamma_th)?;
    let model = cfg.model()?;
    let (a, b) = (model.shape_fading(), model.shape_shadowing());
    let x = gamma_th * cfg.fading.m() / (cfg.eta() * b);
    // past the median the hypergeometric product loses absolute accuracy
    // in ln; the complementary tail is small there and exact
    if let Some(q) = beta_reg(b, a, 1.0 / (1.0 + x)).ok().filter(|q| *q < 0.5) {
        return Ok(OutageEval {
            ln_value: (-q).ln_1p(),
            rel_error: 1e-13 * q.max(1e-300),
            path: "incomplete_beta_complement",
            terms: 0,
            x,
        });
    }
    match gauss_2f1_eval(a + b, a, 1.0 + a, -x) {
        Ok(f) => {
            let ln_value = ln_outage_leading(&model, x) + f.ln_abs;
            Ok(OutageEval {
                ln_value,
                rel_error: f.rel_error.max(1e-14) * (1.0 + ln_value.abs()),
                path: match f.path {
                    Hyp2f1Path::Direct => "direct",
                    Hyp2f1Path::Pfaff => "pfaff",
                },
                terms: f.terms,
                x,
            })
        }
        Err(Error::Numeric { .. }) => {
            // both series stall only when x is huge and the outage is close to 1
            let v = beta_reg(a, b, x / (1.0 + x))?;
            Ok(OutageEval {
                ln_value: v.ln(),
                rel_error: 1e-13,
                path: "incomplete_beta",
                terms: 0,
                x,
            })
        }
        Err(e) => Err(e),
    }
}

/// P{η g_D < γ_th}, γ_th linear.
///
/// Γ(Nm+Nm_s)/(Γ(1+Nm)Γ(Nm_s)) · x^{Nm} · ₂F₁(N(m+m_s), Nm; 1+Nm; −x) with
/// x = γ_th m/(η N m_s). The ₂F₁ switches to its Pfaff transform away from
/// the origin, and above the median the value comes from the complementary
/// incomplete beta; the path is recorded under `hyp2f1_path`.
pub fn outage(cfg: &LinkConfig, gamma_th: f64) -> Result<MetricResult> {
    let e = outage_eval(cfg, gamma_th)?;
    let mut r = MetricResult::from_ln(e.ln_value, Method::ClosedForm, e.rel_error);
    if r.value > 1.0 + r.error_estimate {
        let v = r.value;
        r = r.note("out_of_range", format!("{v:e} above 1"));
    } else if r.value > 1.0 {
        // rounding excess within the error estimate
        r.value = 1.0;
    }
    let disk = if e.x < 1.0 {
        "within_unit_disk"
    } else {
        "outside_unit_disk"
    };
    Ok(r.note("hyp2f1_path", e.path)
        .note("hyp2f1_terms", e.terms)
        .note("series_argument", disk))
}

/// Natural log of [`outage`]; stays finite where the value itself
/// underflows.
pub fn ln_outage(cfg: &LinkConfig, gamma_th: f64) -> Result<f64> {
    Ok(outage_eval(cfg, gamma_th)?.ln_value)
}

/// High-SNR outage Γ(Nm+Nm_s)/(Γ(1+Nm)Γ(Nm_s)) · (γ_th m/(η N m_s))^{Nm}.
pub fn outage_asymptotic(cfg: &LinkConfig, gamma_th: f64) -> Result<MetricResult> {
    Ok(MetricResult::from_ln(
        ln_outage_asymptotic(cfg, gamma_th)?,
        Method::Asymptotic,
        1e-13,
    ))
}

/// Natural log of [`outage_asymptotic`].
pub fn ln_outage_asymptotic(cfg: &LinkConfig, gamma_th: f64) -> Result<f64> {
    cfg.validate()?;
    check_threshold(gamma_th)?;
    let model = cfg.model()?;
    let x = gamma_th * cfg.fading.m() / (cfg.eta() * model.shape_shadowing());
    Ok(ln_outage_leading(&model, x))
}

/// 10^{x/10}.
pub fn snr_threshold_from_db(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

/// Power in watts for a level in dBm.
pub fn power_from_dbm(p_dbm: f64) -> f64 {
    10f64.powf((p_dbm - 30.0) / 10.0)
}
