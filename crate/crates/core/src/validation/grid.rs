//! The oracle-agreement grid: closed forms against quadrature and
//! Monte-Carlo at every point, plus distribution checks.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::ks::{ks_critical_1pct, ks_statistic};
use super::mc::{derive_seed, draw_sums, mc_metrics, CiEstimate, McConfig, MetricKind};
use super::oracles::{
    ln_quad_outage, ln_second_moment_ber, ln_second_moment_capacity, quad_ber, quad_capacity,
};
use crate::cli::csv::fmt_f64;
use crate::error::{Error, Result};
use crate::fading::{FadingParams, SampleMode};
use crate::metrics::{
    avg_ber, avg_capacity, outage, snr_threshold_from_db, LinkConfig, MetricResult,
};

pub const QUAD_REL_TOL: f64 = 1e-6;
pub const MC_SIGMAS: f64 = 3.5;
pub const PHYSICAL_GAP_LIMIT: f64 = 0.03;
pub const KS_SAMPLES: usize = 100_000;
const PHYSICAL_SAMPLES: u64 = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Smoke,
    Full,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smoke" => Ok(Preset::Smoke),
            "full" => Ok(Preset::Full),
            other => Err(Error::domain(format!(
                "unknown preset '{other}' (expected smoke or full)"
            ))),
        }
    }
}

impl Preset {
    pub fn default_samples(&self) -> u64 {
        match self {
            Preset::Smoke => 100_000,
            Preset::Full => 1_000_000,
        }
    }

    pub fn points(&self) -> Vec<GridPoint> {
        type Axes<'a> = (&'a [u32], &'a [f64], &'a [f64], &'a [f64], &'a [f64]);
        let (ns, ms, mss, etas, lambdas): Axes = match self {
            Preset::Smoke => (&[1, 8], &[1.0, 4.0], &[5.0], &[0.0, 20.0], &[1.0]),
            Preset::Full => (
                &[1, 8, 16, 32],
                &[1.0, 4.0],
                &[2.0, 5.0],
                &[0.0, 10.0, 20.0, 30.0],
                &[1.0, 0.5],
            ),
        };
        let mut out = Vec::new();
        for &n_cells in ns {
            for &m in ms {
                for &m_s in mss {
                    for &eta_db in etas {
                        for &lambda in lambdas {
                            out.push(GridPoint {
                                index: out.len(),
                                n_cells,
                                m,
                                m_s,
                                eta_db,
                                lambda,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub index: usize,
    pub n_cells: u32,
    pub m: f64,
    pub m_s: f64,
    pub eta_db: f64,
    /// 1 for BPSK, 0.5 for BFSK.
    pub lambda: f64,
}

impl GridPoint {
    pub fn link(&self) -> Result<LinkConfig> {
        let f = FadingParams::new(self.m, self.m_s, 1.0)?;
        LinkConfig::with_eta(
            f,
            self.n_cells,
            snr_threshold_from_db(self.eta_db),
            self.lambda,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSettings {
    pub preset: Preset,
    pub seed: u64,
    pub n_samples: u64,
    pub mode: SampleMode,
    pub gamma_th_db: f64,
}

impl GridSettings {
    pub fn new(preset: Preset, seed: u64) -> Self {
        Self {
            preset,
            seed,
            n_samples: preset.default_samples(),
            mode: SampleMode::ModelDraw,
            gamma_th_db: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricCheck {
    pub metric: MetricKind,
    pub closed: MetricResult,
    pub quad: MetricResult,
    pub mc: CiEstimate,
    /// Standard error of the MC mean if the closed form were the true mean.
    pub null_std_error: f64,
    pub rel_diff: f64,
    pub z_score: f64,
    pub quad_ok: bool,
    pub mc_ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointReport {
    pub point: GridPoint,
    pub seed: u64,
    pub checks: Vec<MetricCheck>,
    pub ks_branch: f64,
    pub ks_sum: f64,
    pub ks_critical: f64,
    /// Physical-draw capacity estimate and its relative gap to the closed
    /// form; only for N > 1.
    pub physical: Option<(CiEstimate, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub settings: GridSettings,
    pub points: Vec<PointReport>,
}

fn relative_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(a.abs())
    }
}

/// `ln_second_moment` is ln E[h²] under the closed-form model; the null
/// standard error is built in log space because E[h²] can sit far below the
/// smallest double even when the mean does not.
fn check(
    metric: MetricKind,
    closed: MetricResult,
    quad: MetricResult,
    mc: CiEstimate,
    ln_second_moment: f64,
) -> MetricCheck {
    let rel_diff = relative_diff(closed.value, quad.value);
    let ln_c2 = 2.0 * closed.value.ln();
    let ln_var = if ln_second_moment > ln_c2 {
        ln_second_moment + (-(ln_c2 - ln_second_moment).exp_m1()).ln()
    } else {
        f64::NEG_INFINITY
    };
    let ln_se = 0.5 * (ln_var - (mc.n as f64).ln());
    let diff = (closed.value - mc.mean).abs();
    let z_score = if diff == 0.0 {
        0.0
    } else {
        (diff.ln() - ln_se).exp()
    };
    MetricCheck {
        metric,
        quad_ok: rel_diff <= QUAD_REL_TOL,
        mc_ok: z_score <= MC_SIGMAS,
        closed,
        quad,
        mc,
        null_std_error: ln_se.exp(),
        rel_diff,
        z_score,
    }
}

fn at(p: &GridPoint, what: &str, e: Error) -> Error {
    let where_ = format!(
        "{what} at N={} m={} m_s={} eta_db={} lambda={}",
        p.n_cells, p.m, p.m_s, p.eta_db, p.lambda
    );
    match e {
        Error::Domain(s) => Error::Domain(format!("{where_}: {s}")),
        Error::Numeric { message, partial } => Error::Numeric {
            message: format!("{where_}: {message}"),
            partial,
        },
        Error::Unsupported(s) => Error::Unsupported(format!("{where_}: {s}")),
    }
}

pub fn evaluate_point(p: &GridPoint, s: &GridSettings) -> Result<PointReport> {
    let cfg = p.link()?;
    let gamma_th = snr_threshold_from_db(s.gamma_th_db);
    let seed = derive_seed(s.seed, p.index as u64);
    let mc = McConfig::new(s.n_samples, seed, s.mode)?;
    let est = mc_metrics(&cfg, gamma_th, &mc).map_err(|e| at(p, "monte-carlo", e))?;

    let cap = avg_capacity(&cfg).map_err(|e| at(p, "capacity", e))?;
    let cap_q = quad_capacity(&cfg).map_err(|e| at(p, "capacity quadrature", e))?;
    let cap2 = ln_second_moment_capacity(&cfg)
        .map_err(|e| at(p, "capacity second moment", e))?
        .ln_value;
    let ber = avg_ber(&cfg).map_err(|e| at(p, "ber", e))?;
    let ber_q = quad_ber(&cfg).map_err(|e| at(p, "ber quadrature", e))?;
    let ber2 = ln_second_moment_ber(&cfg)
        .map_err(|e| at(p, "ber second moment", e))?
        .ln_value;
    let out = outage(&cfg, gamma_th).map_err(|e| at(p, "outage", e))?;
    let out_ln = ln_quad_outage(&cfg, gamma_th).map_err(|e| at(p, "outage quadrature", e))?;
    let out_q = out_ln.into_metric();
    // the indicator squared is itself
    let out2 = out_ln.ln_value;

    let physical = if p.n_cells > 1 {
        let pm = McConfig::new(
            PHYSICAL_SAMPLES.min(s.n_samples),
            derive_seed(seed, 3),
            SampleMode::PhysicalDraw,
        )?;
        let e = mc_metrics(&cfg, 0.0, &pm)?[0];
        Some((e, relative_diff(e.mean, cap.value)))
    } else {
        None
    };

    let checks = vec![
        check(MetricKind::Capacity, cap.clone(), cap_q, est[0], cap2),
        check(MetricKind::Ber, ber, ber_q, est[1], ber2),
        check(MetricKind::Outage, out, out_q, est[2], out2),
    ];

    let branch = cfg.fading;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 2));
    let xs: Vec<f64> = (0..KS_SAMPLES).map(|_| branch.sample(&mut rng)).collect();
    let ks_branch = ks_statistic(&xs, |v| branch.cdf(v).unwrap_or(f64::NAN))?;
    let model = cfg.model()?;
    let ys = draw_sums(
        &cfg,
        SampleMode::ModelDraw,
        KS_SAMPLES,
        derive_seed(seed, 1),
    )?;
    let ks_sum = ks_statistic(&ys, |v| model.sum_cdf(v).unwrap_or(f64::NAN))?;

    Ok(PointReport {
        point: *p,
        seed,
        checks,
        ks_branch,
        ks_sum,
        ks_critical: ks_critical_1pct(KS_SAMPLES),
        physical,
    })
}

/// Evaluate every point of the preset, in parallel; output order follows the
/// grid index.
pub fn run_grid(
    settings: &GridSettings,
    progress: impl Fn(usize, usize) + Sync,
) -> Result<ValidationReport> {
    let pts = settings.preset.points();
    let total = pts.len();
    let done = std::sync::atomic::AtomicUsize::new(0);
    let points = pts
        .par_iter()
        .map(|p| {
            let r = evaluate_point(p, settings);
            let k = done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
            progress(k, total);
            r
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ValidationReport {
        settings: *settings,
        points,
    })
}

impl ValidationReport {
    /// Coordinates and reasons of every master-check breach.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for r in &self.points {
            let p = &r.point;
            for c in &r.checks {
                let coord = format!(
                    "{} N={} m={} m_s={} eta_db={} lambda={}",
                    c.metric.as_str(),
                    p.n_cells,
                    p.m,
                    p.m_s,
                    p.eta_db,
                    p.lambda
                );
                if !c.quad_ok {
                    out.push(format!(
                        "{coord}: closed form {:e} vs quadrature {:e} (relative diff {:e})",
                        c.closed.value, c.quad.value, c.rel_diff
                    ));
                }
                if !c.mc_ok {
                    out.push(format!(
                        "{coord}: closed form {:e} vs monte-carlo {:e} ({:.2} standard errors)",
                        c.closed.value, c.mc.mean, c.z_score
                    ));
                }
            }
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }

    /// Points whose physical-draw capacity departs from the closed form by
    /// more than [`PHYSICAL_GAP_LIMIT`]. Diagnostic only.
    pub fn physical_gap_exceedances(&self) -> Vec<String> {
        self.points
            .iter()
            .filter_map(|r| {
                let (e, gap) = r.physical?;
                let p = &r.point;
                (gap > PHYSICAL_GAP_LIMIT).then(|| {
                    format!(
                        "N={} m={} m_s={} eta_db={} lambda={}: physical capacity {:e} differs by {:.2}%",
                        p.n_cells, p.m, p.m_s, p.eta_db, p.lambda, e.mean, 100.0 * gap
                    )
                })
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "point,N,m,m_s,eta_db,gamma_th_db,lambda,metric,closed_form,closed_error,quadrature,quadrature_error,\
             rel_diff,mc_mean,mc_std_error,mc_null_std_error,z_score,quad_ok,mc_ok,ks_branch,ks_sum,ks_critical,\
             physical_mean,physical_std_error,physical_gap,seed\n",
        );
        let st = &self.settings;
        for r in &self.points {
            let p = &r.point;
            for c in &r.checks {
                let (pm, pse, gap) = match (&r.physical, c.metric) {
                    (Some((e, g)), MetricKind::Capacity) => {
                        (fmt_f64(e.mean), fmt_f64(e.std_error), fmt_f64(*g))
                    }
                    _ => (String::new(), String::new(), String::new()),
                };
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    p.index,
                    p.n_cells,
                    fmt_f64(p.m),
                    fmt_f64(p.m_s),
                    fmt_f64(p.eta_db),
                    fmt_f64(st.gamma_th_db),
                    fmt_f64(p.lambda),
                    c.metric.as_str(),
                    fmt_f64(c.closed.value),
                    fmt_f64(c.closed.error_estimate),
                    fmt_f64(c.quad.value),
                    fmt_f64(c.quad.error_estimate),
                    fmt_f64(c.rel_diff),
                    fmt_f64(c.mc.mean),
                    fmt_f64(c.mc.std_error),
                    fmt_f64(c.null_std_error),
                    fmt_f64(c.z_score),
                    c.quad_ok,
                    c.mc_ok,
                    fmt_f64(r.ks_branch),
                    fmt_f64(r.ks_sum),
                    fmt_f64(r.ks_critical),
                    pm,
                    pse,
                    gap,
                    r.seed
                );
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_sizes() {
        assert_eq!(Preset::Smoke.points().len(), 8);
        let full = Preset::Full.points();
        assert_eq!(full.len(), 128);
        assert!(full.iter().enumerate().all(|(i, p)| p.index == i));
        assert!("medium".parse::<Preset>().is_err());
    }

    #[test]
    fn null_standard_error_handles_unresolved_events() {
        let closed = MetricResult::new(1e-40, crate::metrics::Method::ClosedForm, 0.0);
        let mc = CiEstimate {
            mean: 0.0,
            std_error: 0.0,
            n: 1_000_000,
        };
        let c = check(
            MetricKind::Outage,
            closed.clone(),
            closed,
            mc,
            1e-40f64.ln(),
        );
        assert!(c.mc_ok && c.quad_ok);
        assert!(c.z_score < 1e-10);
        // second moment far below the double range
        let closed = MetricResult::new(7e-292, crate::metrics::Method::ClosedForm, 0.0);
        let c = check(MetricKind::Ber, closed.clone(), closed, mc, -1000.0);
        assert!(c.mc_ok && c.z_score < 1.0, "{c:?}");
    }
}
