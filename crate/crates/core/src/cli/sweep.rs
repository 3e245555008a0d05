//! Sweep execution: curve families × axis values × metrics × variants.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use super::config::{Axis, Level, LinkSpec, McSettings, SweepSpec, Variant};
use super::csv::SweepRow;
use crate::error::{Error, Result};
use crate::fading::FadingParams;
use crate::metrics::{
    avg_ber, avg_ber_asymptotic, avg_capacity, avg_capacity_asymptotic, outage, outage_asymptotic,
    power_from_dbm, snr_threshold_from_db, LinkConfig, MetricResult,
};
use crate::validation::{
    derive_seed, mc_metrics, quad_ber, quad_capacity, quad_outage, McConfig, MetricKind,
};

/// One fully specified operating point plus the coordinates echoed in CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub axis: Axis,
    pub axis_value: f64,
    pub n_cells: u32,
    pub m: f64,
    pub m_s: f64,
    pub g_bar: f64,
    pub r_d: f64,
    pub beta: f64,
    pub n0_dbm: f64,
    pub lambda: f64,
    pub gamma_th_db: f64,
    pub level: Level,
}

impl Point {
    pub fn link(&self) -> Result<LinkConfig> {
        let fading = FadingParams::new(self.m, self.m_s, self.g_bar)?;
        let n0 = power_from_dbm(self.n0_dbm);
        let p_s = match self.level {
            Level::PsDbm(p) => power_from_dbm(p),
            // choose P_s so that p_s·r_d^{−β}/n0 hits the requested η
            Level::EtaDb(e) => snr_threshold_from_db(e) * n0 * self.r_d.powf(self.beta),
        };
        LinkConfig::new(
            fading,
            self.n_cells,
            self.r_d,
            self.beta,
            p_s,
            n0,
            self.lambda,
        )
    }

    fn describe(&self) -> String {
        format!(
            "{}={} N={} m={} m_s={} lambda={} gamma_th_db={}",
            self.axis.as_str(),
            self.axis_value,
            self.n_cells,
            self.m,
            self.m_s,
            self.lambda,
            self.gamma_th_db
        )
    }
}

/// Every (family, axis value) point in output order.
pub fn expand(spec: &SweepSpec) -> Vec<Point> {
    let l = &spec.link;
    let levels: Vec<Option<Level>> = if l.levels.is_empty() {
        vec![None]
    } else {
        l.levels.iter().copied().map(Some).collect()
    };
    let n_cells: Vec<Option<u32>> = if spec.axis == Axis::NCells {
        vec![None]
    } else {
        l.n_cells.iter().copied().map(Some).collect()
    };
    let gammas: Vec<Option<f64>> = if spec.axis == Axis::GammaThDb {
        vec![None]
    } else {
        l.gamma_th_db.iter().copied().map(Some).collect()
    };
    let mut out = Vec::new();
    for &n in &n_cells {
        for &m in &l.m {
            for &m_s in &l.m_s {
                for &lambda in &l.lambda {
                    for &g in &gammas {
                        for &lev in &levels {
                            for v in spec.axis_values() {
                                let (n, g, lev) = match spec.axis {
                                    Axis::PsDbm => (n.unwrap(), g.unwrap(), Level::PsDbm(v)),
                                    Axis::EtaDb => (n.unwrap(), g.unwrap(), Level::EtaDb(v)),
                                    Axis::NCells => (v as u32, g.unwrap(), lev.unwrap()),
                                    Axis::GammaThDb => (n.unwrap(), v, lev.unwrap()),
                                };
                                out.push(base_point(spec.axis, v, l, n, m, m_s, lambda, g, lev));
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn base_point(
    axis: Axis,
    axis_value: f64,
    l: &LinkSpec,
    n_cells: u32,
    m: f64,
    m_s: f64,
    lambda: f64,
    gamma_th_db: f64,
    level: Level,
) -> Point {
    Point {
        axis,
        axis_value,
        n_cells,
        m,
        m_s,
        g_bar: l.g_bar,
        r_d: l.r_d,
        beta: l.beta,
        n0_dbm: l.n0_dbm,
        lambda,
        gamma_th_db,
        level,
    }
}

fn with_coordinates(p: &Point, e: Error) -> Error {
    match e {
        Error::Domain(s) => Error::Domain(format!("{}: {s}", p.describe())),
        Error::Numeric { message, partial } => Error::Numeric {
            message: format!("{}: {message}", p.describe()),
            partial,
        },
        Error::Unsupported(s) => Error::Unsupported(format!("{}: {s}", p.describe())),
    }
}

fn closed(which: MetricKind, v: Variant, cfg: &LinkConfig, gamma_th: f64) -> Result<MetricResult> {
    match (which, v) {
        (MetricKind::Capacity, Variant::Exact) => avg_capacity(cfg),
        (MetricKind::Capacity, Variant::Asymptotic) => avg_capacity_asymptotic(cfg),
        (MetricKind::Capacity, Variant::Quadrature) => quad_capacity(cfg),
        (MetricKind::Ber, Variant::Exact) => avg_ber(cfg),
        (MetricKind::Ber, Variant::Asymptotic) => avg_ber_asymptotic(cfg),
        (MetricKind::Ber, Variant::Quadrature) => quad_ber(cfg),
        (MetricKind::Outage, Variant::Exact) => outage(cfg, gamma_th),
        (MetricKind::Outage, Variant::Asymptotic) => outage_asymptotic(cfg, gamma_th),
        (MetricKind::Outage, Variant::Quadrature) => quad_outage(cfg, gamma_th),
        (_, Variant::Mc) => unreachable!("handled by the caller"),
    }
}

/// Rows for one operating point; `index` selects the MC substream.
pub fn evaluate_point(
    p: &Point,
    metrics: &[MetricKind],
    variants: &[Variant],
    mc: &McSettings,
    index: u64,
) -> Result<Vec<SweepRow>> {
    let cfg = p.link().map_err(|e| with_coordinates(p, e))?;
    let gamma_th = snr_threshold_from_db(p.gamma_th_db);
    let point_seed = derive_seed(mc.seed, index);
    let mc_est = if variants.contains(&Variant::Mc) {
        let c = McConfig::new(mc.samples, point_seed, mc.mode)?;
        Some(mc_metrics(&cfg, gamma_th, &c).map_err(|e| with_coordinates(p, e))?)
    } else {
        None
    };
    let eta_db = 10.0 * cfg.eta().log10();
    let mut rows = Vec::with_capacity(metrics.len() * variants.len());
    for &which in metrics {
        for &v in variants {
            let (value, err, seed) = match (v, &mc_est) {
                (Variant::Mc, Some(est)) => {
                    let e = est[which as usize];
                    (e.mean, e.std_error, point_seed)
                }
                _ => {
                    let r = closed(which, v, &cfg, gamma_th).map_err(|e| with_coordinates(p, e))?;
                    (r.value, r.error_estimate, mc.seed)
                }
            };
            rows.push(SweepRow {
                axis: p.axis.as_str(),
                axis_value: p.axis_value,
                metric: which.as_str(),
                variant: v.as_str(),
                n_cells: p.n_cells,
                m: p.m,
                m_s: p.m_s,
                g_bar: p.g_bar,
                r_d: p.r_d,
                beta: p.beta,
                n0_dbm: p.n0_dbm,
                lambda: p.lambda,
                gamma_th_db: p.gamma_th_db,
                value,
                error_estimate: err,
                seed,
                eta_db,
            });
        }
    }
    Ok(rows)
}

/// Evaluate the whole sweep on the current rayon pool. Rows come back in
/// deterministic order whatever the completion order.
pub fn run_sweep(
    spec: &SweepSpec,
    progress: impl Fn(usize, usize) + Sync,
) -> Result<Vec<SweepRow>> {
    let points = expand(spec);
    let total = points.len();
    let done = AtomicUsize::new(0);
    let chunks = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let r = evaluate_point(p, &spec.metrics, &spec.variants, &spec.mc, i as u64);
            progress(done.fetch_add(1, Ordering::Relaxed) + 1, total);
            r
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(chunks.concat())
}
