//! TOML scenario files.
//!
//! ```toml
//! [sweep]
//! axis = "p_s_dbm"            # p_s_dbm | eta_db | n_cells | gamma_th_db
//! start = -10
//! stop = 30
//! steps = 41
//! metrics = ["ber"]           # capacity | ber | outage
//! variants = ["exact", "asymptotic"]   # exact | asymptotic | quadrature | mc
//!
//! [link]
//! n_cells = [8, 16]           # list-valued keys span curve families
//! m = 1
//! lambda = [0.5, 1]
//!
//! [mc]
//! samples = 100000
//! seed = 42
//! mode = "model"              # model | physical
//! ```
//!
//! A file without `[sweep]` describes a single operating point.

use std::fmt;

use serde::Deserialize;
use toml::Spanned;

use crate::fading::SampleMode;
use crate::validation::MetricKind;

pub const DEFAULT_R_D: f64 = 1.0;
pub const DEFAULT_BETA: f64 = 2.7;
pub const DEFAULT_M_S: f64 = 5.0;
pub const DEFAULT_G_BAR: f64 = 1.0;
pub const DEFAULT_N0_DBM: f64 = 0.0;
pub const DEFAULT_M: f64 = 1.0;
pub const DEFAULT_N_CELLS: u32 = 1;
pub const DEFAULT_LAMBDA: f64 = 1.0;
pub const DEFAULT_GAMMA_TH_DB: f64 = 0.0;
pub const DEFAULT_MC_SAMPLES: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub key: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(
                f,
                "config error at line {l}, key `{}`: {}",
                self.key, self.message
            ),
            None => write!(f, "config error, key `{}`: {}", self.key, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    PsDbm,
    EtaDb,
    NCells,
    GammaThDb,
}

impl Axis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Axis::PsDbm => "p_s_dbm",
            Axis::EtaDb => "eta_db",
            Axis::NCells => "n_cells",
            Axis::GammaThDb => "gamma_th_db",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "p_s_dbm" => Axis::PsDbm,
            "eta_db" => Axis::EtaDb,
            "n_cells" => Axis::NCells,
            "gamma_th_db" => Axis::GammaThDb,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Exact,
    Asymptotic,
    Quadrature,
    Mc,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Exact => "exact",
            Variant::Asymptotic => "asymptotic",
            Variant::Quadrature => "quadrature",
            Variant::Mc => "mc",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "exact" => Variant::Exact,
            "asymptotic" => Variant::Asymptotic,
            "quadrature" => Variant::Quadrature,
            "mc" => Variant::Mc,
            _ => return None,
        })
    }
}

pub fn parse_metric(s: &str) -> Option<MetricKind> {
    Some(match s {
        "capacity" => MetricKind::Capacity,
        "ber" => MetricKind::Ber,
        "outage" => MetricKind::Outage,
        _ => return None,
    })
}

pub fn parse_mode(s: &str) -> Option<SampleMode> {
    Some(match s {
        "model" => SampleMode::ModelDraw,
        "physical" => SampleMode::PhysicalDraw,
        _ => return None,
    })
}

/// Transmit level: either source power in dBm or η directly in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Level {
    PsDbm(f64),
    EtaDb(f64),
}

/// Link parameters; list-valued fields enumerate curve families.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkSpec {
    pub n_cells: Vec<u32>,
    pub m: Vec<f64>,
    pub m_s: Vec<f64>,
    pub g_bar: f64,
    pub r_d: f64,
    pub beta: f64,
    pub n0_dbm: f64,
    pub lambda: Vec<f64>,
    /// Empty when the sweep axis supplies the level.
    pub levels: Vec<Level>,
    pub gamma_th_db: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McSettings {
    pub samples: u64,
    pub seed: u64,
    pub mode: SampleMode,
}

impl Default for McSettings {
    fn default() -> Self {
        Self {
            samples: DEFAULT_MC_SAMPLES,
            seed: 0,
            mode: SampleMode::ModelDraw,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub metrics: Vec<MetricKind>,
    pub variants: Vec<Variant>,
    pub link: LinkSpec,
    pub mc: McSettings,
}

impl SweepSpec {
    /// Axis values, evenly spaced and inclusive; rounded for `n_cells`.
    pub fn axis_values(&self) -> Vec<f64> {
        let n = self.steps;
        (0..n)
            .map(|i| {
                let v = if i + 1 == n {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64
                };
                if self.axis == Axis::NCells {
                    v.round()
                } else {
                    v
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParsedConfig {
    Sweep(SweepSpec),
    Point { link: LinkSpec, mc: McSettings },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    sweep: Option<RawSweep>,
    link: Option<RawLink>,
    mc: Option<RawMc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axis: Spanned<String>,
    start: Spanned<f64>,
    stop: Spanned<f64>,
    steps: Spanned<i64>,
    metrics: Option<Spanned<Vec<String>>>,
    variants: Option<Spanned<Vec<String>>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLink {
    n_cells: Option<Spanned<OneOrMany<i64>>>,
    m: Option<Spanned<OneOrMany<f64>>>,
    m_s: Option<Spanned<OneOrMany<f64>>>,
    g_bar: Option<Spanned<f64>>,
    r_d: Option<Spanned<f64>>,
    beta: Option<Spanned<f64>>,
    n0_dbm: Option<Spanned<f64>>,
    lambda: Option<Spanned<OneOrMany<f64>>>,
    p_s_dbm: Option<Spanned<OneOrMany<f64>>>,
    eta_db: Option<Spanned<OneOrMany<f64>>>,
    gamma_th_db: Option<Spanned<OneOrMany<f64>>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMc {
    samples: Option<Spanned<i64>>,
    seed: Option<Spanned<i64>>,
    mode: Option<Spanned<String>>,
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn line(&self, offset: usize) -> usize {
        let end = offset.min(self.text.len());
        self.text.as_bytes()[..end]
            .iter()
            .filter(|b| **b == b'\n')
            .count()
            + 1
    }

    fn err<T>(&self, key: &str, s: &Spanned<T>, message: impl Into<String>) -> ConfigError {
        ConfigError {
            key: key.to_string(),
            line: Some(self.line(s.span().start)),
            message: message.into(),
        }
    }
}

fn unlocated(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        key: key.to_string(),
        line: None,
        message: message.into(),
    }
}

fn finite_list(
    ctx: &Ctx,
    key: &str,
    v: &Spanned<OneOrMany<f64>>,
    ok: impl Fn(f64) -> bool,
    rule: &str,
) -> Result<Vec<f64>, ConfigError> {
    let xs = v.get_ref().to_vec();
    if xs.is_empty() {
        return Err(ctx.err(key, v, "list must not be empty"));
    }
    for x in &xs {
        if !x.is_finite() || !ok(*x) {
            return Err(ctx.err(key, v, format!("{key} {rule}, got {x}")));
        }
    }
    Ok(xs)
}

fn scalar(
    ctx: &Ctx,
    key: &str,
    v: &Option<Spanned<f64>>,
    default: f64,
    ok: impl Fn(f64) -> bool,
    rule: &str,
) -> Result<f64, ConfigError> {
    match v {
        None => Ok(default),
        Some(s) => {
            let x = *s.get_ref();
            if x.is_finite() && ok(x) {
                Ok(x)
            } else {
                Err(ctx.err(key, s, format!("{key} {rule}, got {x}")))
            }
        }
    }
}

fn parse_link(ctx: &Ctx, raw: &RawLink, axis: Option<Axis>) -> Result<LinkSpec, ConfigError> {
    let on_axis = |key: &str, present: Option<usize>| -> Result<(), ConfigError> {
        if let (Some(a), Some(off)) = (axis, present) {
            if a.as_str() == key
                || (key == "p_s_dbm" || key == "eta_db") && matches!(a, Axis::PsDbm | Axis::EtaDb)
            {
                return Err(ConfigError {
                    key: key.into(),
                    line: Some(ctx.line(off)),
                    message: format!(
                        "{key} cannot be fixed while the sweep axis is {}",
                        a.as_str()
                    ),
                });
            }
        }
        Ok(())
    };
    on_axis("n_cells", raw.n_cells.as_ref().map(|s| s.span().start))?;
    on_axis(
        "gamma_th_db",
        raw.gamma_th_db.as_ref().map(|s| s.span().start),
    )?;
    on_axis("p_s_dbm", raw.p_s_dbm.as_ref().map(|s| s.span().start))?;
    on_axis("eta_db", raw.eta_db.as_ref().map(|s| s.span().start))?;

    let n_cells = match &raw.n_cells {
        None => vec![DEFAULT_N_CELLS],
        Some(s) => {
            let v = s.get_ref().to_vec();
            if v.is_empty() {
                return Err(ctx.err("n_cells", s, "list must not be empty"));
            }
            v.iter()
                .map(|&n| {
                    u32::try_from(n).ok().filter(|n| *n >= 1).ok_or_else(|| {
                        ctx.err(
                            "n_cells",
                            s,
                            format!("n_cells must be a positive integer, got {n}"),
                        )
                    })
                })
                .collect::<Result<_, _>>()?
        }
    };
    let m = match &raw.m {
        None => vec![DEFAULT_M],
        Some(s) => finite_list(ctx, "m", s, |x| x > 0.0, "must be positive")?,
    };
    let m_s = match &raw.m_s {
        None => vec![DEFAULT_M_S],
        Some(s) => finite_list(ctx, "m_s", s, |x| x > 1.0, "must exceed 1")?,
    };
    let lambda = match &raw.lambda {
        None => vec![DEFAULT_LAMBDA],
        Some(s) => finite_list(
            ctx,
            "lambda",
            s,
            |x| x == 0.5 || x == 1.0,
            "must be 0.5 (BFSK) or 1 (BPSK)",
        )?,
    };
    let gamma_th_db = match &raw.gamma_th_db {
        None => vec![DEFAULT_GAMMA_TH_DB],
        Some(s) => finite_list(ctx, "gamma_th_db", s, |_| true, "must be finite")?,
    };
    let levels = match (&raw.p_s_dbm, &raw.eta_db) {
        (Some(p), Some(_)) => {
            return Err(ctx.err("eta_db", p, "give either p_s_dbm or eta_db, not both"))
        }
        (Some(p), None) => finite_list(ctx, "p_s_dbm", p, |_| true, "must be finite")?
            .into_iter()
            .map(Level::PsDbm)
            .collect(),
        (None, Some(e)) => finite_list(ctx, "eta_db", e, |_| true, "must be finite")?
            .into_iter()
            .map(Level::EtaDb)
            .collect(),
        (None, None) => {
            if matches!(axis, Some(Axis::PsDbm | Axis::EtaDb)) {
                Vec::new()
            } else {
                return Err(unlocated(
                    "p_s_dbm",
                    "a transmit level (p_s_dbm or eta_db) is required",
                ));
            }
        }
    };
    Ok(LinkSpec {
        n_cells,
        m,
        m_s,
        g_bar: scalar(
            ctx,
            "g_bar",
            &raw.g_bar,
            DEFAULT_G_BAR,
            |x| x > 0.0,
            "must be positive",
        )?,
        r_d: scalar(
            ctx,
            "r_d",
            &raw.r_d,
            DEFAULT_R_D,
            |x| x > 0.0,
            "must be positive",
        )?,
        beta: scalar(
            ctx,
            "beta",
            &raw.beta,
            DEFAULT_BETA,
            |x| x > 0.0,
            "must be positive",
        )?,
        n0_dbm: scalar(
            ctx,
            "n0_dbm",
            &raw.n0_dbm,
            DEFAULT_N0_DBM,
            |_| true,
            "must be finite",
        )?,
        lambda,
        levels,
        gamma_th_db,
    })
}

fn parse_mc(ctx: &Ctx, raw: &RawMc) -> Result<McSettings, ConfigError> {
    let mut mc = McSettings::default();
    if let Some(s) = &raw.samples {
        let n = *s.get_ref();
        if n < crate::validation::mc::MIN_SAMPLES as i64 {
            return Err(ctx.err(
                "samples",
                s,
                format!("samples must be at least 10000, got {n}"),
            ));
        }
        mc.samples = n as u64;
    }
    if let Some(s) = &raw.seed {
        let v = *s.get_ref();
        mc.seed = u64::try_from(v)
            .map_err(|_| ctx.err("seed", s, format!("seed must be non-negative, got {v}")))?;
    }
    if let Some(s) = &raw.mode {
        mc.mode = parse_mode(s.get_ref()).ok_or_else(|| {
            ctx.err(
                "mode",
                s,
                format!("mode must be model or physical, got '{}'", s.get_ref()),
            )
        })?;
    }
    Ok(mc)
}

fn parse_sweep(
    ctx: &Ctx,
    raw: &RawSweep,
    link: Option<&RawLink>,
    mc: McSettings,
) -> Result<SweepSpec, ConfigError> {
    let axis = Axis::parse(raw.axis.get_ref()).ok_or_else(|| {
        ctx.err(
            "axis",
            &raw.axis,
            format!(
                "axis must be one of p_s_dbm, eta_db, n_cells, gamma_th_db, got '{}'",
                raw.axis.get_ref()
            ),
        )
    })?;
    let (start, stop) = (*raw.start.get_ref(), *raw.stop.get_ref());
    if !start.is_finite() {
        return Err(ctx.err("start", &raw.start, "start must be finite"));
    }
    if !(stop.is_finite() && start < stop) {
        return Err(ctx.err(
            "stop",
            &raw.stop,
            format!("stop must exceed start ({start}), got {stop}"),
        ));
    }
    let steps = *raw.steps.get_ref();
    if steps < 2 {
        return Err(ctx.err(
            "steps",
            &raw.steps,
            format!("steps must be at least 2, got {steps}"),
        ));
    }
    if axis == Axis::NCells && (start < 1.0 || start.fract() != 0.0 || stop.fract() != 0.0) {
        return Err(ctx.err(
            "start",
            &raw.start,
            "an n_cells axis needs integer bounds of at least 1",
        ));
    }
    let metrics = match &raw.metrics {
        None => vec![MetricKind::Capacity],
        Some(s) => {
            if s.get_ref().is_empty() {
                return Err(ctx.err("metrics", s, "at least one metric is required"));
            }
            let mut v = Vec::new();
            for name in s.get_ref() {
                let k = parse_metric(name).ok_or_else(|| {
                    ctx.err(
                        "metrics",
                        s,
                        format!("unknown metric '{name}' (capacity, ber, outage)"),
                    )
                })?;
                if !v.contains(&k) {
                    v.push(k);
                }
            }
            v
        }
    };
    let variants = match &raw.variants {
        None => vec![Variant::Exact],
        Some(s) => {
            if s.get_ref().is_empty() {
                return Err(ctx.err("variants", s, "at least one variant is required"));
            }
            let mut v = Vec::new();
            for name in s.get_ref() {
                let k = Variant::parse(name).ok_or_else(|| {
                    ctx.err(
                        "variants",
                        s,
                        format!("unknown variant '{name}' (exact, asymptotic, quadrature, mc)"),
                    )
                })?;
                if !v.contains(&k) {
                    v.push(k);
                }
            }
            v
        }
    };
    let default_link = RawLink::default();
    let link = parse_link(ctx, link.unwrap_or(&default_link), Some(axis))?;
    let spec = SweepSpec {
        axis,
        start,
        stop,
        steps: steps as usize,
        metrics,
        variants,
        link,
        mc,
    };
    if axis == Axis::NCells {
        let v = spec.axis_values();
        if v.windows(2).any(|w| w[0] == w[1]) {
            return Err(ctx.err(
                "steps",
                &raw.steps,
                "n_cells axis has more steps than distinct integers",
            ));
        }
    }
    Ok(spec)
}

fn from_toml_error(ctx: &Ctx, e: toml::de::Error) -> ConfigError {
    let msg = e.message().trim().to_string();
    let key = msg
        .split('`')
        .nth(1)
        .map(str::to_string)
        .unwrap_or_else(|| "<document>".to_string());
    ConfigError {
        key,
        line: e.span().map(|s| ctx.line(s.start)),
        message: msg,
    }
}

/// Parse and validate a scenario file.
pub fn parse_config(text: &str) -> Result<ParsedConfig, ConfigError> {
    let ctx = Ctx { text };
    let raw: RawConfig = toml::from_str(text).map_err(|e| from_toml_error(&ctx, e))?;
    let mc = parse_mc(&ctx, raw.mc.as_ref().unwrap_or(&RawMc::default()))?;
    match &raw.sweep {
        Some(s) => Ok(ParsedConfig::Sweep(parse_sweep(
            &ctx,
            s,
            raw.link.as_ref(),
            mc,
        )?)),
        None => {
            let link = parse_link(&ctx, raw.link.as_ref().unwrap_or(&RawLink::default()), None)?;
            Ok(ParsedConfig::Point { link, mc })
        }
    }
}

/// Parse a file that must describe a sweep.
pub fn parse_sweep_config(text: &str) -> Result<SweepSpec, ConfigError> {
    match parse_config(text)? {
        ParsedConfig::Sweep(s) => Ok(s),
        ParsedConfig::Point { .. } => {
            Err(unlocated("sweep", "missing [sweep] section with an axis"))
        }
    }
}
