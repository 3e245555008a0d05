//! Command-line front end of the `ris-fading` binary.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 numeric
//! error, 4 validation failure.

pub mod config;
pub mod csv;
pub mod sweep;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::fading::SampleMode;
use crate::specfun::identities::identity_suite;
use crate::validation::{run_grid, GridSettings, Preset};
use config::{
    parse_config, parse_metric, Axis, ConfigError, Level, McSettings, ParsedConfig, SweepSpec,
    Variant,
};

pub use config::parse_sweep_config;
pub use sweep::run_sweep;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_VALIDATION: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numeric(_) => EXIT_NUMERIC,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) => CliError::Config(e.to_string()),
            Error::Numeric { .. } | Error::Unsupported(_) => CliError::Numeric(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Model,
    Physical,
}

impl From<ModeArg> for SampleMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Model => SampleMode::ModelDraw,
            ModeArg::Physical => SampleMode::PhysicalDraw,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    Smoke,
    Full,
}

/// RIS link analytics over Fisher-Snedecor F fading.
#[derive(Debug, Parser)]
#[command(name = "ris-fading", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads (default: all hardware threads).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Master seed for Monte-Carlo streams.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Monte-Carlo samples per point.
    #[arg(long = "mc-samples", global = true)]
    pub mc_samples: Option<u64>,

    /// Monte-Carlo channel draw.
    #[arg(long = "mc-mode", global = true, value_enum)]
    pub mc_mode: Option<ModeArg>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate metrics at a single operating point and print CSV rows.
    Metrics(PointArgs),
    /// Run the sweep described by a TOML file.
    Sweep { config: PathBuf },
    /// Run the oracle-agreement grid and emit its report.
    Validate {
        #[arg(long, value_enum)]
        preset: PresetArg,
    },
    /// Check the special-function identity suite.
    Selftest,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    /// Optional TOML file with a [link] (and [mc]) section; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "n-cells")]
    pub n_cells: Option<u32>,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long = "m-s")]
    pub m_s: Option<f64>,
    #[arg(long = "g-bar")]
    pub g_bar: Option<f64>,
    #[arg(long = "r-d")]
    pub r_d: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(
        long = "p-s-dbm",
        conflicts_with = "eta_db",
        allow_hyphen_values = true
    )]
    pub p_s_dbm: Option<f64>,
    #[arg(long = "eta-db", allow_hyphen_values = true)]
    pub eta_db: Option<f64>,
    #[arg(long = "n0-dbm", allow_hyphen_values = true)]
    pub n0_dbm: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long = "gamma-th-db", allow_hyphen_values = true)]
    pub gamma_th_db: Option<f64>,
    /// Comma-separated subset of capacity, ber, outage.
    #[arg(long, value_delimiter = ',', default_value = "capacity")]
    pub metric: Vec<String>,
    /// Comma-separated subset of exact, asymptotic, quadrature, mc.
    #[arg(long, value_delimiter = ',', default_value = "exact")]
    pub variant: Vec<String>,
}

fn apply_mc_overrides(mc: &mut McSettings, cli: &Cli) -> Result<(), CliError> {
    if let Some(s) = cli.seed {
        mc.seed = s;
    }
    if let Some(n) = cli.mc_samples {
        if n < crate::validation::mc::MIN_SAMPLES {
            return Err(CliError::Config(format!(
                "--mc-samples must be at least 10000, got {n}"
            )));
        }
        mc.samples = n;
    }
    if let Some(m) = cli.mc_mode {
        mc.mode = m.into();
    }
    Ok(())
}

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("cannot write standard output: {e}"))),
    }
}

fn progress(label: &'static str) -> impl Fn(usize, usize) + Sync {
    move |k, n| {
        if k == n || k % 16 == 0 {
            eprintln!("{label}: {k}/{n} points");
        }
    }
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

fn cmd_metrics(cli: &Cli, a: &PointArgs) -> Result<(), CliError> {
    let (mut link, mut mc) = match &a.config {
        Some(p) => match parse_config(&read(p)?)? {
            ParsedConfig::Point { link, mc } => (link, mc),
            ParsedConfig::Sweep(_) => {
                return Err(CliError::Config(
                    "metrics takes a point config; use the sweep command for [sweep] files".into(),
                ))
            }
        },
        None => {
            // an empty document yields all defaults but has no level yet
            let text = format!("[link]\neta_db = {}\n", a.eta_db.unwrap_or(0.0));
            match parse_config(&text)? {
                ParsedConfig::Point { link, mc } => (link, mc),
                ParsedConfig::Sweep(_) => unreachable!(),
            }
        }
    };
    apply_mc_overrides(&mut mc, cli)?;
    if let Some(v) = a.n_cells {
        link.n_cells = vec![v];
    }
    if let Some(v) = a.m {
        link.m = vec![v];
    }
    if let Some(v) = a.m_s {
        link.m_s = vec![v];
    }
    if let Some(v) = a.lambda {
        link.lambda = vec![v];
    }
    if let Some(v) = a.gamma_th_db {
        link.gamma_th_db = vec![v];
    }
    link.g_bar = a.g_bar.unwrap_or(link.g_bar);
    link.r_d = a.r_d.unwrap_or(link.r_d);
    link.beta = a.beta.unwrap_or(link.beta);
    link.n0_dbm = a.n0_dbm.unwrap_or(link.n0_dbm);
    if let Some(p) = a.p_s_dbm {
        link.levels = vec![Level::PsDbm(p)];
    } else if let Some(e) = a.eta_db {
        link.levels = vec![Level::EtaDb(e)];
    }
    if link.n_cells.len() != 1
        || link.m.len() != 1
        || link.m_s.len() != 1
        || link.lambda.len() != 1
        || link.gamma_th_db.len() != 1
        || link.levels.len() != 1
    {
        return Err(CliError::Config(
            "metrics evaluates one point; list-valued keys belong in a sweep".into(),
        ));
    }
    if link.m_s[0] <= 1.0 {
        return Err(CliError::Config(format!(
            "m_s must exceed 1, got {}",
            link.m_s[0]
        )));
    }
    let metrics = a
        .metric
        .iter()
        .map(|s| {
            parse_metric(s.trim()).ok_or_else(|| CliError::Config(format!("unknown metric '{s}'")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let variants = a
        .variant
        .iter()
        .map(|s| {
            Variant::parse(s.trim())
                .ok_or_else(|| CliError::Config(format!("unknown variant '{s}'")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let level = link.levels[0];
    let (axis, axis_value) = match level {
        Level::PsDbm(p) => (Axis::PsDbm, p),
        Level::EtaDb(e) => (Axis::EtaDb, e),
    };
    let point = sweep::Point {
        axis,
        axis_value,
        n_cells: link.n_cells[0],
        m: link.m[0],
        m_s: link.m_s[0],
        g_bar: link.g_bar,
        r_d: link.r_d,
        beta: link.beta,
        n0_dbm: link.n0_dbm,
        lambda: link.lambda[0],
        gamma_th_db: link.gamma_th_db[0],
        level,
    };
    let rows = sweep::evaluate_point(&point, &metrics, &variants, &mc, 0)?;
    emit(cli, &csv::render(&rows))
}

fn cmd_sweep(cli: &Cli, path: &PathBuf) -> Result<(), CliError> {
    let mut spec: SweepSpec = parse_sweep_config(&read(path)?)?;
    apply_mc_overrides(&mut spec.mc, cli)?;
    let rows = run_sweep(&spec, progress("sweep"))?;
    emit(cli, &csv::render(&rows))
}

fn cmd_validate(cli: &Cli, preset: PresetArg) -> Result<(), CliError> {
    let preset = match preset {
        PresetArg::Smoke => Preset::Smoke,
        PresetArg::Full => Preset::Full,
    };
    let mut settings = GridSettings::new(preset, cli.seed.unwrap_or(0));
    if let Some(n) = cli.mc_samples {
        if n < crate::validation::mc::MIN_SAMPLES {
            return Err(CliError::Config(format!(
                "--mc-samples must be at least 10000, got {n}"
            )));
        }
        settings.n_samples = n;
    }
    if let Some(m) = cli.mc_mode {
        settings.mode = m.into();
    }
    let report = run_grid(&settings, progress("validate"))?;
    emit(cli, &report.to_csv())?;
    for g in report.physical_gap_exceedances() {
        eprintln!("note: {g}");
    }
    let failures = report.failures();
    if failures.is_empty() {
        eprintln!("validate: all {} points agree", report.points.len());
        Ok(())
    } else {
        for f in &failures {
            eprintln!("FAIL {f}");
        }
        Err(CliError::Validation(format!(
            "{} check(s) failed",
            failures.len()
        )))
    }
}

fn cmd_selftest(cli: &Cli) -> Result<(), CliError> {
    let checks = identity_suite()?;
    let mut text = String::from("identity,argument,method,expected,value,rel_error,pass\n");
    let mut failed = 0;
    for c in &checks {
        let pass = c.passed(1e-9);
        failed += usize::from(!pass);
        text.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            c.name,
            csv::fmt_f64(c.argument),
            c.method.as_str(),
            csv::fmt_f64(c.expected),
            csv::fmt_f64(c.got),
            csv::fmt_f64(c.rel_error),
            pass
        ));
    }
    emit(cli, &text)?;
    if failed > 0 {
        return Err(CliError::Validation(format!(
            "{failed} identity check(s) failed"
        )));
    }
    eprintln!("selftest: {} identity checks passed", checks.len());
    Ok(())
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("cannot build thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Metrics(a) => cmd_metrics(cli, a),
        Command::Sweep { config } => cmd_sweep(cli, config),
        Command::Validate { preset } => cmd_validate(cli, *preset),
        Command::Selftest => cmd_selftest(cli),
    })
}

/// Parse arguments, run, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
