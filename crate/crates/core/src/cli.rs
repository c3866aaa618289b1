//! Command-line front end.
//!
//! Subcommands: `sweep` (tabulate a quantity over a grid, CSV or JSON),
//! `verify` (run the named invariant checks), `zeros` (vanishing points of
//! the vacuum-discrimination bound), `deform` (deformed-binomial pmf tables),
//! and `limits` (extreme-parameter limit laws).
//!
//! Exit codes: 0 success, 1 verification failure, 2 argument error,
//! 3 domain error, 4 I/O error.

use crate::an_core::{bernoulli_transform, AnFamily};
use crate::deformed_binomial::{
    asym_distribution, asym_polynomials, sym_distribution, sym_polynomials, DeformError,
    DeformedBinomialDist, DeformedSequence,
};
use crate::families::{limit_checks, make_family, FamilySpec};
use crate::helstrom::{find_hb_zeros, helstrom_of_nbar, HelstromError};
use crate::verify::run_suite;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_BAD_ARGS: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Environment variable capping the sweep worker count (defaults to the
/// available parallelism).
pub const WORKERS_ENV: &str = "ANCS_WORKERS";

/// Terminal failure of a subcommand: exit code plus a message for stderr.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn args(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_BAD_ARGS,
            message: message.into(),
        }
    }

    fn domain(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_DOMAIN,
            message: message.into(),
        }
    }

    fn io(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_IO,
            message: message.into(),
        }
    }
}

type CmdResult<T> = Result<T, Failure>;

#[derive(Parser)]
#[command(
    name = "ancs",
    version,
    about = "Photon statistics and Helstrom bounds for generalized coherent states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate a quantity over a parameter grid and write CSV or JSON.
    Sweep(SweepArgs),
    /// Run named invariant checks and report each with its tolerance.
    Verify(VerifyArgs),
    /// Locate mean counts where the discrimination bound vanishes.
    Zeros(ZerosArgs),
    /// Emit a deformed-binomial pmf table.
    Deform(DeformArgs),
    /// Compare extreme-parameter families against their limit laws.
    Limits(LimitsArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// Family kind: gs, spin, perelomov, barut_girardello, hermite, abel,
    /// sg, or sgm.
    #[arg(long)]
    family: Option<String>,
    /// Family parameter as `name=value`; may be repeated.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    param: Vec<String>,
    /// Quantity to tabulate: pn_table, nbar_of_u, mandel_of_nbar, helstrom,
    /// delta, or log_helstrom.
    #[arg(long)]
    quantity: Option<String>,
    /// Sweep axis: u (intensity) or nbar (mean photon number). Defaults to
    /// the quantity's natural axis.
    #[arg(long)]
    axis: Option<String>,
    /// First grid point.
    #[arg(long)]
    lo: Option<f64>,
    /// Last grid point (inclusive).
    #[arg(long)]
    hi: Option<f64>,
    /// Number of grid points (at least 2).
    #[arg(long)]
    count: Option<usize>,
    /// Space the grid logarithmically (requires lo > 0).
    #[arg(long)]
    log_grid: bool,
    /// Detection efficiency in (0, 1].
    #[arg(long)]
    eta: Option<f64>,
    /// Prior probability of the vacuum hypothesis, in (0, 1).
    #[arg(long)]
    xi0: Option<f64>,
    /// Output format: csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// TOML file whose keys mirror these flags; flags win on conflict.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Check suite: all, specfun, an_core, families, deformed_binomial, or
    /// helstrom.
    #[arg(long, default_value = "all")]
    suite: String,
}

#[derive(Args)]
struct ZerosArgs {
    /// Oscillatory family kind: sg or sgm.
    #[arg(long)]
    family: String,
    /// Family parameter as `name=value`; may be repeated.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    param: Vec<String>,
    /// Range start (mean photon number).
    #[arg(long, default_value_t = 0.0)]
    lo: f64,
    /// Range end (mean photon number).
    #[arg(long, default_value_t = 6.0)]
    hi: f64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DeformArgs {
    /// Deformation sequence: gs, perelomov_type, hermite, or abel.
    #[arg(long)]
    sequence: String,
    /// Sequence parameter as `name=value` (s, a, or beta).
    #[arg(long = "param", value_name = "NAME=VALUE")]
    param: Vec<String>,
    /// Number of trials.
    #[arg(long)]
    n: usize,
    /// Win probability parameter in [0, 1].
    #[arg(long)]
    eta: f64,
    /// Deformation flavor: asym or sym.
    #[arg(long, default_value = "asym")]
    flavor: String,
    /// Output format: csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Output path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct LimitsArgs {
    /// Family kind with a documented limit law (spin, perelomov, abel).
    #[arg(long)]
    family: String,
    /// Family parameter as `name=value`; may be repeated.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    param: Vec<String>,
}

/// Parses arguments and runs the selected subcommand, returning the process
/// exit code. The binary wraps this; tests call it directly.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Help and version requests print to stdout and succeed.
            return if e.use_stderr() { EXIT_BAD_ARGS } else { EXIT_OK };
        }
    };
    init_workers();
    let outcome = match cli.command {
        Command::Sweep(a) => cmd_sweep(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Zeros(a) => cmd_zeros(a),
        Command::Deform(a) => cmd_deform(a),
        Command::Limits(a) => cmd_limits(a),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

/// Caps the rayon pool via the environment; the default pool already uses
/// the available parallelism. Repeat calls are harmless no-ops.
fn init_workers() {
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
}

// ---------------------------------------------------------------------------
// sweep

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Quantity {
    PnTable,
    NbarOfU,
    MandelOfNbar,
    Helstrom,
    Delta,
    LogHelstrom,
}

impl Quantity {
    fn parse(s: &str) -> CmdResult<Self> {
        Ok(match s {
            "pn_table" => Quantity::PnTable,
            "nbar_of_u" => Quantity::NbarOfU,
            "mandel_of_nbar" => Quantity::MandelOfNbar,
            "helstrom" => Quantity::Helstrom,
            "delta" => Quantity::Delta,
            "log_helstrom" => Quantity::LogHelstrom,
            other => {
                return Err(Failure::args(format!(
                    "unknown quantity `{other}` (expected pn_table, nbar_of_u, mandel_of_nbar, helstrom, delta, log_helstrom)"
                )))
            }
        })
    }

    fn name(self) -> &'static str {
        match self {
            Quantity::PnTable => "pn_table",
            Quantity::NbarOfU => "nbar_of_u",
            Quantity::MandelOfNbar => "mandel_of_nbar",
            Quantity::Helstrom => "helstrom",
            Quantity::Delta => "delta",
            Quantity::LogHelstrom => "log_helstrom",
        }
    }

    /// The axis a quantity is naturally plotted against.
    fn default_axis(self) -> Axis {
        match self {
            Quantity::PnTable | Quantity::NbarOfU => Axis::U,
            _ => Axis::Nbar,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Axis {
    U,
    Nbar,
}

impl Axis {
    fn parse(s: &str) -> CmdResult<Self> {
        match s {
            "u" => Ok(Axis::U),
            "nbar" => Ok(Axis::Nbar),
            other => Err(Failure::args(format!(
                "unknown axis `{other}` (expected u or nbar)"
            ))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Axis::U => "u",
            Axis::Nbar => "nbar",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    fn parse(s: &str) -> CmdResult<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Failure::args(format!(
                "unknown format `{other}` (expected csv or json)"
            ))),
        }
    }
}

/// Fully validated sweep request.
struct SweepRequest {
    family: FamilySpec,
    quantity: Quantity,
    axis: Axis,
    lo: f64,
    hi: f64,
    count: usize,
    log_grid: bool,
    eta: f64,
    xi0: f64,
    format: OutputFormat,
    output: Option<PathBuf>,
}

/// Optional values read from a `--config` file; every key mirrors a flag.
#[derive(Default)]
struct SweepConfig {
    family: Option<String>,
    params: Vec<(String, f64)>,
    quantity: Option<String>,
    axis: Option<String>,
    lo: Option<f64>,
    hi: Option<f64>,
    count: Option<usize>,
    log_grid: Option<bool>,
    eta: Option<f64>,
    xi0: Option<f64>,
    format: Option<String>,
    output: Option<PathBuf>,
}

fn config_number(key: &str, value: &toml::Value) -> CmdResult<f64> {
    match value {
        toml::Value::Float(v) => Ok(*v),
        toml::Value::Integer(v) => Ok(*v as f64),
        _ => Err(Failure::args(format!("config key `{key}` must be a number"))),
    }
}

fn config_string(key: &str, value: &toml::Value) -> CmdResult<String> {
    value
        .as_str()
        .map(str::to_string)
        .ok_or_else(|| Failure::args(format!("config key `{key}` must be a string")))
}

fn load_config(path: &Path) -> CmdResult<SweepConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::io(format!("cannot read config {}: {e}", path.display())))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e| Failure::args(format!("config {}: {e}", path.display())))?;
    let mut cfg = SweepConfig::default();
    for (key, value) in &table {
        match key.as_str() {
            "family" => cfg.family = Some(config_string(key, value)?),
            "quantity" => cfg.quantity = Some(config_string(key, value)?),
            "axis" => cfg.axis = Some(config_string(key, value)?),
            "format" => cfg.format = Some(config_string(key, value)?),
            "output" => cfg.output = Some(PathBuf::from(config_string(key, value)?)),
            "lo" => cfg.lo = Some(config_number(key, value)?),
            "hi" => cfg.hi = Some(config_number(key, value)?),
            "eta" => cfg.eta = Some(config_number(key, value)?),
            "xi0" => cfg.xi0 = Some(config_number(key, value)?),
            "count" => {
                let n = value.as_integer().ok_or_else(|| {
                    Failure::args("config key `count` must be an integer".to_string())
                })?;
                if n < 0 {
                    return Err(Failure::args("config key `count` must be nonnegative"));
                }
                cfg.count = Some(n as usize);
            }
            "log_grid" => {
                cfg.log_grid = Some(value.as_bool().ok_or_else(|| {
                    Failure::args("config key `log_grid` must be a boolean".to_string())
                })?)
            }
            "param" => {
                let sub = value.as_table().ok_or_else(|| {
                    Failure::args("config key `param` must be a table of name = value".to_string())
                })?;
                for (name, v) in sub {
                    cfg.params.push((name.clone(), config_number(name, v)?));
                }
            }
            other => {
                return Err(Failure::args(format!("unknown config key `{other}`")));
            }
        }
    }
    Ok(cfg)
}

/// Splits a `name=value` parameter flag.
fn parse_param(raw: &str) -> CmdResult<(String, f64)> {
    let (name, value) = raw
        .split_once('=')
        .ok_or_else(|| Failure::args(format!("malformed --param `{raw}` (expected name=value)")))?;
    let value: f64 = value
        .parse()
        .map_err(|_| Failure::args(format!("malformed --param `{raw}` (value is not a number)")))?;
    Ok((name.to_string(), value))
}

/// Merges config parameters with flag parameters; flags win per name.
fn merge_params(config: Vec<(String, f64)>, flags: &[String]) -> CmdResult<Vec<(String, f64)>> {
    let mut params = config;
    for raw in flags {
        let (name, value) = parse_param(raw)?;
        if let Some(slot) = params.iter_mut().find(|(n, _)| *n == name) {
            slot.1 = value;
        } else {
            params.push((name, value));
        }
    }
    Ok(params)
}

fn resolve_sweep(args: SweepArgs) -> CmdResult<SweepRequest> {
    let cfg = match &args.config {
        Some(path) => load_config(path)?,
        None => SweepConfig::default(),
    };
    let kind = args
        .family
        .or(cfg.family)
        .ok_or_else(|| Failure::args("missing --family"))?;
    let params = merge_params(cfg.params, &args.param)?;
    let family = FamilySpec::parse(&kind, &params).map_err(|e| Failure::args(e.to_string()))?;
    let quantity = Quantity::parse(
        &args
            .quantity
            .or(cfg.quantity)
            .ok_or_else(|| Failure::args("missing --quantity"))?,
    )?;
    let axis = match args.axis.or(cfg.axis) {
        Some(s) => Axis::parse(&s)?,
        None => quantity.default_axis(),
    };
    if quantity == Quantity::NbarOfU && axis != Axis::U {
        return Err(Failure::args("quantity nbar_of_u requires --axis u"));
    }
    let lo = args.lo.or(cfg.lo).ok_or_else(|| Failure::args("missing --lo"))?;
    let hi = args.hi.or(cfg.hi).ok_or_else(|| Failure::args("missing --hi"))?;
    let count = args
        .count
        .or(cfg.count)
        .ok_or_else(|| Failure::args("missing --count"))?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Failure::args(format!(
            "invalid grid: lo = {lo}, hi = {hi} (need finite lo < hi)"
        )));
    }
    if count < 2 {
        return Err(Failure::args(format!("invalid grid: count = {count} (need >= 2)")));
    }
    if lo < 0.0 {
        return Err(Failure::args(format!("invalid grid: lo = {lo} (need >= 0)")));
    }
    let log_grid = args.log_grid || cfg.log_grid.unwrap_or(false);
    if log_grid && lo <= 0.0 {
        return Err(Failure::args("--log-grid requires lo > 0"));
    }
    let eta = args.eta.or(cfg.eta).unwrap_or(1.0);
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Failure::args(format!("eta = {eta} outside (0, 1]")));
    }
    let xi0 = args.xi0.or(cfg.xi0).unwrap_or(0.5);
    if !(xi0 > 0.0 && xi0 < 1.0) {
        return Err(Failure::args(format!("xi0 = {xi0} outside (0, 1)")));
    }
    let format = match args.format.or(cfg.format) {
        Some(s) => OutputFormat::parse(&s)?,
        None => OutputFormat::Csv,
    };
    Ok(SweepRequest {
        family,
        quantity,
        axis,
        lo,
        hi,
        count,
        log_grid,
        eta,
        xi0,
        format,
        output: args.output.or(cfg.output),
    })
}

/// Grid of `count` points from `lo` to `hi` inclusive, linear or log spaced.
/// The endpoints are exact.
fn build_grid(lo: f64, hi: f64, count: usize, log: bool) -> Vec<f64> {
    let last = (count - 1) as f64;
    (0..count)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == count - 1 {
                hi
            } else if log {
                (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / last).exp()
            } else {
                lo + (hi - lo) * i as f64 / last
            }
        })
        .collect()
}

fn an_failure(e: crate::an_core::AnError) -> Failure {
    Failure::domain(e.to_string())
}

fn helstrom_failure(e: HelstromError) -> Failure {
    match e {
        HelstromError::InvalidPrior(_) | HelstromError::InvalidEta(_) | HelstromError::InvalidGrid => {
            Failure::args(e.to_string())
        }
        _ => Failure::domain(e.to_string()),
    }
}

/// One sweep row. Columns `u` and `nbar` always describe the prepared state
/// (perfect detection); the detection efficiency enters the tabulated
/// quantity itself (thinned pmf, detected mean `eta * nbar`, detected Mandel
/// parameter `eta * Q`, or the bound at effective mean `eta * nbar`).
fn sweep_row(fam: &AnFamily, req: &SweepRequest, x: f64) -> CmdResult<Vec<f64>> {
    let (u, nbar) = match req.axis {
        Axis::U => (x, fam.moments(x).map_err(an_failure)?.nbar),
        Axis::Nbar => (fam.invert_nbar(x).map_err(an_failure)?, x),
    };
    match req.quantity {
        Quantity::PnTable => {
            let mut dist = fam.distribution(u).map_err(an_failure)?;
            if req.eta < 1.0 {
                dist = bernoulli_transform(&dist, req.eta).map_err(an_failure)?;
            }
            let mut row = vec![u, nbar];
            row.extend(dist.probs);
            Ok(row)
        }
        Quantity::NbarOfU => Ok(vec![u, nbar, req.eta * nbar]),
        Quantity::MandelOfNbar => {
            let q = fam.moments(u).map_err(an_failure)?.mandel_q;
            Ok(vec![u, nbar, req.eta * q])
        }
        Quantity::Helstrom => {
            let r = helstrom_of_nbar(fam, nbar, req.xi0, req.eta).map_err(helstrom_failure)?;
            Ok(vec![u, nbar, r.overlap_sq, r.p_h, r.delta])
        }
        Quantity::Delta => {
            let r = helstrom_of_nbar(fam, nbar, req.xi0, req.eta).map_err(helstrom_failure)?;
            Ok(vec![u, nbar, r.delta])
        }
        Quantity::LogHelstrom => {
            let r = helstrom_of_nbar(fam, nbar, req.xi0, req.eta).map_err(helstrom_failure)?;
            // Clamp so an exact bound zero stays finite (and serializable).
            Ok(vec![u, nbar, r.p_h.max(1e-300).log10()])
        }
    }
}

/// Grid description carried in sweep documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub log: bool,
}

/// A completed sweep: metadata plus rectangular rows. The JSON output is
/// this struct verbatim; the CSV output carries the metadata as `#` comment
/// lines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepDocument {
    pub tool: String,
    pub version: String,
    pub family: String,
    pub params: Vec<(String, f64)>,
    pub quantity: String,
    pub axis: String,
    pub grid: GridSpec,
    pub eta: f64,
    pub xi0: f64,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Scientific notation with 17 significant digits: round-trip exact for
/// doubles and byte-stable across runs.
fn fmt_g17(v: f64) -> String {
    format!("{v:.16e}")
}

impl SweepDocument {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let params: String = self
            .params
            .iter()
            .map(|(k, v)| format!(" {k}={v}"))
            .collect();
        let _ = writeln!(out, "# {} {}", self.tool, self.version);
        let _ = writeln!(out, "# family: {}{}", self.family, params);
        let _ = writeln!(out, "# quantity: {}", self.quantity);
        let _ = writeln!(out, "# axis: {}", self.axis);
        let _ = writeln!(
            out,
            "# grid: lo={} hi={} count={} spacing={}",
            self.grid.lo,
            self.grid.hi,
            self.grid.count,
            if self.grid.log { "log" } else { "linear" }
        );
        let _ = writeln!(out, "# eta: {}", self.eta);
        let _ = writeln!(out, "# xi0: {}", self.xi0);
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| fmt_g17(v)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    fn to_json(&self) -> CmdResult<String> {
        let mut s = serde_json::to_string_pretty(self)
            .map_err(|e| Failure::io(format!("serialization failed: {e}")))?;
        s.push('\n');
        Ok(s)
    }
}

fn run_sweep(fam: &AnFamily, req: &SweepRequest) -> CmdResult<SweepDocument> {
    let grid = build_grid(req.lo, req.hi, req.count, req.log_grid);
    let results: Vec<CmdResult<Vec<f64>>> = grid
        .par_iter()
        .map(|&x| sweep_row(fam, req, x))
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    for r in results {
        rows.push(r?);
    }
    // pn_table rows vary in truncation length; pad to a rectangle.
    let width = rows.iter().map(Vec::len).max().unwrap_or(0);
    for row in &mut rows {
        row.resize(width, 0.0);
    }
    let mut columns = vec!["u".to_string(), "nbar".to_string()];
    match req.quantity {
        Quantity::PnTable => {
            columns.extend((0..width - 2).map(|n| format!("p_{n}")));
        }
        Quantity::NbarOfU => columns.push("detected_nbar".to_string()),
        Quantity::MandelOfNbar => columns.push("mandel_q".to_string()),
        Quantity::Helstrom => {
            columns.extend(["overlap_sq", "p_h", "delta"].map(str::to_string));
        }
        Quantity::Delta => columns.push("delta".to_string()),
        Quantity::LogHelstrom => columns.push("log10_p_h".to_string()),
    }
    Ok(SweepDocument {
        tool: "ancs".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        family: fam.name().to_string(),
        params: fam.params().to_vec(),
        quantity: req.quantity.name().to_string(),
        axis: req.axis.name().to_string(),
        grid: GridSpec {
            lo: req.lo,
            hi: req.hi,
            count: req.count,
            log: req.log_grid,
        },
        eta: req.eta,
        xi0: req.xi0,
        columns,
        rows,
    })
}

fn write_output(path: Option<&Path>, content: &str) -> CmdResult<()> {
    match path {
        Some(p) => fs::write(p, content)
            .map_err(|e| Failure::io(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(content.as_bytes())
            .map_err(|e| Failure::io(format!("cannot write to stdout: {e}"))),
    }
}

fn cmd_sweep(args: SweepArgs) -> CmdResult<i32> {
    let req = resolve_sweep(args)?;
    let fam = make_family(&req.family).map_err(|e| Failure::args(e.to_string()))?;
    let doc = run_sweep(&fam, &req)?;
    let content = match req.format {
        OutputFormat::Csv => doc.to_csv(),
        OutputFormat::Json => doc.to_json()?,
    };
    write_output(req.output.as_deref(), &content)?;
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// verify

fn cmd_verify(args: VerifyArgs) -> CmdResult<i32> {
    let results = run_suite(&args.suite).map_err(|e| Failure::args(e.to_string()))?;
    let mut report = String::new();
    let mut failed = 0usize;
    for r in &results {
        let status = if r.pass { "PASS" } else { "FAIL" };
        if !r.pass {
            failed += 1;
        }
        let _ = write!(
            report,
            "{status} {}::{} measured={:.3e} tolerance={:.3e}",
            r.module, r.name, r.measured, r.tolerance
        );
        if let Some(note) = &r.note {
            let _ = write!(report, " ({note})");
        }
        report.push('\n');
    }
    let _ = writeln!(report, "{} checks, {failed} failed", results.len());
    write_output(None, &report)?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_CHECK_FAILED })
}

// ---------------------------------------------------------------------------
// zeros

/// One vanishing point of the bound: mean count and amplitude residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub nbar: f64,
    /// `|h_0(u(nbar))|` at the reported zero.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZerosDocument {
    pub tool: String,
    pub version: String,
    pub family: String,
    pub nbar_lo: f64,
    pub nbar_hi: f64,
    pub zeros: Vec<ZeroRecord>,
}

fn cmd_zeros(args: ZerosArgs) -> CmdResult<i32> {
    let params = merge_params(Vec::new(), &args.param)?;
    let spec =
        FamilySpec::parse(&args.family, &params).map_err(|e| Failure::args(e.to_string()))?;
    if !matches!(spec, FamilySpec::Sg | FamilySpec::Sgm) {
        return Err(Failure::args(format!(
            "family `{}` has a nowhere-vanishing vacuum overlap; zeros exist only for sg and sgm",
            args.family
        )));
    }
    let fam = make_family(&spec).map_err(|e| Failure::args(e.to_string()))?;
    let zeros = find_hb_zeros(&fam, args.lo, args.hi).map_err(helstrom_failure)?;
    let mut records = Vec::with_capacity(zeros.len());
    for nbar in zeros {
        let u = fam.invert_nbar(nbar).map_err(an_failure)?;
        records.push(ZeroRecord {
            nbar,
            residual: fam.h(0, u).abs(),
        });
    }
    let doc = ZerosDocument {
        tool: "ancs".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        family: fam.name().to_string(),
        nbar_lo: args.lo,
        nbar_hi: args.hi,
        zeros: records,
    };
    let mut content = serde_json::to_string_pretty(&doc)
        .map_err(|e| Failure::io(format!("serialization failed: {e}")))?;
    content.push('\n');
    write_output(args.output.as_deref(), &content)?;
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// deform

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeformDocument {
    pub tool: String,
    pub version: String,
    pub sequence: String,
    pub params: Vec<(String, f64)>,
    pub n: usize,
    pub eta: f64,
    pub flavor: String,
    pub mean: f64,
    pub std_dev: f64,
    /// `probs[k]` is the chance of `k` wins in `n` trials.
    pub probs: Vec<f64>,
    /// Per-string probabilities (asymmetric flavor only).
    pub per_string: Option<Vec<f64>>,
}

impl DeformDocument {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let params: String = self
            .params
            .iter()
            .map(|(k, v)| format!(" {k}={v}"))
            .collect();
        let _ = writeln!(out, "# {} {}", self.tool, self.version);
        let _ = writeln!(out, "# sequence: {}{}", self.sequence, params);
        let _ = writeln!(out, "# n: {}", self.n);
        let _ = writeln!(out, "# eta: {}", self.eta);
        let _ = writeln!(out, "# flavor: {}", self.flavor);
        match &self.per_string {
            Some(per) => {
                let _ = writeln!(out, "k,prob,per_string");
                for (k, (&p, &s)) in self.probs.iter().zip(per).enumerate() {
                    let _ = writeln!(out, "{k},{},{}", fmt_g17(p), fmt_g17(s));
                }
            }
            None => {
                let _ = writeln!(out, "k,prob");
                for (k, &p) in self.probs.iter().enumerate() {
                    let _ = writeln!(out, "{k},{}", fmt_g17(p));
                }
            }
        }
        out
    }
}

fn deform_failure(e: DeformError) -> Failure {
    match e {
        DeformError::InvalidParam { .. }
        | DeformError::InvalidEta { .. }
        | DeformError::OrderTooSmall { .. } => Failure::args(e.to_string()),
        _ => Failure::domain(e.to_string()),
    }
}

/// Builds the requested sequence with `n_max = n`, enforcing that exactly
/// the parameters the sequence takes were supplied.
fn build_sequence(name: &str, params: &[(String, f64)], n: usize) -> CmdResult<DeformedSequence> {
    let only = |expected: &str| -> CmdResult<f64> {
        match params {
            [(k, v)] if k == expected => Ok(*v),
            [] => Err(Failure::args(format!(
                "sequence `{name}` requires parameter `{expected}`"
            ))),
            _ => Err(Failure::args(format!(
                "sequence `{name}` takes only parameter `{expected}`"
            ))),
        }
    };
    match name {
        "gs" => {
            if params.is_empty() {
                Ok(DeformedSequence::gs(n))
            } else {
                Err(Failure::args("sequence `gs` takes no parameters"))
            }
        }
        "perelomov_type" => {
            DeformedSequence::perelomov_type(only("s")?, n).map_err(deform_failure)
        }
        "hermite" => DeformedSequence::hermite(only("a")?, n).map_err(deform_failure),
        "abel" => DeformedSequence::abel(only("beta")?, n).map_err(deform_failure),
        other => Err(Failure::args(format!(
            "unknown sequence `{other}` (expected gs, perelomov_type, hermite, abel)"
        ))),
    }
}

fn cmd_deform(args: DeformArgs) -> CmdResult<i32> {
    let params = merge_params(Vec::new(), &args.param)?;
    if !(0.0..=1.0).contains(&args.eta) {
        return Err(Failure::args(format!("eta = {} outside [0, 1]", args.eta)));
    }
    let seq = build_sequence(&args.sequence, &params, args.n)?;
    let dist: DeformedBinomialDist = match args.flavor.as_str() {
        "asym" => {
            let polys = asym_polynomials(&seq, args.eta, args.n).map_err(deform_failure)?;
            asym_distribution(&seq, &polys, args.n, args.eta).map_err(deform_failure)?
        }
        "sym" => {
            let q_eta = sym_polynomials(&seq, args.eta, args.n).map_err(deform_failure)?;
            let q_comp = sym_polynomials(&seq, 1.0 - args.eta, args.n).map_err(deform_failure)?;
            sym_distribution(&seq, &q_eta, &q_comp, args.n, args.eta).map_err(deform_failure)?
        }
        other => {
            return Err(Failure::args(format!(
                "unknown flavor `{other}` (expected asym or sym)"
            )))
        }
    };
    let doc = DeformDocument {
        tool: "ancs".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        sequence: seq.name().to_string(),
        params,
        n: args.n,
        eta: args.eta,
        flavor: args.flavor.clone(),
        mean: dist.mean(),
        std_dev: dist.std_dev(),
        probs: dist.probs,
        per_string: dist.per_string,
    };
    let content = match OutputFormat::parse(&args.format)? {
        OutputFormat::Csv => doc.to_csv(),
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&doc)
                .map_err(|e| Failure::io(format!("serialization failed: {e}")))?;
            s.push('\n');
            s
        }
    };
    write_output(args.output.as_deref(), &content)?;
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// limits

fn cmd_limits(args: LimitsArgs) -> CmdResult<i32> {
    let params = merge_params(Vec::new(), &args.param)?;
    let spec =
        FamilySpec::parse(&args.family, &params).map_err(|e| Failure::args(e.to_string()))?;
    let checks = limit_checks(&spec).map_err(|e| Failure::args(e.to_string()))?;
    let mut report = String::new();
    if checks.is_empty() {
        let _ = writeln!(report, "no documented limit laws for family `{}`", args.family);
        write_output(None, &report)?;
        return Ok(EXIT_OK);
    }
    let mut failed = 0usize;
    for c in &checks {
        if !c.pass {
            failed += 1;
        }
        let _ = writeln!(
            report,
            "{} {} deviation={:.3e} tolerance={:.3e}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.deviation,
            c.tolerance
        );
    }
    write_output(None, &report)?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_CHECK_FAILED })
}
