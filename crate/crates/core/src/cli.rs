//! Command-line front end.
//!
//! Every subcommand writes one CSV table or JSON document, to standard
//! output or atomically to `--out`. Floats are printed with 17 significant
//! digits so outputs round-trip and identical invocations give identical
//! bytes.
//!
//! Exit codes: 0 success, 1 argument error, 2 numeric failure (overflow or
//! degenerate input), 3 certification failed.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::coords::{logit_radius, logpolar_distance, to_disk, to_logpolar, DiskPoint, LogPolar};
use crate::dynamics::{dyadic_fast_forward, fast_forward, iterate, Direction, ITERATION_CAP};
use crate::error::Error;
use crate::exec;
use crate::liyorke::{
    inverse_scan, pair_diagnostics_logits, sample_mixed_pairs, scan_scrambled, PairConfig, ScrambledSet,
    Thresholds, Verdict, MAX_SCRAMBLED_POINTS, MIN_TAIL,
};
use crate::xi::{xi_bound, xi_of_s};

pub const THREADS_ENV: &str = "DISKCHAOS_THREADS";

const EXIT_OK: i32 = 0;
const EXIT_USAGE: i32 = 1;
const EXIT_NUMERIC: i32 = 2;
const EXIT_UNCERTIFIED: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Forward,
    Backward,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Forward => Direction::Forward,
            DirectionArg::Backward => Direction::Backward,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "diskchaos",
    version,
    about = "Li-Yorke chaos of a disk homeomorphism and the non-chaos of its inverse"
)]
pub struct RunConfig {
    /// Output format (default: csv for xi/orbit/fastforward, json otherwise)
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Output file, written atomically (default: standard output)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Seed for randomized sampling
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample ξ and its envelope on a grid of log-radii
    Xi(XiArgs),
    /// Step an orbit of f or f⁻¹ (capped at 10^7 steps)
    Orbit(OrbitArgs),
    /// Jump N steps, or 2^n - 1 steps, in closed form
    Fastforward(FastforwardArgs),
    /// Li-Yorke diagnostics for a pair on the positive axis
    Pair(PairArgs),
    /// Certify every pair of a finite scrambled set
    Scrambled(ScrambledArgs),
    /// Check that backward orbit distances converge
    InverseScan(InverseScanArgs),
}

#[derive(Debug, Args)]
pub struct XiArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub s_min: f64,
    #[arg(long, default_value_t = 8.0, allow_negative_numbers = true)]
    pub s_max: f64,
    #[arg(long, default_value_t = 1000)]
    pub samples: u64,
}

/// Start point given either as a disk radius or as a log-radius.
#[derive(Debug, Args)]
pub struct StartArgs {
    /// Disk radius in [0, 1]
    #[arg(long, conflicts_with = "s0")]
    pub rho: Option<f64>,
    /// Log-radius ln(ρ/(1-ρ))
    #[arg(long, allow_negative_numbers = true)]
    pub s0: Option<f64>,
    /// Angle in turns
    #[arg(long, alias = "theta0", default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta: f64,
}

impl StartArgs {
    fn point(&self) -> Result<LogPolar, CliError> {
        match (self.rho, self.s0) {
            (Some(rho), None) => Ok(to_logpolar(
                DiskPoint::new(rho, self.theta).map_err(CliError::usage)?,
            )),
            (None, Some(s)) => LogPolar::interior(s, self.theta).map_err(CliError::usage),
            _ => Err(CliError::Usage("give exactly one of --rho or --s0".into())),
        }
    }
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    #[command(flatten)]
    pub start: StartArgs,
    #[arg(long)]
    pub steps: u64,
    /// Keep every k-th sample (the endpoint is always kept)
    #[arg(long, default_value_t = 1)]
    pub stride: u64,
    #[arg(long, value_enum, default_value = "forward")]
    pub direction: DirectionArg,
}

#[derive(Debug, Args)]
pub struct FastforwardArgs {
    #[command(flatten)]
    pub start: StartArgs,
    /// Number of steps N (at most 2^62)
    #[arg(long, conflicts_with = "exponent", required_unless_present = "exponent")]
    pub steps: Option<u64>,
    /// Jump to time 2^n - 1 (requires a log-radius in (0, 1))
    #[arg(long)]
    pub exponent: Option<u32>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long, default_value_t = 900)]
    pub max_exponent: u32,
    /// Return times kept per target
    #[arg(long, default_value_t = 16)]
    pub k_terms: usize,
    #[arg(long, default_value_t = 0.01)]
    pub eps_prox: f64,
    #[arg(long, default_value_t = 0.01)]
    pub eps_dist: f64,
}

impl CertifyArgs {
    fn config(&self) -> Result<PairConfig, CliError> {
        for (name, v) in [("--eps-prox", self.eps_prox), ("--eps-dist", self.eps_dist)] {
            if !(v > 0.0 && v < 2.0) {
                return Err(CliError::Usage(format!("{name} must be in (0, 2), got {v}")));
            }
        }
        if self.max_exponent == 0 || self.k_terms == 0 {
            return Err(CliError::Usage(
                "--max-exponent and --k-terms must be positive".into(),
            ));
        }
        Ok(PairConfig {
            max_exponent: self.max_exponent,
            k_terms: self.k_terms,
            thresholds: Thresholds {
                eps_prox: self.eps_prox,
                eps_dist: self.eps_dist,
            },
            ..PairConfig::default()
        })
    }
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Log-radius of x
    #[arg(long, required_unless_present = "rho_x", allow_negative_numbers = true)]
    pub sx: Option<f64>,
    /// Log-radius of y
    #[arg(long, required_unless_present = "rho_y", allow_negative_numbers = true)]
    pub sy: Option<f64>,
    #[arg(long, conflicts_with = "sx")]
    pub rho_x: Option<f64>,
    #[arg(long, conflicts_with = "sy")]
    pub rho_y: Option<f64>,
    #[command(flatten)]
    pub certify: CertifyArgs,
}

#[derive(Debug, Args)]
pub struct ScrambledArgs {
    #[arg(long, default_value_t = 8)]
    pub k: usize,
    #[arg(long, default_value_t = 0.1)]
    pub margin: f64,
    #[command(flatten)]
    pub certify: CertifyArgs,
}

#[derive(Debug, Args)]
pub struct InverseScanArgs {
    #[arg(long, default_value_t = 100)]
    pub pairs: usize,
    #[arg(long, default_value_t = 64)]
    pub tail: u64,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Numeric(String),
}

impl CliError {
    fn usage(e: Error) -> Self {
        CliError::Usage(e.to_string())
    }

    fn numeric(e: Error) -> Self {
        CliError::Numeric(e.to_string())
    }

    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

struct Output {
    body: String,
    code: i32,
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        match raw.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                exec::init_threads(n);
            }
            _ => {
                eprintln!("error: {THREADS_ENV} must be a positive integer, got {raw:?}");
                return EXIT_USAGE;
            }
        }
    }
    let out = match dispatch(&config) {
        Ok(out) => out,
        Err(e) => {
            match &e {
                CliError::Usage(m) => eprintln!("error: {m}"),
                CliError::Numeric(m) => eprintln!("numeric failure: {m}"),
            }
            return e.code();
        }
    };
    if let Err(e) = emit(config.out.as_deref(), &out.body) {
        eprintln!("error: cannot write output: {e}");
        return EXIT_USAGE;
    }
    out.code
}

fn emit(path: Option<&Path>, body: &str) -> std::io::Result<()> {
    match path {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(body.as_bytes())?;
            tmp.as_file().sync_all()?;
            tmp.persist(path).map_err(|e| e.error)?;
            Ok(())
        }
    }
}

fn dispatch(config: &RunConfig) -> Result<Output, CliError> {
    let fmt = |default| config.format.unwrap_or(default);
    match &config.command {
        Command::Xi(a) => cmd_xi(a, fmt(Format::Csv)),
        Command::Orbit(a) => cmd_orbit(a, fmt(Format::Csv)),
        Command::Fastforward(a) => cmd_fastforward(a, fmt(Format::Csv)),
        Command::Pair(a) => cmd_pair(a, fmt(Format::Json)),
        Command::Scrambled(a) => cmd_scrambled(a, fmt(Format::Json)),
        Command::InverseScan(a) => cmd_inverse_scan(a, config.seed, fmt(Format::Json)),
    }
}

/// 17 significant digits; non-finite values spelled out.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Pretty JSON with every float printed by [`fmt_f64`]. Object keys come out
/// sorted, which keeps the output byte-stable.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("serializable report");
    let mut out = String::new();
    write_json(&value, 0, &mut out);
    out.push('\n');
    out
}

fn write_json(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&v.to_string()),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&fmt_f64(n.as_f64().expect("f64")));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                write_json(item, depth + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                let _ = write!(out, "{}{}: ", pad(depth + 1), Value::String(k.clone()));
                write_json(item, depth + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
    }
}

fn csv(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn ok(body: String) -> Result<Output, CliError> {
    Ok(Output { body, code: EXIT_OK })
}

fn cmd_xi(a: &XiArgs, format: Format) -> Result<Output, CliError> {
    if !(a.s_min.is_finite() && a.s_max.is_finite() && a.s_min <= a.s_max) {
        return Err(CliError::Usage("need finite --s-min <= --s-max".into()));
    }
    if a.samples == 0 || a.samples > ITERATION_CAP {
        return Err(CliError::Usage(format!(
            "--samples must be in 1..={ITERATION_CAP}"
        )));
    }
    let step = if a.samples > 1 {
        (a.s_max - a.s_min) / (a.samples - 1) as f64
    } else {
        0.0
    };
    let grid = (0..a.samples).map(|i| {
        let s = if i + 1 == a.samples && a.samples > 1 {
            a.s_max
        } else {
            a.s_min + i as f64 * step
        };
        (s, xi_of_s(s), xi_bound(s))
    });
    match format {
        Format::Csv => ok(csv(
            "s,xi,xi_bound",
            grid.map(|(s, x, b)| vec![fmt_f64(s), fmt_f64(x), fmt_f64(b)]),
        )),
        Format::Json => {
            let rows: Vec<Value> = grid
                .map(|(s, x, b)| json!({"s": s, "xi": x, "xi_bound": b}))
                .collect();
            ok(to_json(&rows))
        }
    }
}

fn log_radius(p: &LogPolar) -> f64 {
    p.log_radius()
}

fn cmd_orbit(a: &OrbitArgs, format: Format) -> Result<Output, CliError> {
    let start = a.start.point()?;
    if a.stride == 0 {
        return Err(CliError::Usage("--stride must be positive".into()));
    }
    let samples = iterate(start, a.steps, a.direction.into(), a.stride).map_err(CliError::usage)?;
    let rows = samples.iter().map(|o| {
        (
            o.time,
            log_radius(&o.point),
            o.point.theta(),
            o.disk_point.rho(),
            logpolar_distance(o.point, start),
        )
    });
    match format {
        Format::Csv => ok(csv(
            "time,s,theta,rho,dist_from_start",
            rows.map(|(t, s, th, r, d)| vec![t.to_string(), fmt_f64(s), fmt_f64(th), fmt_f64(r), fmt_f64(d)]),
        )),
        Format::Json => {
            let rows: Vec<Value> = rows
                .map(|(t, s, th, r, d)| {
                    json!({"time": t, "s": s, "theta": th, "rho": r, "dist_from_start": d})
                })
                .collect();
            ok(to_json(&rows))
        }
    }
}

fn cmd_fastforward(a: &FastforwardArgs, format: Format) -> Result<Output, CliError> {
    let start = a.start.point()?;
    let (steps, exponent, end) = match (a.steps, a.exponent) {
        (Some(n), None) => {
            let end = fast_forward(start, n).map_err(|e| match e {
                Error::Overflow(_) => CliError::numeric(e),
                other => CliError::usage(other),
            })?;
            (Some(n), None, end)
        }
        (None, Some(n)) => {
            let LogPolar::Interior { s, theta } = start else {
                return Err(CliError::Usage("--exponent needs an interior start".into()));
            };
            let end = dyadic_fast_forward(s, theta, n).map_err(|e| match e {
                Error::Overflow(_) => CliError::numeric(e),
                other => CliError::usage(other),
            })?;
            let steps = (n < 64).then(|| (1u64 << n) - 1);
            (steps, Some(n), end)
        }
        _ => {
            return Err(CliError::Usage(
                "give exactly one of --steps or --exponent".into(),
            ))
        }
    };
    let rho = to_disk(end).rho();
    match format {
        Format::Csv => {
            let opt = |v: Option<String>| v.unwrap_or_default();
            ok(csv(
                "steps,exponent,s,theta,rho",
                [vec![
                    opt(steps.map(|n| n.to_string())),
                    opt(exponent.map(|n| n.to_string())),
                    fmt_f64(end.log_radius()),
                    fmt_f64(end.theta()),
                    fmt_f64(rho),
                ]],
            ))
        }
        Format::Json => ok(to_json(&json!({
            "steps": steps,
            "exponent": exponent,
            "s": end.log_radius(),
            "theta": end.theta(),
            "rho": rho,
        }))),
    }
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Certified => EXIT_OK,
        Verdict::NotCertified => EXIT_UNCERTIFIED,
        Verdict::Degenerate => EXIT_NUMERIC,
    }
}

fn logit_arg(s: Option<f64>, rho: Option<f64>, name: &str) -> Result<f64, CliError> {
    match (s, rho) {
        (Some(s), None) if s.is_finite() => Ok(s),
        (None, Some(rho)) => logit_radius(rho).map_err(CliError::usage),
        _ => Err(CliError::Usage(format!(
            "give a finite log-radius or radius for {name}"
        ))),
    }
}

fn cmd_pair(a: &PairArgs, format: Format) -> Result<Output, CliError> {
    let cfg = a.certify.config()?;
    let s_x = logit_arg(a.sx, a.rho_x, "x")?;
    let s_y = logit_arg(a.sy, a.rho_y, "y")?;
    let d = pair_diagnostics_logits(s_x, s_y, &cfg);
    let code = verdict_code(d.verdict);
    let body = match format {
        Format::Csv => csv(
            "kind,exponent,time_log2,residual,distance",
            d.samples.iter().map(|s| {
                let kind = serde_json::to_value(s.kind).expect("kind");
                vec![
                    kind.as_str().unwrap_or_default().to_string(),
                    s.exponent.to_string(),
                    fmt_f64(s.time_log2),
                    fmt_f64(s.residual),
                    fmt_f64(s.distance),
                ]
            }),
        ),
        Format::Json => to_json(&json!({
            "s_x": d.s_x,
            "s_y": d.s_y,
            "alpha": d.alpha.as_ref().map(|r| r.alpha),
            "partial_quotients": d.alpha.as_ref().map(|r| r.partial_quotients.clone()),
            "expansion_end": d.alpha.as_ref().map(|r| r.end),
            "near_zero": d.near_zero,
            "near_half": d.near_half,
            "samples": d.samples,
            "liminf_est": d.liminf_est,
            "limsup_est": d.limsup_est,
            "eps_prox": cfg.thresholds.eps_prox,
            "eps_dist": cfg.thresholds.eps_dist,
            "verdict": d.verdict,
            "truncated": d.truncated,
            "note": d.note,
        })),
    };
    Ok(Output { body, code })
}

fn cmd_scrambled(a: &ScrambledArgs, format: Format) -> Result<Output, CliError> {
    let cfg = a.certify.config()?;
    if !(2..=MAX_SCRAMBLED_POINTS).contains(&a.k) {
        return Err(CliError::Usage(format!(
            "--k must be in 2..={MAX_SCRAMBLED_POINTS}"
        )));
    }
    let set = ScrambledSet::new(a.k, a.margin).map_err(CliError::usage)?;
    let report = scan_scrambled(&set, &cfg);
    let code = if report.all_certified() {
        EXIT_OK
    } else if report.degenerate > 0 {
        EXIT_NUMERIC
    } else {
        EXIT_UNCERTIFIED
    };
    let body = match format {
        Format::Csv => csv(
            "i,j,verdict,liminf_est,limsup_est,best_zero_residual,best_half_residual",
            report.pairs.iter().map(|p| {
                let verdict = serde_json::to_value(p.verdict).expect("verdict");
                vec![
                    p.i.to_string(),
                    p.j.to_string(),
                    verdict.as_str().unwrap_or_default().to_string(),
                    fmt_f64(p.liminf_est),
                    fmt_f64(p.limsup_est),
                    fmt_f64(p.best_zero_residual),
                    fmt_f64(p.best_half_residual),
                ]
            }),
        ),
        Format::Json => to_json(&json!({
            "report": report,
            "all_certified": report.all_certified(),
            "margin": a.margin,
            "max_exponent": cfg.max_exponent,
            "eps_prox": cfg.thresholds.eps_prox,
            "eps_dist": cfg.thresholds.eps_dist,
        })),
    };
    Ok(Output { body, code })
}

fn cmd_inverse_scan(a: &InverseScanArgs, seed: u64, format: Format) -> Result<Output, CliError> {
    if a.tail < MIN_TAIL {
        return Err(CliError::Usage(format!("--tail must be at least {MIN_TAIL}")));
    }
    if a.pairs == 0 || a.pairs > 1_000_000 {
        return Err(CliError::Usage("--pairs must be in 1..=1000000".into()));
    }
    let pairs = sample_mixed_pairs(a.pairs, seed);
    let report = inverse_scan(&pairs, a.tail).map_err(CliError::numeric)?;
    let code = if report.non_chaotic {
        EXIT_OK
    } else {
        EXIT_UNCERTIFIED
    };
    let body = match format {
        Format::Csv => csv(
            "x_rho,x_theta,y_rho,y_theta,osc,limit_distance,max_deviation,start_modulus",
            report.pairs.iter().map(|p| {
                [
                    p.x.rho(),
                    p.x.theta(),
                    p.y.rho(),
                    p.y.theta(),
                    p.osc,
                    p.limit_distance,
                    p.max_deviation,
                    p.start_modulus,
                ]
                .into_iter()
                .map(fmt_f64)
                .collect()
            }),
        ),
        Format::Json => to_json(&json!({
            "seed": seed,
            "pair_count": report.pairs.len(),
            "n_tail": report.n_tail,
            "max_osc": report.max_osc,
            "max_deviation": report.max_deviation,
            "max_start_modulus": report.max_start_modulus,
            "collapse_bound_applies": report.collapse_bound_applies,
            "collapsed": report.collapsed,
            "non_chaotic": report.non_chaotic,
            "pairs": report.pairs,
        })),
    };
    Ok(Output { body, code })
}
