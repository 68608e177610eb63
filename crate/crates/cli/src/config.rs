//! Command-line flags, the optional `key=value` config file, and the
//! resolved experiment configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use baskakov::basis::SeriesPolicy;
use baskakov::function::{by_name, TestFunction, CATALOG_NAMES};
use baskakov::smoothness::BoundTheorem;
use clap::{Args, Parser, Subcommand};

use crate::error::CliError;

/// Largest admissible grid abscissa.
pub const X_MAX: f64 = 1000.0;
const MAX_GRID_POINTS: usize = 1_000_000;

#[derive(Parser, Debug)]
#[command(name = "baskakov", version, about = "Baskakov-Kantorovich-Stancu operators: evaluation, moments and error bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compare closed-form moments with brute-force sums.
    VerifyMoments(Flags),
    /// Sweep an approximation error bound and fit its constant.
    CheckBounds(Flags),
    /// Weighted-norm convergence table for the test functions 1, t, t^2.
    Converge(Flags),
    /// Evaluate the operator (or a baseline) on a grid.
    Eval(Flags),
}

impl Command {
    pub fn split(self) -> (CommandKind, Flags) {
        match self {
            Command::VerifyMoments(f) => (CommandKind::VerifyMoments, f),
            Command::CheckBounds(f) => (CommandKind::CheckBounds, f),
            Command::Converge(f) => (CommandKind::Converge, f),
            Command::Eval(f) => (CommandKind::Eval, f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    VerifyMoments,
    CheckBounds,
    Converge,
    Eval,
}

#[derive(Args, Debug, Default, Clone)]
pub struct Flags {
    /// Comma-separated list of n values.
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<u32>>,
    /// Comma-separated list of a values.
    #[arg(long, value_delimiter = ',')]
    pub a: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub beta: Option<Vec<f64>>,
    #[arg(long)]
    pub x_start: Option<f64>,
    #[arg(long)]
    pub x_stop: Option<f64>,
    #[arg(long)]
    pub x_step: Option<f64>,
    /// Catalog function name.
    #[arg(long)]
    pub function: Option<String>,
    #[arg(long)]
    pub tail_eps: Option<f64>,
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Any of csv, svg, report.
    #[arg(long, value_delimiter = ',')]
    pub format: Option<Vec<String>>,
    /// File of `key=value` lines; explicit flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// T3.1, T3.2 or T4.3 (check-bounds only).
    #[arg(long)]
    pub theorem: Option<String>,
    /// Baseline operator for eval: bernstein, kantorovich, stancu,
    /// kantorovich_stancu, baskakov_kantorovich.
    #[arg(long)]
    pub baseline: Option<String>,
}

fn parse_value<T: FromStr>(key: &str, raw: &str) -> Result<T, CliError> {
    raw.trim().parse().map_err(|_| CliError::Config(format!("cannot parse {key} = {raw:?}")))
}

fn parse_list<T: FromStr>(key: &str, raw: &str) -> Result<Vec<T>, CliError> {
    raw.split(',').map(|s| parse_value(key, s)).collect()
}

fn fill<T>(slot: &mut Option<T>, value: Result<T, CliError>) -> Result<(), CliError> {
    if slot.is_none() {
        *slot = Some(value?);
    }
    Ok(())
}

/// Reads `key=value` lines; `#` starts a comment, keys accept `-` or `_`.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut out = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("{}:{}: expected key=value", path.display(), lineno + 1)))?;
        out.insert(key.trim().replace('_', "-"), value.trim().to_string());
    }
    Ok(out)
}

impl Flags {
    /// Fills every flag left unset from the config file entries.
    pub fn merge_file(&mut self, entries: &BTreeMap<String, String>) -> Result<(), CliError> {
        for (key, raw) in entries {
            match key.as_str() {
                "n-list" => fill(&mut self.n_list, parse_list(key, raw))?,
                "a" => fill(&mut self.a, parse_list(key, raw))?,
                "alpha" => fill(&mut self.alpha, parse_list(key, raw))?,
                "beta" => fill(&mut self.beta, parse_list(key, raw))?,
                "x-start" => fill(&mut self.x_start, parse_value(key, raw))?,
                "x-stop" => fill(&mut self.x_stop, parse_value(key, raw))?,
                "x-step" => fill(&mut self.x_step, parse_value(key, raw))?,
                "function" => fill(&mut self.function, Ok(raw.clone()))?,
                "tail-eps" => fill(&mut self.tail_eps, parse_value(key, raw))?,
                "k-max" => fill(&mut self.k_max, parse_value(key, raw))?,
                "out-dir" => fill(&mut self.out_dir, Ok(PathBuf::from(raw)))?,
                "format" => fill(&mut self.format, Ok(raw.split(',').map(|s| s.trim().to_string()).collect()))?,
                "theorem" => fill(&mut self.theorem, Ok(raw.clone()))?,
                "baseline" => fill(&mut self.baseline, Ok(raw.clone()))?,
                _ => return Err(CliError::Config(format!("unknown config key {key:?}"))),
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Formats {
    pub csv: bool,
    pub svg: bool,
    pub report: bool,
}

impl Formats {
    fn parse(items: &[String]) -> Result<Self, CliError> {
        let mut f = Formats::default();
        for item in items {
            match item.trim() {
                "csv" => f.csv = true,
                "svg" => f.svg = true,
                "report" => f.report = true,
                other => return Err(CliError::Config(format!("unknown format {other:?} (expected csv, svg, report)"))),
            }
        }
        if f == Formats::default() {
            return Err(CliError::Config("no output format selected".into()));
        }
        Ok(f)
    }
}

/// One `(a, α, β)` combination of the parameter grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triple {
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    pub ns: Vec<u32>,
    pub triples: Vec<Triple>,
    pub xs: Vec<f64>,
    /// `(start, stop, step)` the grid was built from.
    pub x_spec: (f64, f64, f64),
    pub function: Option<TestFunction>,
    pub policy: SeriesPolicy,
    pub out_dir: Option<PathBuf>,
    pub formats: Formats,
    pub theorem: Option<BoundTheorem>,
    pub baseline: Option<String>,
}

pub const BASELINES: &[&str] = &["bernstein", "kantorovich", "stancu", "kantorovich_stancu", "baskakov_kantorovich"];

fn default_ns(command: CommandKind, theorem: Option<BoundTheorem>) -> Vec<u32> {
    match (command, theorem) {
        (CommandKind::Eval, _) => vec![10],
        (CommandKind::VerifyMoments, _) => vec![5, 10, 100],
        (CommandKind::CheckBounds, Some(BoundTheorem::Smooth)) => vec![10, 20, 40, 80, 160],
        (CommandKind::CheckBounds, _) => vec![10, 100, 1000],
        (CommandKind::Converge, _) => vec![100, 1000, 10_000],
    }
}

fn default_x(command: CommandKind, theorem: Option<BoundTheorem>) -> (f64, f64, f64) {
    match (command, theorem) {
        (CommandKind::Eval, _) => (0.0, 10.0, 0.5),
        (CommandKind::VerifyMoments, _) => (0.0, 10.0, 1.0),
        (CommandKind::CheckBounds, Some(BoundTheorem::Smooth)) => (0.5, 2.0, 0.5),
        (CommandKind::CheckBounds, Some(BoundTheorem::LipStar)) => (0.5, 1.5, 0.5),
        (CommandKind::CheckBounds, _) => (0.0, 10.0, 0.5),
        (CommandKind::Converge, _) => (0.0, X_MAX, 0.01),
    }
}

fn default_function(command: CommandKind, theorem: Option<BoundTheorem>) -> Option<&'static str> {
    match (command, theorem) {
        (CommandKind::Eval, _) => Some("t"),
        (CommandKind::CheckBounds, Some(BoundTheorem::Smooth)) => Some("exp_neg"),
        (CommandKind::CheckBounds, Some(BoundTheorem::LipStar)) => Some("sqrt"),
        (CommandKind::CheckBounds, _) => Some("t2"),
        _ => None,
    }
}

/// `start, start+step, ...` up to `stop`, rounded to 12 decimals.
pub fn build_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(CliError::Config("x-grid bounds must be finite".into()));
    }
    if !(step > 0.0) {
        return Err(CliError::Config(format!("x-step must be positive, got {step}")));
    }
    if stop < start {
        return Err(CliError::Config(format!("empty x-grid: x-stop {stop} < x-start {start}")));
    }
    let count = ((stop - start) / step + 1e-9).floor();
    if count >= MAX_GRID_POINTS as f64 {
        return Err(CliError::Config(format!("x-grid has more than {MAX_GRID_POINTS} points")));
    }
    let xs: Vec<f64> = (0..=count as usize).map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12).collect();
    if xs[0] < 0.0 || xs[xs.len() - 1] > X_MAX {
        return Err(CliError::Config(format!("x-grid must lie within [0, {X_MAX}]")));
    }
    Ok(xs)
}

impl ExperimentConfig {
    /// Validates and fills defaults. Nothing is computed here, so every
    /// configuration error surfaces before any evaluation starts.
    pub fn resolve(command: CommandKind, mut flags: Flags) -> Result<Self, CliError> {
        if let Some(path) = flags.config.clone() {
            flags.merge_file(&read_config_file(&path)?)?;
        }
        if flags.theorem.is_some() && command != CommandKind::CheckBounds {
            return Err(CliError::Config("--theorem applies to check-bounds only".into()));
        }
        if flags.baseline.is_some() && command != CommandKind::Eval {
            return Err(CliError::Config("--baseline applies to eval only".into()));
        }
        let theorem = match command {
            CommandKind::CheckBounds => {
                let label = flags.theorem.as_deref().unwrap_or("T3.1");
                Some(BoundTheorem::from_label(label).ok_or_else(|| {
                    CliError::Config(format!("unknown theorem {label:?} (expected T3.1, T3.2, T4.3)"))
                })?)
            }
            _ => None,
        };

        let function = match flags.function.as_deref().or(default_function(command, theorem)) {
            Some(name) => Some(by_name(name).ok_or_else(|| {
                CliError::Config(format!("unknown function {name:?}; catalog: {}", CATALOG_NAMES.join(", ")))
            })?),
            None => None,
        };
        if let Some(b) = &flags.baseline {
            if !BASELINES.contains(&b.as_str()) {
                return Err(CliError::Config(format!("unknown baseline {b:?}; expected one of {}", BASELINES.join(", "))));
            }
        }

        let ns = flags.n_list.clone().unwrap_or_else(|| default_ns(command, theorem));
        if ns.is_empty() {
            return Err(CliError::Config("empty n list".into()));
        }
        if let Some(&n) = ns.iter().find(|&&n| n == 0) {
            return Err(CliError::Config(format!("n must be positive, got {n}")));
        }
        let a_list = flags.a.clone().unwrap_or_else(|| vec![0.0]);
        let alpha_list = flags.alpha.clone().unwrap_or_else(|| vec![0.0]);
        let beta_list = flags.beta.clone().unwrap_or_else(|| vec![0.0]);
        if a_list.is_empty() || alpha_list.is_empty() || beta_list.is_empty() {
            return Err(CliError::Config("empty a, alpha or beta list".into()));
        }
        let mut triples = Vec::new();
        for &a in &a_list {
            for &alpha in &alpha_list {
                for &beta in &beta_list {
                    // n = 1 is the weakest case for the parameter checks.
                    baskakov::basis::OperatorParams::new(1, a, alpha, beta)
                        .map_err(|e| CliError::Config(format!("(a={a}, alpha={alpha}, beta={beta}): {e}")))?;
                    triples.push(Triple { a, alpha, beta });
                }
            }
        }

        let (ds, dt, dp) = default_x(command, theorem);
        let x_spec = (flags.x_start.unwrap_or(ds), flags.x_stop.unwrap_or(dt), flags.x_step.unwrap_or(dp));
        let xs = build_grid(x_spec.0, x_spec.1, x_spec.2)?;
        if command == CommandKind::Converge && x_spec.0 != 0.0 {
            return Err(CliError::Config("converge takes weighted norms over [0, x-stop]; x-start must be 0".into()));
        }

        let defaults = SeriesPolicy::default();
        let policy = SeriesPolicy::new(
            flags.tail_eps.unwrap_or(defaults.tail_epsilon),
            flags.k_max.unwrap_or(defaults.k_max_hard),
            defaults.log_domain,
        )
        .map_err(|e| CliError::Config(e.to_string()))?;

        let formats = Formats::parse(flags.format.as_deref().unwrap_or(&["csv".to_string(), "report".to_string()]))?;
        if formats.svg && flags.out_dir.is_none() {
            return Err(CliError::Config("svg output requires --out-dir".into()));
        }

        Ok(ExperimentConfig {
            command,
            ns,
            triples,
            xs,
            x_spec,
            function,
            policy,
            out_dir: flags.out_dir,
            formats,
            theorem,
            baseline: flags.baseline,
        })
    }

    pub fn function(&self) -> &TestFunction {
        self.function.as_ref().expect("command resolves a function")
    }
}
