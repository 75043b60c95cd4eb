//! Command-line flags, the `key = value` config file, and their merge into a [`RunConfig`].

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dyadic_core::Params;
use thiserror::Error;

pub const DEFAULT_BETA: f64 = 1.0;
pub const DEFAULT_DELTA1: f64 = 1.0;
pub const DEFAULT_DELTA2: f64 = 1.0;
pub const DEFAULT_FORCING: f64 = 0.0;
pub const DEFAULT_SHELLS: usize = 40;
pub const DEFAULT_REL_TOL: f64 = 1e-10;
pub const DEFAULT_T_END: f64 = 1.0;
pub const DEFAULT_GRID: &str = "0.01:2:20,0.01:2:20";

#[derive(Debug, Parser)]
#[command(name = "dyadic", version, about = "Mixed dyadic shell model: simulations, constant and self-similar solutions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Simulate,
    Constant,
    Selfsimilar,
    Sweep,
    Verify,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the truncated system from Y_n(0) = 2^(-n)
    Simulate(Opts),
    /// Constant solution of the forced model
    Constant(Opts),
    /// Self-similar coefficient sequence
    Selfsimilar(Opts),
    /// Regime and solution atlas over a (delta1, delta2) grid
    Sweep(Opts),
    /// Run the invariant suite and print a pass/fail table
    Verify(Opts),
}

impl Command {
    pub fn split(&self) -> (CommandKind, &Opts) {
        match self {
            Command::Simulate(o) => (CommandKind::Simulate, o),
            Command::Constant(o) => (CommandKind::Constant, o),
            Command::Selfsimilar(o) => (CommandKind::Selfsimilar, o),
            Command::Sweep(o) => (CommandKind::Sweep, o),
            Command::Verify(o) => (CommandKind::Verify, o),
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Opts {
    /// Flat `key = value` file; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Wavenumber exponent, k_n = 2^(beta n) [1]
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// KP coupling [1]
    #[arg(long, allow_negative_numbers = true)]
    pub delta1: Option<f64>,
    /// Obukhov coupling [1]
    #[arg(long, allow_negative_numbers = true)]
    pub delta2: Option<f64>,
    /// Forcing on shell 0 [0]
    #[arg(long, allow_negative_numbers = true)]
    pub forcing: Option<f64>,
    /// Truncation index N [40]
    #[arg(long)]
    pub shells: Option<usize>,
    /// Output file [dyadic-<command>.<ext>]
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Final time (simulate, sweep) [1]
    #[arg(long, allow_negative_numbers = true)]
    pub t_end: Option<f64>,
    /// Integrator relative tolerance [1e-10]
    #[arg(long, allow_negative_numbers = true)]
    pub rel_tol: Option<f64>,
    /// Constant solution a_0 (Obukhov side only)
    #[arg(long, allow_negative_numbers = true)]
    pub a0: Option<f64>,
    /// Self-similar seed a_1 (multi-solution band only) [1]
    #[arg(long, allow_negative_numbers = true)]
    pub a1: Option<f64>,
    /// d1lo:d1hi:n,d2lo:d2hi:n (log-spaced)
    #[arg(long)]
    pub grid: Option<String>,
    /// Sweep threads [available cores]
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl fmt::Display for CommandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CommandKind::Simulate => "simulate",
            CommandKind::Constant => "constant",
            CommandKind::Selfsimilar => "selfsimilar",
            CommandKind::Sweep => "sweep",
            CommandKind::Verify => "verify",
        })
    }
}

/// One log-spaced axis of the sweep grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn points(&self) -> Vec<f64> {
        let last = self.n - 1;
        let span = self.hi / self.lo;
        (0..self.n)
            .map(|i| match i {
                0 => self.lo,
                i if i == last => self.hi,
                i => self.lo * span.powf(i as f64 / last as f64),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub delta1: Axis,
    pub delta2: Axis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub params: Params,
    pub output_path: PathBuf,
    pub format: Format,
    pub t_end: f64,
    pub rel_tol: f64,
    pub a0: Option<f64>,
    pub a1: Option<f64>,
    pub grid: Option<GridSpec>,
    pub workers: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{path}:{line}: {message}")]
    File { path: String, line: usize, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{field}: {message}")]
    Field { field: &'static str, message: String },
}

fn field(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field { field, message: message.into() }
}

const KEYS: [&str; 13] = [
    "beta", "delta1", "delta2", "forcing", "shells", "out", "format", "t_end", "rel_tol", "a0", "a1", "grid", "workers",
];

/// Parses a config file into `opts`, leaving values already set untouched.
pub fn read_config_file(path: &Path, opts: &mut Opts) -> Result<(), ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
    let file = FileValues::parse(&text).map_err(|(line, message)| ConfigError::File {
        path: path.display().to_string(),
        line,
        message,
    })?;
    file.fill(opts).map_err(|(line, message)| ConfigError::File {
        path: path.display().to_string(),
        line,
        message,
    })
}

struct FileValues(Vec<(usize, String, String)>);

impl FileValues {
    fn parse(text: &str) -> Result<Self, (usize, String)> {
        let mut out: Vec<(usize, String, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| (line_no, format!("expected `key = value`, got `{line}`")))?;
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err((line_no, format!("unknown key `{key}` (known: {})", KEYS.join(", "))));
            }
            if out.iter().any(|(_, k, _)| *k == key) {
                return Err((line_no, format!("duplicate key `{key}`")));
            }
            out.push((line_no, key, value.trim().to_string()));
        }
        Ok(Self(out))
    }

    fn fill(self, opts: &mut Opts) -> Result<(), (usize, String)> {
        fn num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T, (usize, String)> {
            v.parse().map_err(|_| (line, format!("`{key}`: cannot parse `{v}`")))
        }
        for (line, key, v) in self.0 {
            match key.as_str() {
                "beta" => set(&mut opts.beta, num(line, &key, &v)?),
                "delta1" => set(&mut opts.delta1, num(line, &key, &v)?),
                "delta2" => set(&mut opts.delta2, num(line, &key, &v)?),
                "forcing" => set(&mut opts.forcing, num(line, &key, &v)?),
                "shells" => set(&mut opts.shells, num(line, &key, &v)?),
                "out" => set(&mut opts.out, PathBuf::from(v)),
                "format" => set(
                    &mut opts.format,
                    Format::from_str(&v, true).map_err(|_| (line, format!("`format`: expected csv or json, got `{v}`")))?,
                ),
                "t_end" => set(&mut opts.t_end, num(line, &key, &v)?),
                "rel_tol" => set(&mut opts.rel_tol, num(line, &key, &v)?),
                "a0" => set(&mut opts.a0, num(line, &key, &v)?),
                "a1" => set(&mut opts.a1, num(line, &key, &v)?),
                "grid" => set(&mut opts.grid, v),
                "workers" => set(&mut opts.workers, num(line, &key, &v)?),
                _ => unreachable!("keys are checked while parsing"),
            }
        }
        Ok(())
    }
}

fn set<T>(slot: &mut Option<T>, value: T) {
    if slot.is_none() {
        *slot = Some(value);
    }
}

/// Parses `d1lo:d1hi:n,d2lo:d2hi:n`.
pub fn parse_grid(spec: &str) -> Result<GridSpec, ConfigError> {
    let axes: Vec<&str> = spec.split(',').collect();
    if axes.len() != 2 {
        return Err(field("grid", format!("expected two comma-separated axes, got `{spec}`")));
    }
    let axis = |s: &str, name: &str| -> Result<Axis, ConfigError> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(field("grid", format!("{name} axis must be lo:hi:n, got `{s}`")));
        }
        let lo: f64 = parts[0].parse().map_err(|_| field("grid", format!("{name} lower bound `{}`", parts[0])))?;
        let hi: f64 = parts[1].parse().map_err(|_| field("grid", format!("{name} upper bound `{}`", parts[1])))?;
        let n: usize = parts[2].parse().map_err(|_| field("grid", format!("{name} point count `{}`", parts[2])))?;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(field("grid", format!("{name} bounds must satisfy 0 < lo < hi, got {lo}:{hi}")));
        }
        if n < 2 {
            return Err(field("grid", format!("{name} axis needs at least 2 points, got {n}")));
        }
        Ok(Axis { lo, hi, n })
    };
    Ok(GridSpec { delta1: axis(axes[0], "delta1")?, delta2: axis(axes[1], "delta2")? })
}

/// Merges the config file (if any) under the flags and validates the result.
pub fn parse_config(command: CommandKind, flags: &Opts) -> Result<RunConfig, ConfigError> {
    reject_contradictions(command, flags, "flag")?;
    let mut opts = flags.clone();
    if let Some(path) = &flags.config {
        read_config_file(path, &mut opts)?;
        reject_contradictions(command, &opts, "config key")?;
    }
    let beta = opts.beta.unwrap_or(DEFAULT_BETA);
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(field("beta", format!("must be positive, got {beta}")));
    }
    let delta1 = opts.delta1.unwrap_or(DEFAULT_DELTA1);
    let delta2 = opts.delta2.unwrap_or(DEFAULT_DELTA2);
    for (name, v) in [("delta1", delta1), ("delta2", delta2)] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(field(if name == "delta1" { "delta1" } else { "delta2" }, format!("must be nonnegative, got {v}")));
        }
    }
    let forcing = opts.forcing.unwrap_or(DEFAULT_FORCING);
    if !(forcing >= 0.0 && forcing.is_finite()) {
        return Err(field("forcing", format!("must be nonnegative, got {forcing}")));
    }
    if command == CommandKind::Constant && forcing <= 0.0 {
        return Err(field("forcing", "the constant command needs forcing > 0"));
    }
    let shells = opts.shells.unwrap_or(DEFAULT_SHELLS);
    let params = Params::new(beta, delta1, delta2, forcing, shells).map_err(|e| match e {
        dyadic_core::DyadicError::InvalidParameters { field: f, reason } => ConfigError::Field { field: f, message: reason },
        other => field("params", other.to_string()),
    })?;
    let t_end = opts.t_end.unwrap_or(DEFAULT_T_END);
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(field("t_end", format!("must be positive, got {t_end}")));
    }
    let rel_tol = opts.rel_tol.unwrap_or(DEFAULT_REL_TOL);
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(field("rel_tol", format!("must lie in (0, 1), got {rel_tol}")));
    }
    for (name, v) in [("a0", opts.a0), ("a1", opts.a1)] {
        if let Some(x) = v {
            if !(x > 0.0 && x.is_finite()) {
                return Err(field(if name == "a0" { "a0" } else { "a1" }, format!("must be positive, got {x}")));
            }
        }
    }
    let grid = match command {
        CommandKind::Sweep => Some(parse_grid(opts.grid.as_deref().unwrap_or(DEFAULT_GRID))?),
        _ => None,
    };
    let workers = match opts.workers {
        Some(0) => return Err(field("workers", "must be at least 1")),
        Some(w) => w,
        None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    };
    let format = opts.format.unwrap_or(Format::Csv);
    let output_path = opts
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("dyadic-{command}.{}", format.extension())));
    Ok(RunConfig { command, params, output_path, format, t_end, rel_tol, a0: opts.a0, a1: opts.a1, grid, workers })
}

fn reject_contradictions(command: CommandKind, opts: &Opts, source: &str) -> Result<(), ConfigError> {
    use CommandKind::*;
    let checks: [(&'static str, bool, &[CommandKind]); 5] = [
        ("t_end", opts.t_end.is_some(), &[Simulate, Sweep]),
        ("a0", opts.a0.is_some(), &[Constant]),
        ("a1", opts.a1.is_some(), &[Selfsimilar]),
        ("grid", opts.grid.is_some(), &[Sweep]),
        ("workers", opts.workers.is_some(), &[Sweep]),
    ];
    for (name, present, allowed) in checks {
        if present && !allowed.contains(&command) {
            return Err(field(name, format!("{source} `{name}` does not apply to the {command} command")));
        }
    }
    Ok(())
}
