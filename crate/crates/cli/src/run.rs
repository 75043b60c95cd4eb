//! Command execution.

use std::fs;
use std::path::PathBuf;

use dyadic_core::ode::{detect_blowup, integrate_with, IntegrateOptions};
use dyadic_core::selfsimilar::{build_selfsimilar, shoot_selfsimilar, MAX_SHOOT_DEPTH};
use dyadic_core::shell::{normalized, regime_classify, selfsimilar_band, RegimeTag, SelfSimilarBand};
use dyadic_core::stationary::{build_constant_solution, find_unique_constant, k41_constant, k41_profile, max_relative_residual};
use dyadic_core::{DyadicError, Field, Params, Sequence};
use serde_json::{json, Value};
use thiserror::Error;

use crate::config::{CommandKind, ConfigError, Format, RunConfig};
use crate::output::{cell, manifest, manifest_path, num, Table};
use crate::{sweep, verify};

/// `H^1` threshold on `Σ k_n² Y_n²` used by the blow-up report.
pub const BLOWUP_THRESHOLD: f64 = 1e8;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Compute(#[from] DyadicError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{failed} of {total} checks failed")]
    Verify { failed: usize, total: usize },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            _ => 1,
        }
    }
}

/// Files written by a successful run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOutcome {
    pub written: Vec<PathBuf>,
    pub summary: String,
}

/// Data and metadata produced by one command before it is written out.
pub(crate) struct Product {
    pub(crate) table: Table,
    pub(crate) results: Value,
    pub(crate) stats: Value,
}

pub fn run(config: &RunConfig) -> Result<RunOutcome, RunError> {
    let product = match config.command {
        CommandKind::Simulate => simulate(config)?,
        CommandKind::Constant => constant(config)?,
        CommandKind::Selfsimilar => selfsimilar(config)?,
        CommandKind::Sweep => sweep::run_sweep(config)?,
        CommandKind::Verify => {
            let checks = verify::run_suite(&config.params);
            let table = verify::render(&checks);
            let failed = checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                print!("{table}");
                return Err(RunError::Verify { failed, total: checks.len() });
            }
            return Ok(RunOutcome { written: Vec::new(), summary: table });
        }
    };
    write(config, product)
}

fn write(config: &RunConfig, product: Product) -> Result<RunOutcome, RunError> {
    let m = manifest(config.command, &config.params, product.results, product.stats);
    let mut written = Vec::new();
    let rows = product.table.rows.len();
    match config.format {
        Format::Csv => {
            write_file(&config.output_path, product.table.to_csv())?;
            written.push(config.output_path.clone());
            let mpath = manifest_path(&config.output_path);
            write_file(&mpath, pretty(&m))?;
            written.push(mpath);
        }
        Format::Json => {
            let mut m = m;
            m["table"] = json!({ "columns": product.table.header, "rows": product.table.rows });
            write_file(&config.output_path, pretty(&m))?;
            written.push(config.output_path.clone());
        }
    }
    let summary = format!("{}: {rows} rows -> {}", config.command, config.output_path.display());
    Ok(RunOutcome { written, summary })
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("manifest values serialize");
    s.push('\n');
    s
}

fn write_file(path: &std::path::Path, contents: String) -> Result<(), RunError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| RunError::Io { path: dir.display().to_string(), message: e.to_string() })?;
    }
    fs::write(path, contents).map_err(|e| RunError::Io { path: path.display().to_string(), message: e.to_string() })
}

/// Initial data `Y_n(0) = 2^{-n}` used by `simulate` and the sweep probe.
pub fn default_initial(params: &Params) -> Field {
    let values = (0..=params.n_shells()).map(|n| 0.5f64.powi(n as i32)).collect();
    Field::new(0.0, values).expect("finite initial data")
}

fn simulate(config: &RunConfig) -> Result<Product, RunError> {
    let p = &config.params;
    let opts = IntegrateOptions::new(config.t_end, config.rel_tol, config.rel_tol * 1e-3)
        .stop_when_norm_exceeds(1.0, BLOWUP_THRESHOLD);
    let traj = integrate_with(&default_initial(p), p, &opts)?;
    let report = detect_blowup(&traj, 1.0, BLOWUP_THRESHOLD);
    let width = p.n_shells() + 1;
    let mut header = vec!["t".to_string()];
    header.extend((0..width).map(|n| format!("Y_{n}")));
    let mut table = Table { header, rows: Vec::new() };
    for s in &traj.samples {
        let mut row = vec![num(s.time)];
        row.extend(s.values.iter().map(|&v| num(v)));
        table.push(row);
    }
    let e0 = dyadic_core::shell::energy(&traj.samples[0]);
    let e1 = dyadic_core::shell::energy(traj.last());
    Ok(Product {
        table,
        results: json!({
            "t_end_reached": traj.end(),
            "energy_start": e0,
            "energy_end": e1,
            "blowup": report,
        }),
        stats: json!({ "integrator": traj.integrator_stats, "samples": traj.samples.len() }),
    })
}

fn constant(config: &RunConfig) -> Result<Product, RunError> {
    let p = &config.params;
    let regime = regime_classify(p)?;
    let (seq, results): (Sequence, Value) = match regime.tag {
        RegimeTag::ObukhovDominant | RegimeTag::PureObukhov => {
            let a0 = match config.a0 {
                Some(a0) => a0,
                None => k41_profile(p)?.0,
            };
            let seq = build_constant_solution(a0, p)?;
            let branch = json!({ "branch": "free_a0", "a0": a0 });
            (seq, branch)
        }
        _ => {
            if config.a0.is_some() {
                return Err(DyadicError::RegimeMismatch {
                    regime: regime.tag.to_string(),
                    hint: "a0 is fixed by the forcing here; drop --a0".into(),
                }
                .into());
            }
            let u = find_unique_constant(p, MAX_SHOOT_DEPTH.min(p.n_shells().max(4)), None)?;
            let info = json!({
                "branch": "unique",
                "a0": u.root,
                "bracket_width": u.bracket_width,
                "pullback_a0": u.pullback_a0,
                "forward_shells": u.forward_shells,
                "tail_agreement": u.tail_agreement,
            });
            (u.sequence, info)
        }
    };
    let mut table = Table::new(&["n", "k_n", "a_n", "a_n*k_n^(1/3)"]);
    let tilde = normalized(seq.values(), p);
    for (n, (&a, &t)) in seq.values().iter().zip(&tilde).enumerate() {
        table.push(vec![n.to_string(), num(p.k(n)), num(a), num(t)]);
    }
    let k41 = k41_constant(seq.values(), p).ok();
    let mut results = results;
    results["regime"] = json!(regime.tag.to_string());
    results["ratio"] = json!(regime.ratio);
    results["k41_constant"] = json!(seq.k41_constant());
    results["k41_drift"] = json!(k41.map(|e| e.drift));
    results["max_relative_residual"] = json!(max_relative_residual(seq.values(), p));
    Ok(Product { table, results, stats: json!({ "shells": seq.len() }) })
}

fn selfsimilar(config: &RunConfig) -> Result<Product, RunError> {
    let p = &config.params;
    let band = selfsimilar_band(p)?;
    let regime = regime_classify(p)?;
    let (seq, mut results) = match band {
        SelfSimilarBand::MultiSolution => {
            let a1 = config.a1.unwrap_or(1.0);
            let seq = build_selfsimilar(a1, p, p.n_shells())?;
            (seq, json!({ "branch": "free_a1", "a1": a1 }))
        }
        SelfSimilarBand::Unique | SelfSimilarBand::AboveBand | SelfSimilarBand::PureKP => {
            if config.a1.is_some() {
                return Err(DyadicError::RegimeMismatch {
                    regime: band.to_string(),
                    hint: "a1 is found by shooting here; drop --a1".into(),
                }
                .into());
            }
            let depth = p.n_shells().clamp(8, MAX_SHOOT_DEPTH);
            let shot = shoot_selfsimilar(p, depth)?;
            let info = json!({
                "branch": "shooting",
                "a1": shot.root,
                "bracket_width": shot.bracket_width,
                "roots": shot.roots,
                "divergence_profile": shot.divergence_profile,
                "k41_drift": shot.k41.drift,
                "tail_check_max_deviation": shot.tail_check.max_deviation,
            });
            (shot.sequence, info)
        }
        other => {
            return Err(DyadicError::RegimeMismatch {
                regime: other.to_string(),
                hint: "no self-similar construction is available for this ratio".into(),
            }
            .into())
        }
    };
    let a = seq.values();
    let tilde = normalized(a, p);
    let k13 = p.k1_pow(1.0 / 3.0);
    let mut table = Table::new(&["n", "a_n", "a_n*k_n^(1/3)", "b_n*k_1^(1/3)", "eps_n"]);
    for n in 0..a.len() {
        let b = (n >= 1 && a[n - 1] > 0.0).then(|| a[n] / a[n - 1] * k13);
        let eps = (a[n] > 0.0).then(|| 1.0 / (a[n] * p.k(n)));
        table.push(vec![n.to_string(), num(a[n]), num(tilde[n]), cell(b), cell(eps)]);
    }
    results["band"] = json!(band.to_string());
    results["regime"] = json!(regime.tag.to_string());
    results["ratio"] = json!(regime.ratio);
    results["k41_constant"] = json!(seq.k41_constant());
    results["t_origin"] = json!(seq.t_origin());
    Ok(Product { table, results, stats: json!({ "shells": seq.len() }) })
}
