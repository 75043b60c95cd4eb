//! Parameter-plane atlas over a log-spaced `(δ1, δ2)` grid.

use dyadic_core::ode::{detect_blowup, integrate_with, IntegrateOptions};
use dyadic_core::selfsimilar::{build_selfsimilar, shoot_selfsimilar, MAX_SHOOT_DEPTH};
use dyadic_core::shell::{regime_classify, selfsimilar_band, RegimeTag, SelfSimilarBand};
use dyadic_core::stationary::{build_constant_solution, find_unique_constant, k41_profile};
use dyadic_core::{DyadicError, Params};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::{GridSpec, RunConfig};
use crate::output::{cell, num, Table};
use crate::run::{default_initial, Product, RunError, BLOWUP_THRESHOLD};

/// Step budget for the blow-up probe in each cell.
pub const PROBE_MAX_STEPS: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub delta1: f64,
    pub delta2: f64,
    pub ratio: f64,
    pub regime: RegimeTag,
    pub band: SelfSimilarBand,
    pub constant_found: bool,
    pub selfsimilar_found: bool,
    pub k41_constant: Option<f64>,
    pub shoot_root: Option<f64>,
    pub blowup_time: Option<f64>,
}

pub const COLUMNS: [&str; 10] = [
    "delta1",
    "delta2",
    "ratio",
    "regime",
    "band",
    "constant_found",
    "selfsimilar_found",
    "k41_constant",
    "shoot_root",
    "blowup_time",
];

impl SweepRecord {
    pub fn row(&self) -> Vec<String> {
        vec![
            num(self.delta1),
            num(self.delta2),
            num(self.ratio),
            self.regime.to_string(),
            self.band.to_string(),
            self.constant_found.to_string(),
            self.selfsimilar_found.to_string(),
            cell(self.k41_constant),
            cell(self.shoot_root),
            cell(self.blowup_time),
        ]
    }
}

/// Settings shared by every cell.
#[derive(Debug, Clone, Copy)]
pub struct CellSettings {
    pub t_end: f64,
    pub rel_tol: f64,
}

/// Evaluates one grid cell; `base` supplies β, F and N.
///
/// The constant-solution probe uses `F = 1` when the base forcing is zero.
pub fn sweep_cell(base: &Params, delta1: f64, delta2: f64, settings: CellSettings) -> Result<SweepRecord, DyadicError> {
    let p = base.with_deltas(delta1, delta2)?;
    let regime = regime_classify(&p)?;
    let band = selfsimilar_band(&p)?;

    let forced = if p.forcing() > 0.0 { p.clone() } else { p.with_forcing(1.0)? };
    let constant = match regime.tag {
        RegimeTag::ObukhovDominant | RegimeTag::PureObukhov => {
            k41_profile(&forced).and_then(|(c, _)| build_constant_solution(c, &forced))
        }
        _ => find_unique_constant(&forced, MAX_SHOOT_DEPTH.min(p.n_shells().max(4)), None).map(|u| u.sequence),
    }
    .ok();

    let depth = p.n_shells().clamp(8, MAX_SHOOT_DEPTH);
    let (selfsimilar_found, shoot_root) = match band {
        SelfSimilarBand::MultiSolution => (build_selfsimilar(1.0, &p, depth).is_ok(), None),
        SelfSimilarBand::Unique | SelfSimilarBand::AboveBand | SelfSimilarBand::PureKP => {
            match shoot_selfsimilar(&p, depth) {
                Ok(s) => (true, Some(s.root)),
                Err(_) => (false, None),
            }
        }
        _ => (false, None),
    };

    let opts = IntegrateOptions::new(settings.t_end, settings.rel_tol, settings.rel_tol * 1e-3)
        .stop_when_norm_exceeds(1.0, BLOWUP_THRESHOLD)
        .max_steps(PROBE_MAX_STEPS);
    let blowup_time = integrate_with(&default_initial(&p), &p, &opts)
        .ok()
        .and_then(|traj| detect_blowup(&traj, 1.0, BLOWUP_THRESHOLD).t_estimate);

    Ok(SweepRecord {
        delta1,
        delta2,
        ratio: regime.ratio,
        regime: regime.tag,
        band,
        constant_found: constant.is_some(),
        selfsimilar_found,
        k41_constant: constant.and_then(|s| s.k41_constant()),
        shoot_root,
        blowup_time,
    })
}

/// All cells of the grid, sorted by `(δ1, δ2)`.
pub fn sweep_grid(
    base: &Params,
    grid: &GridSpec,
    settings: CellSettings,
    workers: usize,
) -> Result<Vec<SweepRecord>, RunError> {
    let cells: Vec<(f64, f64)> = grid
        .delta1
        .points()
        .into_iter()
        .flat_map(|d1| grid.delta2.points().into_iter().map(move |d2| (d1, d2)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| RunError::Io { path: "thread pool".into(), message: e.to_string() })?;
    let mut records = pool.install(|| {
        cells
            .par_iter()
            .map(|&(d1, d2)| sweep_cell(base, d1, d2, settings))
            .collect::<Result<Vec<_>, _>>()
    })?;
    records.sort_by(|a, b| a.delta1.total_cmp(&b.delta1).then(a.delta2.total_cmp(&b.delta2)));
    Ok(records)
}

pub(crate) fn run_sweep(config: &RunConfig) -> Result<Product, RunError> {
    let grid = config.grid.expect("sweep configs always carry a grid");
    let settings = CellSettings { t_end: config.t_end, rel_tol: config.rel_tol.max(1e-8) };
    let records = sweep_grid(&config.params, &grid, settings, config.workers)?;
    let mut table = Table::new(&COLUMNS);
    for r in &records {
        table.push(r.row());
    }
    let count = |f: fn(&SweepRecord) -> bool| records.iter().filter(|r| f(r)).count();
    Ok(Product {
        table,
        results: json!({
            "cells": records.len(),
            "constant_found": count(|r| r.constant_found),
            "selfsimilar_found": count(|r| r.selfsimilar_found),
            "blowup_detected": count(|r| r.blowup_time.is_some()),
        }),
        stats: json!({
            "grid": {
                "delta1": [grid.delta1.lo, grid.delta1.hi, grid.delta1.n],
                "delta2": [grid.delta2.lo, grid.delta2.hi, grid.delta2.n],
            },
            "probe_t_end": settings.t_end,
            "probe_rel_tol": settings.rel_tol,
        }),
    })
}
