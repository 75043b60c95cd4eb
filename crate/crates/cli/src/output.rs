//! CSV tables and the JSON manifest.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use dyadic_core::ode::format_sig17;
use dyadic_core::shell::thresholds;
use dyadic_core::Params;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::CommandKind;

/// A header row plus rows of preformatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// 17 significant digits; empty for a missing value.
pub fn cell(x: Option<f64>) -> String {
    x.map(format_sig17).unwrap_or_default()
}

pub fn num(x: f64) -> String {
    format_sig17(x)
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamsView {
    pub beta: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub forcing: f64,
    pub n_shells: usize,
}

impl From<&Params> for ParamsView {
    fn from(p: &Params) -> Self {
        Self { beta: p.beta(), delta1: p.delta1(), delta2: p.delta2(), forcing: p.forcing(), n_shells: p.n_shells() }
    }
}

pub fn manifest(command: CommandKind, params: &Params, results: Value, stats: Value) -> Value {
    let (band_low, critical, unit) = thresholds(params);
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    json!({
        "command": command.to_string(),
        "params": ParamsView::from(params),
        "derived": {
            "k1": params.k1(),
            "thresholds": { "band_low": band_low, "critical": critical, "unit": unit },
        },
        "results": results,
        "stats": stats,
        "timestamp": timestamp,
    })
}

/// Sidecar manifest path for a CSV output: same stem, `.json` extension.
pub fn manifest_path(out: &Path) -> PathBuf {
    if out.extension().is_some_and(|e| e == "json") {
        let mut s = out.as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    } else {
        out.with_extension("json")
    }
}
