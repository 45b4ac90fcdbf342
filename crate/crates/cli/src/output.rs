//! CSV traces and JSON metrics.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use sbc_core::analysis::metrics;
use sbc_core::sim::Trace;
use serde::{Deserialize, Serialize};

use crate::LabError;

/// A trace as named columns, the form written to and read from CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn theta_label(k: usize, zeta: usize) -> String {
    format!("theta_{k}_{zeta}")
}

impl Table {
    pub fn from_trace(trace: &Trace<f64>) -> Table {
        let n = trace.n;
        let mut columns = vec!["t".to_string()];
        columns.extend((1..=n).map(|k| format!("x{k}")));
        columns.extend((1..=n).map(|k| format!("x{k}d")));
        columns.extend((1..=n).map(|k| format!("e{k}")));
        columns.push("u".into());
        columns.extend(trace.estimate_labels.iter().map(|&(k, z)| theta_label(k, z)));
        columns.extend((1..n).map(|k| format!("s{k}")));
        columns.push("nu_tot".into());
        let rows = trace
            .rows
            .iter()
            .map(|r| {
                let mut v = Vec::with_capacity(columns.len());
                v.push(r.t);
                v.extend(&r.x);
                v.extend(&r.xd);
                v.extend(&r.e);
                v.push(r.u);
                v.extend(&r.estimates);
                v.extend(&r.s);
                v.push(r.lyapunov.nu_tot);
                v
            })
            .collect();
        Table { columns, rows }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Values round-trip exactly: 17 significant digits, LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{v:.16e}").expect("writing to a String");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Table, LabError> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| LabError::Compare("empty CSV".into()))?;
        let columns: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| LabError::Compare(format!("line {}: {e}", i + 2)))?;
            if row.len() != columns.len() {
                return Err(LabError::Compare(format!("line {}: {} fields, header has {}", i + 2, row.len(), columns.len())));
            }
            rows.push(row);
        }
        Ok(Table { columns, rows })
    }
}

/// Contents of `metrics.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub max_abs_e: Vec<f64>,
    pub final_abs_e: Vec<f64>,
    pub theta_hat_terminal: BTreeMap<String, f64>,
    /// Integration steps over which `nu_tot` increased.
    pub monotonicity_violations: usize,
    pub runtime_seconds: f64,
}

impl Metrics {
    pub fn new(trace: &Trace<f64>, runtime_seconds: f64) -> Metrics {
        let m = metrics(trace);
        Metrics {
            max_abs_e: m.max_abs_e,
            final_abs_e: m.final_abs_e,
            theta_hat_terminal: m.theta_hat_terminal.into_iter().map(|((k, z), v)| (theta_label(k, z), v)).collect(),
            monotonicity_violations: trace.step_violations,
            runtime_seconds,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metrics always serialize")
    }
}
