//! Report emission: verification check tables, the solve report document,
//! and the distribution-evaluation report, in JSON or CSV.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::dist::{DistKind, InvariantDistribution};
use crate::error::{HoromapError, Result};
use crate::quad::IntegralEstimate;
use crate::solver::SolveOutcome;

/// Output encodings selectable on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = HoromapError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(HoromapError::Config(format!("unknown output format '{other}'"))),
        }
    }
}

/// One pass/fail line of a verification suite.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    pub fn new(suite: &str, name: &str, passed: bool, detail: String) -> Self {
        CheckResult { suite: suite.into(), name: name.into(), passed, detail }
    }

    /// Convenience for |value| <= tol assertions.
    pub fn bounded(suite: &str, name: &str, value: f64, tol: f64) -> Self {
        CheckResult::new(suite, name, value <= tol, format!("{value:.3e} <= {tol:.3e}"))
    }

    /// Convenience for membership in a closed interval.
    pub fn in_band(suite: &str, name: &str, value: f64, lo: f64, hi: f64) -> Self {
        CheckResult::new(
            suite,
            name,
            value >= lo && value <= hi,
            format!("{value:.6} in [{lo:.6}, {hi:.6}]"),
        )
    }
}

/// Fixed-width per-check table with a trailing tally line.
pub fn render_check_table(checks: &[CheckResult]) -> String {
    let name_w = checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
    let mut out = String::new();
    let _ = writeln!(out, "{:<name_w$}  {:<6}  detail", "check", "status");
    let _ = writeln!(out, "{}  {}  {}", "-".repeat(name_w), "-".repeat(6), "-".repeat(6));
    for c in checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{:<name_w$}  {:<6}  {}", c.name, status, c.detail);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    let _ = writeln!(out, "{} checks, {} failed", checks.len(), failed);
    out
}

/// CSV rows (suite, name, passed, detail).
pub fn checks_to_csv(checks: &[CheckResult]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["suite", "name", "passed", "detail"])?;
    for c in checks {
        w.write_record([&c.suite, &c.name, &c.passed.to_string(), &c.detail])?;
    }
    let bytes = w.into_inner().map_err(|e| HoromapError::Config(format!("csv flush: {e}")))?;
    String::from_utf8(bytes).map_err(|e| HoromapError::Config(format!("csv utf8: {e}")))
}

/// The solve report document; the solution grid itself goes to a CSV file
/// referenced by `u_grid_csv`.
#[derive(Debug, Serialize)]
pub struct SolveReport {
    pub method: String,
    pub residual_sup: f64,
    pub sobolev_ratios: Vec<(usize, Option<f64>)>,
    pub sobolev_ratios_tame: Vec<(usize, Option<f64>)>,
    pub obstructions: Vec<crate::solver::Obstruction>,
    pub u_grid_csv: String,
}

impl SolveReport {
    pub fn from_outcome(outcome: &SolveOutcome, u_grid_csv: String) -> Self {
        SolveReport {
            method: outcome.method.clone(),
            residual_sup: outcome.residual_sup,
            sobolev_ratios: outcome.sobolev_ratios.clone(),
            sobolev_ratios_tame: outcome.sobolev_ratios_tame.clone(),
            obstructions: outcome.obstructions.clone(),
            u_grid_csv,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// One distribution evaluation in the CLI-facing report array.
#[derive(Debug, Clone, Serialize)]
pub struct DistReportRow {
    pub kind: String,
    pub params: serde_json::Value,
    pub value_re: f64,
    pub value_im: f64,
    pub error: f64,
}

impl DistReportRow {
    pub fn new(dist: &InvariantDistribution, est: &IntegralEstimate) -> Self {
        let (kind, params) = match dist.kind {
            DistKind::Delta0 => ("delta0".to_string(), serde_json::json!({ "mu": dist.mu })),
            DistKind::DeltaR(r) => {
                ("delta_r".to_string(), serde_json::json!({ "mu": dist.mu, "r": r }))
            }
            DistKind::DeltaHat { k, t_period, y } => (
                "deltahat".to_string(),
                serde_json::json!({ "mu": dist.mu, "k": k, "t_period": t_period, "y": y }),
            ),
        };
        DistReportRow {
            kind,
            params,
            value_re: est.value.re,
            value_im: est.value.im,
            error: est.error_estimate,
        }
    }
}

/// CSV rows for the distribution report (params flattened to JSON text).
pub fn dist_rows_to_csv(rows: &[DistReportRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["kind", "params", "value_re", "value_im", "error"])?;
    for r in rows {
        w.write_record([
            &r.kind,
            &r.params.to_string(),
            &r.value_re.to_string(),
            &r.value_im.to_string(),
            &r.error.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| HoromapError::Config(format!("csv flush: {e}")))?;
    String::from_utf8(bytes).map_err(|e| HoromapError::Config(format!("csv utf8: {e}")))
}
