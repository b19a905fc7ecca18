//! Machine-readable run reports.
//!
//! JSON reports use fixed field order and sorted maps, and carry no
//! timestamps, so the same inputs always serialize to the same bytes.
//! Every block states where its numbers come from with a [`Source`] label.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::auto::{Estimates, Source};
use crate::check::CheckResult;
use crate::majorant::{Certificate, CertificateMode, ModelDescriptor, PredictedRate, Provenance, Refusal};
use crate::scalar::{RateReport, ScalarTrace, TraceStatus};
use crate::solver::{Audit, LinearizationAudit, SolveReport, SolveStatus, Violation};

pub const CSV_COLUMNS: [&str; 9] = [
    "k",
    "t_k",
    "dt_k",
    "step_norm",
    "bd_margin",
    "quad_margin",
    "stationarity",
    "residual_norm",
    "rank",
];

#[derive(Debug, Clone, Serialize)]
pub struct CertificateRecord {
    pub beta: f64,
    pub kappa: f64,
    pub lambda: f64,
    /// `null` when the model has no finite radius.
    #[serde(rename = "R")]
    pub radius: Option<f64>,
    pub t_star: f64,
    pub model: ModelDescriptor,
    pub mode: CertificateMode,
    pub provenance: Provenance,
    pub rate: PredictedRate,
    pub checks: Vec<CheckResult>,
    pub sources: BTreeMap<String, Source>,
}

impl CertificateRecord {
    /// `sources` labels the inputs; `lambda`, `t_star` and `rate` are always derived.
    pub fn new(cert: &Certificate, mut sources: BTreeMap<String, Source>) -> Self {
        for key in ["lambda", "t_star", "rate"] {
            sources.insert(key.into(), Source::Derived);
        }
        Self {
            beta: cert.beta,
            kappa: cert.kappa,
            lambda: cert.lambda,
            radius: cert.radius.is_finite().then_some(cert.radius),
            t_star: cert.t_star,
            model: cert.model.descriptor(),
            mode: cert.mode,
            provenance: cert.provenance,
            rate: cert.rate,
            checks: cert.checks.clone(),
            sources,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RefusalRecord {
    pub failed_check: String,
    pub detail: String,
    pub checks: Vec<CheckResult>,
}

impl From<&Refusal> for RefusalRecord {
    fn from(r: &Refusal) -> Self {
        Self {
            failed_check: r.failed_check.clone(),
            detail: r.detail.clone(),
            checks: r.checks.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceRecord {
    pub source: Source,
    pub t_star: f64,
    pub status: TraceStatus,
    pub ts: Vec<f64>,
    pub hs: Vec<f64>,
}

impl From<&ScalarTrace> for TraceRecord {
    fn from(t: &ScalarTrace) -> Self {
        Self {
            source: Source::Derived,
            t_star: t.t_star,
            status: t.status,
            ts: t.ts.clone(),
            hs: t.hs.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MarginsRecord {
    pub source: Source,
    pub bd: Vec<f64>,
    pub quad: Vec<Option<f64>>,
    pub quad_enforced: bool,
    pub containment: Vec<f64>,
    pub norm_bound: Vec<Option<f64>>,
    pub residual_contraction: Vec<Option<f64>>,
    pub rank_constant: bool,
    pub violation: Option<Violation>,
}

impl From<&Audit> for MarginsRecord {
    fn from(a: &Audit) -> Self {
        Self {
            source: Source::Measured,
            bd: a.bd.clone(),
            quad: a.quad.clone(),
            quad_enforced: a.quad_enforced,
            containment: a.containment.clone(),
            norm_bound: a.norm_bound.clone(),
            residual_contraction: a.residual_contraction.clone(),
            rank_constant: a.rank_constant,
            violation: a.violation.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveRecord {
    pub source: Source,
    pub status: SolveStatus,
    pub iterations: usize,
    pub beta: f64,
    pub iterates: Vec<Vec<f64>>,
    pub step_norms: Vec<f64>,
    pub stationarity: Vec<f64>,
    pub residual_norms: Vec<f64>,
    pub anchored_residuals: Vec<f64>,
    pub rank_history: Vec<usize>,
    pub margins: Option<MarginsRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub linearization: Option<LinearizationAudit>,
}

impl SolveRecord {
    pub fn new(r: &SolveReport, linearization: Option<LinearizationAudit>) -> Self {
        Self {
            source: Source::Measured,
            status: r.status,
            iterations: r.iterations(),
            beta: r.beta,
            iterates: r.iterates.iter().map(|x| x.iter().copied().collect()).collect(),
            step_norms: r.step_norms.clone(),
            stationarity: r.stationarity.clone(),
            residual_norms: r.residual_norms.clone(),
            anchored_residuals: r.anchored_residuals.clone(),
            rank_history: r.rank_history.clone(),
            margins: r.audit.as_ref().map(MarginsRecord::from),
            linearization,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub status: String,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimates: Option<Estimates>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refusal: Option<RefusalRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scalar_trace: Option<TraceRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate: Option<RateReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    pub outcome: Outcome,
}

impl Report {
    pub fn new(command: &str, config: BTreeMap<String, Value>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
            estimates: None,
            certificate: None,
            refusal: None,
            scalar_trace: None,
            rate: None,
            solve: None,
            result: None,
            outcome: Outcome {
                status: "ok".into(),
                exit_code: 0,
                detail: None,
            },
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serializable");
        s.push('\n');
        s
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One CSV row per iterate (or per scalar iterate when there is no solve).
pub fn trace_rows(solve: Option<&SolveReport>, trace: Option<&ScalarTrace>) -> Vec<[String; 9]> {
    let len = match (solve, trace) {
        (Some(s), _) => s.iterates.len(),
        (None, Some(t)) => t.ts.len(),
        (None, None) => 0,
    };
    let audit = solve.and_then(|s| s.audit.as_ref());
    (0..len)
        .map(|k| {
            let t_k = trace.map(|t| t.t(k));
            let dt_k = trace.and_then(|t| (k + 1 < len).then(|| t.t(k + 1) - t.t(k)));
            let step = solve.and_then(|s| s.step_norms.get(k).copied());
            let bd = audit.and_then(|a| a.bd.get(k).copied());
            let quad = audit.and_then(|a| a.quad.get(k).copied().flatten());
            let stat = solve.and_then(|s| s.stationarity.get(k).copied());
            let res = solve.and_then(|s| s.residual_norms.get(k).copied());
            let rank = solve
                .and_then(|s| s.rank_history.get(k))
                .map(|r| r.to_string())
                .unwrap_or_default();
            [
                k.to_string(),
                cell(t_k),
                cell(dt_k),
                cell(step),
                cell(bd),
                cell(quad),
                cell(stat),
                cell(res),
                rank,
            ]
        })
        .collect()
}

pub fn write_trace_csv<W: Write>(out: W, rows: &[[String; 9]]) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}
