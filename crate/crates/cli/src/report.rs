//! JSON report envelope and payloads.

use chrono::{SecondsFormat, Utc};
use serde::Serialize;
use spectral_search_core::classify::{FamilyRow, GammaRule, InstanceMetrics, ScalingFit, SizeFailure, Verdict};
use spectral_search_core::graphs::{Convention, FamilySpec};
use spectral_search_core::perturb::{AuditReport, DeltaBoundAudit, InterlacingCheck, WeylAudit};
use spectral_search_core::spectra::InequalityCheck;
use spectral_search_core::walk::{FidelityCurve, LowerBoundAudit, Peak, PerfectFidelityReport, PropositiveCheck};

use crate::error::CliError;

pub const SCHEMA_VERSION: &str = "1.0.0";

/// Published schema for every emitted envelope.
pub const REPORT_SCHEMA: &str = include_str!("../../../docs/report.schema.json");

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportEnvelope {
    pub schema_version: String,
    pub command: String,
    pub timestamp_utc: String,
    pub payload: Payload,
}

impl ReportEnvelope {
    pub fn new(command: &str, payload: Payload) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            command: command.to_string(),
            timestamp_utc: Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
            payload,
        }
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Instance(InstanceReport),
    FidelityCurve(CurveReport),
    Sweep(SweepReport),
    FamiliesTable(TableReport),
}

/// Knobs in effect for a run.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Settings {
    pub convention: Convention,
    pub gamma: GammaRule,
    pub cluster_tolerance: f64,
    pub size_cap: usize,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AuditBundle {
    pub identities: Option<AuditReport>,
    pub weyl: Option<WeylAudit>,
    pub interlacing: Option<InterlacingCheck>,
    pub delta_bounds: Option<DeltaBoundAudit>,
    pub variance: Option<InequalityCheck>,
    pub constant_gap: Option<InequalityCheck>,
    pub moment_monotonicity: Option<bool>,
    pub lower_bound: Option<LowerBoundAudit>,
    /// max_t |f_direct − f_spectral| on a 100-point grid.
    pub method_agreement: Option<f64>,
    /// min_t (triangle bound − f) on the same grid.
    pub triangle_slack: Option<f64>,
    pub perfect_fidelity: Option<PerfectFidelityReport>,
    pub propositive: Option<PropositiveCheck>,
    /// Audits skipped and why.
    pub skipped: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InstanceReport {
    pub family: String,
    pub spec: FamilySpec,
    pub vertex: usize,
    pub settings: Settings,
    pub metrics: InstanceMetrics,
    pub audits: AuditBundle,
    /// Names of failed audits; non-empty means exit status 2.
    pub findings: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CurveReport {
    pub family: String,
    pub spec: FamilySpec,
    pub settings: Settings,
    pub gamma: f64,
    pub eps1: f64,
    pub horizon: f64,
    pub peak: Peak,
    pub max_method_gap: Option<f64>,
    pub curve: FidelityCurve,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepReport {
    pub family: String,
    pub template: FamilySpec,
    pub settings: Settings,
    pub sizes: Vec<usize>,
    pub rows: Vec<InstanceMetrics>,
    pub failures: Vec<SizeFailure>,
    pub fits: Vec<ScalingFit>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TableReport {
    pub settings: Settings,
    pub rows: Vec<FamilyRow>,
    pub verdicts: Vec<Verdict>,
    pub all_match_expected: bool,
}
