//! Family sweeps, scaling fits and the Groverian verdict.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::graphs::{closed_form_profile, normalize_adjacency, Convention, Family, FamilySpec, DEFAULT_SIZE_CAP};
use crate::perturb::{delta_bound_audit, find_top_two, interlacing_check, secular_spectrum};
use crate::spectra::{
    constant_gap_fact, gap_delta2, moment_sk, variance_fact, Tuplet, TupletOptions, DEFAULT_CLUSTER_TOLERANCE,
};
use crate::walk::{critical_time, peak_fidelity, SpectralWalk, DEFAULT_HORIZON_MULTIPLE};

pub const ALPHA_GRID: [f64; 3] = [1.25, 1.5, 1.75];
pub const MIN_SWEEP_SIZES: usize = 5;
pub const MIN_VERTEX_SPAN: f64 = 8.0;

/// How γ is chosen for each instance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Default)]
#[serde(tag = "rule", content = "value", rename_all = "snake_case")]
pub enum GammaRule {
    #[default]
    S1,
    Fixed(f64),
    /// γ = S₁ + c·(size parameter).
    S1PlusSize(f64),
    /// γ making the adjacency coefficient of γH equal to 1/N, the classic
    /// continuous-time Grover setting on the clique.
    Grover,
}

impl GammaRule {
    /// `adjacency_norm` is the spectral norm of the unnormalized adjacency.
    pub fn resolve(self, s1: f64, size: usize, adjacency_norm: f64, vertices: usize, convention: Convention) -> f64 {
        match self {
            GammaRule::S1 => s1,
            GammaRule::Fixed(g) => g,
            GammaRule::S1PlusSize(c) => s1 + c * size as f64,
            GammaRule::Grover => {
                let scale = match convention {
                    Convention::UnitInterval => 2.0,
                    Convention::SymmetricInterval => 1.0,
                };
                scale * adjacency_norm / vertices as f64
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepOptions {
    pub convention: Convention,
    pub gamma: GammaRule,
    pub size_cap: usize,
    pub horizon_multiple: f64,
    /// Use the closed-form compressed tuplet even below the size cap.
    pub prefer_compressed: bool,
    pub cluster_tolerance: f64,
}

impl SweepOptions {
    fn tuplet_options(&self) -> TupletOptions {
        TupletOptions {
            cluster_tolerance: self.cluster_tolerance,
            ..TupletOptions::default()
        }
    }
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            convention: Convention::UnitInterval,
            gamma: GammaRule::S1,
            size_cap: DEFAULT_SIZE_CAP,
            horizon_multiple: DEFAULT_HORIZON_MULTIPLE,
            prefer_compressed: false,
            cluster_tolerance: DEFAULT_CLUSTER_TOLERANCE,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AroundS1Count {
    pub alpha: f64,
    /// Distinct eigenvalues r ≥ 2 with γ < ε₁^α/Δ_r.
    pub count: usize,
    /// Same set counted with multiplicity.
    pub count_with_multiplicity: usize,
}

/// Per-instance spectral and dynamical summary.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InstanceMetrics {
    pub family_id: String,
    pub size_param: usize,
    pub num_vertices: usize,
    pub compressed: bool,
    pub eps1: f64,
    pub eps2: f64,
    pub delta2: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub gamma: f64,
    pub zeta1: f64,
    pub zeta2: f64,
    pub delta_plus: f64,
    pub delta_minus: f64,
    /// ‖F₁w‖².
    pub overlap1: f64,
    pub t_star: f64,
    pub f_at_t_star: f64,
    pub peak_value: f64,
    pub peak_time: f64,
    pub around_s1: Vec<AroundS1Count>,
    pub audit_flags: Vec<String>,
}

impl InstanceMetrics {
    pub fn moment_ratio(&self) -> f64 {
        self.s2 / (self.s1 * self.s1)
    }
}

/// |I_α| for one tuplet.
pub fn around_s1_counts(t: &Tuplet, gamma: f64) -> Vec<AroundS1Count> {
    let eps1 = t.eps()[0];
    let mults = t.decomposition().multiplicities();
    ALPHA_GRID
        .iter()
        .map(|&alpha| {
            let members: Vec<usize> = (1..t.d()).filter(|&r| gamma < eps1.powf(alpha) / t.delta(r)).collect();
            AroundS1Count {
                alpha,
                count: members.len(),
                count_with_multiplicity: members.iter().map(|&r| mults[r]).sum(),
            }
        })
        .collect()
}

/// Runs the secular and spectral-fidelity pipeline on one tuplet. The
/// tuplet's γ is used as given.
pub fn analyze_tuplet(
    t: &Tuplet,
    family_id: &str,
    size_param: usize,
    horizon_multiple: f64,
) -> Result<InstanceMetrics> {
    let s1 = moment_sk(t, 1)?;
    let s2 = moment_sk(t, 2)?;
    let s3 = moment_sk(t, 3)?;
    let delta2 = gap_delta2(t.decomposition())?;
    let top = find_top_two(t)?;
    let full = secular_spectrum(t)?;
    let walk = SpectralWalk::new(t, &full)?;
    let t_star = critical_time(&top)?;
    let peak = peak_fidelity(t, &full, horizon_multiple)?;

    let mut flags = Vec::new();
    if t.decomposition().is_ambiguous() {
        flags.push("ambiguous_clustering".to_string());
    }
    let interlacing = interlacing_check(t, &top);
    if !interlacing.holds {
        flags.push("interlacing_failed".into());
    }
    if !top.strict_bracket {
        flags.push("theta2_outside_support".into());
    }
    // The δ bounds and the lower constant-gap side rely on Δ_r ≤ 1.
    let unit = t.hamiltonian().convention() == Convention::UnitInterval;
    if (t.gamma() - s1).abs() <= 1e-9 * s1.max(1.0) && t.eps()[0] <= 0.2 {
        let bounds = delta_bound_audit(t, &top)?;
        if !bounds.passed && unit {
            flags.push("delta_bounds_failed".into());
        }
    }
    if !variance_fact(t)?.holds {
        flags.push("variance_fact_failed".into());
    }
    if unit && !constant_gap_fact(t)?.holds {
        flags.push("constant_gap_fact_failed".into());
    }
    if (full.overlap_sum() - 1.0).abs() > 1e-9 {
        flags.push("overlap_sum_mismatch".into());
    }
    Ok(InstanceMetrics {
        family_id: family_id.to_string(),
        size_param,
        num_vertices: t.ambient_dim(),
        compressed: t.is_compressed(),
        eps1: t.eps()[0],
        eps2: t.eps().get(1).copied().unwrap_or(0.0),
        delta2,
        s1,
        s2,
        s3,
        gamma: t.gamma(),
        zeta1: top.zeta1(),
        zeta2: top.zeta2(),
        delta_plus: top.delta_plus,
        delta_minus: top.delta_minus,
        overlap1: top.overlaps[0],
        t_star,
        f_at_t_star: walk.fidelity(t_star),
        peak_value: peak.value,
        peak_time: peak.time,
        around_s1: around_s1_counts(t, t.gamma()),
        audit_flags: flags,
    })
}

/// Vertex-0 tuplet for a family member, dense when within the cap and
/// compressed from the closed-form spectrum otherwise.
pub fn instance_tuplet(spec: &FamilySpec, options: &SweepOptions) -> Result<Tuplet> {
    instance_tuplet_at(spec, options, 0)
}

/// As [`instance_tuplet`] with an arbitrary target vertex. The compressed
/// route relies on vertex transitivity, so any index gives the same tuplet.
pub fn instance_tuplet_at(spec: &FamilySpec, options: &SweepOptions, vertex: usize) -> Result<Tuplet> {
    let vertices = spec.vertex_count()?;
    if vertex >= vertices {
        return Err(LabError::InvalidParameter(format!(
            "vertex {vertex} out of range for {vertices} vertices"
        )));
    }
    let compressed = options.prefer_compressed || vertices > options.size_cap;
    let (base, norm) = if compressed {
        let profile = closed_form_profile(spec, options.convention).ok_or(LabError::SizeCap {
            vertices,
            cap: options.size_cap,
        })?;
        // Every family with a closed-form profile is regular.
        let degree = spec.degree().unwrap_or(0) as f64;
        (
            Tuplet::from_profile_with_options(&profile, 1.0, options.tuplet_options())?,
            degree,
        )
    } else {
        let graph = spec.build(options.size_cap)?;
        let h = Arc::new(normalize_adjacency(&graph, options.convention)?);
        let norm = h.source_spectral_norm();
        (
            Tuplet::vertex_with_options(h, vertex, 1.0, options.tuplet_options())?,
            norm,
        )
    };
    let s1 = moment_sk(&base, 1)?;
    let gamma = options
        .gamma
        .resolve(s1, spec.size_param(), norm, vertices, options.convention);
    base.with_gamma(gamma)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SizeFailure {
    pub size_param: usize,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepResult {
    pub family: String,
    pub template: FamilySpec,
    pub options: SweepOptions,
    pub rows: Vec<InstanceMetrics>,
    pub failures: Vec<SizeFailure>,
}

/// Runs every size (in parallel); rows come back sorted by size and
/// failures are recorded rather than aborting the sweep.
pub fn sweep_family(template: &FamilySpec, sizes: &[usize], options: &SweepOptions) -> SweepResult {
    let mut sizes = sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    let outcomes: Vec<(usize, Result<InstanceMetrics>)> = sizes
        .par_iter()
        .map(|&size| {
            let spec = template.with_size(size);
            let outcome = instance_tuplet(&spec, options)
                .and_then(|t| analyze_tuplet(&t, &spec.to_string(), size, options.horizon_multiple));
            (size, outcome)
        })
        .collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (size, outcome) in outcomes {
        match outcome {
            Ok(row) => rows.push(row),
            Err(e) => failures.push(SizeFailure {
                size_param: size,
                error: e.to_string(),
            }),
        }
    }
    SweepResult {
        family: template.family().to_string(),
        template: *template,
        options: *options,
        rows,
        failures,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// log q against log N.
    PowerInN,
    /// log q against log n (the size parameter).
    PowerInParam,
    /// log q against n.
    ExponentialInParam,
}

/// Regression model for Δ₂: the Hamming gap scales with the word length
/// rather than with N.
pub fn delta2_model(family: Family) -> FitModel {
    match family {
        Family::Hamming => FitModel::PowerInParam,
        _ => FitModel::PowerInN,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Eps1,
    Eps2,
    Delta2,
    S1,
    S2,
    S3,
    MomentRatio,
    AssumptionRatio,
    DeltaPlusOverEps1,
    Eps1OverDeltaMinus,
    AboveS1Ratio,
    TStarEps1,
    PeakValue,
    S1Delta2,
}

impl Quantity {
    pub fn of(self, m: &InstanceMetrics) -> f64 {
        match self {
            Quantity::Eps1 => m.eps1,
            Quantity::Eps2 => m.eps2,
            Quantity::Delta2 => m.delta2,
            Quantity::S1 => m.s1,
            Quantity::S2 => m.s2,
            Quantity::S3 => m.s3,
            Quantity::MomentRatio => m.moment_ratio(),
            Quantity::AssumptionRatio => m.eps1 / (m.s1 * m.delta2).sqrt(),
            Quantity::DeltaPlusOverEps1 => m.delta_plus / m.eps1,
            Quantity::Eps1OverDeltaMinus => m.eps1 / m.delta_minus.abs(),
            Quantity::AboveS1Ratio => m.eps1 * m.s1 / (m.gamma - m.s1),
            Quantity::TStarEps1 => m.t_star * m.eps1,
            Quantity::PeakValue => m.peak_value,
            Quantity::S1Delta2 => m.s1 * m.delta2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Eps1 => "eps1",
            Quantity::Eps2 => "eps2",
            Quantity::Delta2 => "delta2",
            Quantity::S1 => "s1",
            Quantity::S2 => "s2",
            Quantity::S3 => "s3",
            Quantity::MomentRatio => "s2_over_s1_sq",
            Quantity::AssumptionRatio => "eps1_over_sqrt_s1_delta2",
            Quantity::DeltaPlusOverEps1 => "delta_plus_over_eps1",
            Quantity::Eps1OverDeltaMinus => "eps1_over_abs_delta_minus",
            Quantity::AboveS1Ratio => "eps1_s1_over_gamma_minus_s1",
            Quantity::TStarEps1 => "t_star_eps1",
            Quantity::PeakValue => "peak_value",
            Quantity::S1Delta2 => "s1_delta2",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ScalingFit {
    pub quantity: Quantity,
    pub model: FitModel,
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub sample_sizes: Vec<usize>,
    /// Largest over smallest vertex count; below 8 the fit is flagged.
    pub vertex_span: f64,
    pub span_warning: bool,
}

/// Least-squares line y = a + b·x, returning (b, a, R²).
pub fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    } else {
        1.0
    };
    (slope, intercept, r2)
}

pub fn fit_scaling(rows: &[InstanceMetrics], quantity: Quantity, model: FitModel) -> Result<ScalingFit> {
    if rows.len() < MIN_SWEEP_SIZES {
        return Err(LabError::Precondition(format!(
            "a fit needs at least {MIN_SWEEP_SIZES} sizes, got {}",
            rows.len()
        )));
    }
    let values: Vec<f64> = rows.iter().map(|m| quantity.of(m)).collect();
    if let Some(bad) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(LabError::Domain(format!("{quantity} has the non-positive value {bad}")));
    }
    let x: Vec<f64> = rows
        .iter()
        .map(|m| match model {
            FitModel::PowerInN => (m.num_vertices as f64).ln(),
            FitModel::PowerInParam => (m.size_param as f64).ln(),
            FitModel::ExponentialInParam => m.size_param as f64,
        })
        .collect();
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let (exponent, intercept, r_squared) = least_squares(&x, &y);
    let lo = rows.iter().map(|m| m.num_vertices).min().unwrap_or(1) as f64;
    let hi = rows.iter().map(|m| m.num_vertices).max().unwrap_or(1) as f64;
    Ok(ScalingFit {
        quantity,
        model,
        exponent,
        intercept,
        r_squared,
        sample_sizes: rows.iter().map(|m| m.size_param).collect(),
        vertex_span: hi / lo,
        span_warning: hi / lo < MIN_VERTEX_SPAN,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerdictOptions {
    pub ratio_band_upper: f64,
    pub slope_margin: f64,
    pub trend_tolerance: f64,
    pub min_r_squared: f64,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        Self {
            ratio_band_upper: 10.0,
            slope_margin: 0.1,
            trend_tolerance: 0.05,
            min_r_squared: 0.9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TrendDiagnostic {
    pub fit: Option<ScalingFit>,
    pub triggered: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NecessaryDiagnostics {
    /// δ₊/ε₁ drifts away from a constant.
    pub case_i: TrendDiagnostic,
    /// ε₁/|δ₋| → 0.
    pub case_ii: TrendDiagnostic,
    /// θ₂ outside the support on every instance (informational).
    pub case_iii_gap_skip: bool,
    /// ε₁S₁/(γ − S₁) → 0 with γ > S₁ throughout.
    pub above_s1: TrendDiagnostic,
    /// Per instance, |I_α| for each α.
    pub around_s1: Vec<Vec<AroundS1Count>>,
    /// Some α has |I_α| ≥ 3 on every instance of the upper half of the sweep.
    pub around_s1_triggered: bool,
    pub triggered: Vec<String>,
}

fn trend(rows: &[InstanceMetrics], q: Quantity, test: impl Fn(&ScalingFit) -> bool) -> TrendDiagnostic {
    match fit_scaling(rows, q, FitModel::PowerInN) {
        Ok(fit) => TrendDiagnostic {
            triggered: test(&fit),
            fit: Some(fit),
        },
        Err(_) => TrendDiagnostic {
            fit: None,
            triggered: false,
        },
    }
}

pub fn necessary_diagnostics(rows: &[InstanceMetrics], options: &VerdictOptions) -> NecessaryDiagnostics {
    let margin = options.slope_margin;
    let r2 = options.min_r_squared;
    let case_i = trend(rows, Quantity::DeltaPlusOverEps1, |f| {
        f.exponent.abs() >= margin && f.r_squared >= r2
    });
    let case_ii = trend(rows, Quantity::Eps1OverDeltaMinus, |f| {
        f.exponent <= -margin && f.r_squared >= r2
    });
    let above = if rows.iter().all(|m| m.gamma > m.s1) {
        trend(rows, Quantity::AboveS1Ratio, |f| {
            f.exponent <= -margin && f.r_squared >= r2
        })
    } else {
        TrendDiagnostic {
            fit: None,
            triggered: false,
        }
    };
    let gap_skip = !rows.is_empty()
        && rows
            .iter()
            .all(|m| m.audit_flags.iter().any(|f| f == "theta2_outside_support"));
    let upper = &rows[rows.len() / 2..];
    let around_triggered =
        !upper.is_empty() && (0..ALPHA_GRID.len()).any(|a| upper.iter().all(|m| m.around_s1[a].count >= 3));
    let mut triggered = Vec::new();
    if case_i.triggered {
        triggered.push("case_i".to_string());
    }
    if case_ii.triggered {
        triggered.push("case_ii".into());
    }
    if above.triggered {
        triggered.push("above_s1".into());
    }
    if around_triggered {
        triggered.push("around_s1".into());
    }
    NecessaryDiagnostics {
        case_i,
        case_ii,
        case_iii_gap_skip: gap_skip,
        above_s1: above,
        around_s1: rows.iter().map(|m| m.around_s1.clone()).collect(),
        around_s1_triggered: around_triggered,
        triggered,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Groverian {
    Yes,
    No,
    Inconclusive,
}

impl fmt::Display for Groverian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Groverian::Yes => "yes",
            Groverian::No => "no",
            Groverian::Inconclusive => "inconclusive",
        })
    }
}

/// Finite-size renderings of the asymptotic lemmas at the largest size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LemmaRenderings {
    /// (ε₁²/δ₊²)/(S₂/S₁²).
    pub delta_plus_ratio: f64,
    /// (ε₁²/δ₋²)/(S₂/S₁²).
    pub delta_minus_ratio: f64,
    /// 2ε₁²‖F₁w‖²/δ₊².
    pub full_expanse: f64,
    pub s1_delta2_min: f64,
    pub s1_delta2_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Verdict {
    pub groverian: Groverian,
    pub assumption_holds: bool,
    pub assumption_fit: Option<ScalingFit>,
    pub criterion_holds: bool,
    pub ratio_range: (f64, f64),
    pub ratio_fit: Option<ScalingFit>,
    pub diagnostics: NecessaryDiagnostics,
    pub lemmas: Option<LemmaRenderings>,
    pub gamma_used: Vec<f64>,
    pub notes: Vec<String>,
}

fn lemma_renderings(rows: &[InstanceMetrics]) -> Option<LemmaRenderings> {
    let last = rows.last()?;
    let e2 = last.eps1 * last.eps1;
    let ratio = last.moment_ratio();
    let sd: Vec<f64> = rows.iter().map(|m| m.s1 * m.delta2).collect();
    Some(LemmaRenderings {
        delta_plus_ratio: e2 / last.delta_plus.powi(2) / ratio,
        delta_minus_ratio: e2 / last.delta_minus.powi(2) / ratio,
        full_expanse: 2.0 * e2 * last.overlap1 / last.delta_plus.powi(2),
        s1_delta2_min: sd.iter().copied().fold(f64::INFINITY, f64::min),
        s1_delta2_max: sd.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

pub fn verdict(sweep: &SweepResult, options: &VerdictOptions) -> Verdict {
    let rows = &sweep.rows;
    let diagnostics = necessary_diagnostics(rows, options);
    let gamma_used = rows.iter().map(|m| m.gamma).collect();
    let ratios: Vec<f64> = rows.iter().map(|m| m.moment_ratio()).collect();
    let ratio_range = (
        ratios.iter().copied().fold(f64::INFINITY, f64::min),
        ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    );
    let mut notes = Vec::new();
    if rows.len() < MIN_SWEEP_SIZES {
        notes.push(format!("only {} usable sizes", rows.len()));
        return Verdict {
            groverian: Groverian::Inconclusive,
            assumption_holds: false,
            assumption_fit: None,
            criterion_holds: false,
            ratio_range,
            ratio_fit: None,
            diagnostics,
            lemmas: lemma_renderings(rows),
            gamma_used,
            notes,
        };
    }
    let assumption_fit = fit_scaling(rows, Quantity::AssumptionRatio, FitModel::PowerInN).ok();
    let assumption_holds = assumption_fit
        .as_ref()
        .is_some_and(|f| f.exponent <= -options.slope_margin && f.r_squared >= options.min_r_squared);
    let ratio_fit = fit_scaling(rows, Quantity::MomentRatio, FitModel::PowerInN).ok();
    let in_band = ratios.iter().all(|&r| (1.0..=options.ratio_band_upper).contains(&r));
    let criterion_holds = in_band
        && ratio_fit
            .as_ref()
            .is_some_and(|f| f.exponent.abs() <= options.trend_tolerance);
    if let Some(f) = assumption_fit.as_ref().filter(|f| f.span_warning) {
        notes.push(format!("vertex span {:.1}x is below {MIN_VERTEX_SPAN}x", f.vertex_span));
    }
    let groverian = if assumption_holds {
        if criterion_holds {
            Groverian::Yes
        } else {
            Groverian::No
        }
    } else if !diagnostics.triggered.is_empty() {
        Groverian::No
    } else {
        notes.push("assumption trend not established and no necessary condition triggered".into());
        Groverian::Inconclusive
    };
    Verdict {
        groverian,
        assumption_holds,
        assumption_fit,
        criterion_holds,
        ratio_range,
        ratio_fit,
        diagnostics,
        lemmas: lemma_renderings(rows),
        gamma_used,
        notes,
    }
}

/// One family of the default table with its sweep grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SuiteEntry {
    pub label: String,
    pub template: FamilySpec,
    pub sizes: Vec<usize>,
    pub delta2_model: FitModel,
    pub expected: Option<Groverian>,
}

pub fn default_suite() -> Vec<SuiteEntry> {
    let entry = |label: &str, template: FamilySpec, sizes: &[usize], expected| SuiteEntry {
        label: label.to_string(),
        template,
        sizes: sizes.to_vec(),
        delta2_model: delta2_model(template.family()),
        expected: Some(expected),
    };
    vec![
        entry(
            "clique",
            FamilySpec::Complete { n: 16 },
            &[16, 32, 64, 128, 256, 512, 1024],
            Groverian::Yes,
        ),
        entry(
            "cycle",
            FamilySpec::Cycle { n: 32 },
            &[32, 64, 128, 256, 512],
            Groverian::No,
        ),
        entry(
            "hamming(q=2)",
            FamilySpec::Hamming { n: 4, q: 2 },
            &[4, 5, 6, 7, 8, 9, 10],
            Groverian::Yes,
        ),
        entry(
            "johnson(k=3)",
            FamilySpec::Johnson { n: 10, k: 3 },
            &[10, 14, 18, 22, 26, 30],
            Groverian::Yes,
        ),
        entry(
            "grassmann(q=2,k=2)",
            FamilySpec::Grassmann { q: 2, n: 4, k: 2 },
            &[4, 5, 6, 7, 8],
            Groverian::Yes,
        ),
        entry(
            "paley",
            FamilySpec::Paley { p: 13 },
            &[13, 29, 61, 109, 229, 457],
            Groverian::Yes,
        ),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FamilyRow {
    pub label: String,
    pub family_spec: String,
    pub sizes: Vec<usize>,
    pub verdict: Groverian,
    pub expected: Option<Groverian>,
    pub eps1_exponent: Option<f64>,
    pub delta2_exponent: Option<f64>,
    pub delta2_model: FitModel,
    pub s1_exponent: Option<f64>,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub notes: Vec<String>,
}

pub fn family_row(entry: &SuiteEntry, sweep: &SweepResult, v: &Verdict) -> FamilyRow {
    let exp = |q, model| fit_scaling(&sweep.rows, q, model).ok().map(|f| f.exponent);
    let mut notes = v.notes.clone();
    for failure in &sweep.failures {
        notes.push(format!("size {} failed: {}", failure.size_param, failure.error));
    }
    if !v.diagnostics.triggered.is_empty() {
        notes.push(format!("diagnostics: {}", v.diagnostics.triggered.join("+")));
    }
    if sweep.rows.iter().any(|m| m.compressed) {
        notes.push("closed-form spectrum above the size cap".into());
    }
    FamilyRow {
        label: entry.label.clone(),
        family_spec: entry.template.to_string(),
        sizes: sweep.rows.iter().map(|m| m.size_param).collect(),
        verdict: v.groverian,
        expected: entry.expected,
        eps1_exponent: exp(Quantity::Eps1, FitModel::PowerInN),
        delta2_exponent: exp(Quantity::Delta2, entry.delta2_model),
        delta2_model: entry.delta2_model,
        s1_exponent: exp(Quantity::S1, FitModel::PowerInN),
        ratio_min: v.ratio_range.0,
        ratio_max: v.ratio_range.1,
        notes,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FamilyReport {
    pub entry: SuiteEntry,
    pub sweep: SweepResult,
    pub verdict: Verdict,
    pub row: FamilyRow,
}

/// Sweeps every suite entry and assembles the families table.
pub fn table_report(
    suite: &[SuiteEntry],
    options: &SweepOptions,
    verdict_options: &VerdictOptions,
) -> Vec<FamilyReport> {
    suite
        .iter()
        .map(|entry| {
            let sweep = sweep_family(&entry.template, &entry.sizes, options);
            let v = verdict(&sweep, verdict_options);
            let row = family_row(entry, &sweep, &v);
            FamilyReport {
                entry: entry.clone(),
                sweep,
                verdict: v,
                row,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn least_squares_recovers_a_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let (b, a, r2) = least_squares(&x, &y);
        assert_abs_diff_eq!(b, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(a, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r2, 1.0, epsilon = 1e-14);
        let (_, _, r2) = least_squares(&x, &[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(r2, 1.0);
    }

    #[test]
    fn clique_sweep_is_groverian() {
        let sweep = sweep_family(
            &FamilySpec::Complete { n: 16 },
            &[16, 32, 64, 128, 256],
            &SweepOptions::default(),
        );
        assert_eq!(sweep.rows.len(), 5);
        for row in &sweep.rows {
            let flags: Vec<_> = row
                .audit_flags
                .iter()
                .filter(|f| *f != "theta2_outside_support")
                .collect();
            assert!(flags.is_empty(), "{flags:?}");
            assert!(row.around_s1.iter().all(|c| c.count == 0));
        }
        let v = verdict(&sweep, &VerdictOptions::default());
        assert_eq!(v.groverian, Groverian::Yes, "{v:?}");
        let s1 = fit_scaling(&sweep.rows, Quantity::S1, FitModel::PowerInN).unwrap();
        assert!(s1.exponent.abs() <= 0.05);
    }

    #[test]
    fn hamming_shadow_is_exact() {
        let sweep = sweep_family(
            &FamilySpec::Hamming { n: 4, q: 2 },
            &[4, 5, 6, 7, 8, 9, 10],
            &SweepOptions::default(),
        );
        for row in &sweep.rows {
            assert_abs_diff_eq!(row.eps1, 2f64.powf(-(row.size_param as f64) / 2.0), epsilon = 1e-12);
        }
    }

    #[test]
    fn too_few_sizes_is_inconclusive() {
        let sweep = sweep_family(&FamilySpec::Complete { n: 16 }, &[16, 32, 64], &SweepOptions::default());
        assert_eq!(
            verdict(&sweep, &VerdictOptions::default()).groverian,
            Groverian::Inconclusive
        );
        assert!(fit_scaling(&sweep.rows, Quantity::Eps1, FitModel::PowerInN).is_err());
    }

    #[test]
    fn size_failures_are_recorded() {
        let options = SweepOptions {
            size_cap: 100,
            ..SweepOptions::default()
        };
        let sweep = sweep_family(&FamilySpec::CycleInverseMatching { p: 5 }, &[7, 11, 101, 9], &options);
        assert_eq!(sweep.rows.len(), 2);
        assert_eq!(sweep.failures.len(), 2);
    }

    #[test]
    fn forced_gamma_above_s1_trends() {
        let options = SweepOptions {
            gamma: GammaRule::S1PlusSize(1.0),
            ..SweepOptions::default()
        };
        let sweep = sweep_family(&FamilySpec::Complete { n: 16 }, &[16, 32, 64, 128, 256], &options);
        let d = necessary_diagnostics(&sweep.rows, &VerdictOptions::default());
        assert!(d.above_s1.triggered, "{:?}", d.above_s1);
    }
}
