use std::io::Write;
use std::path::{Path, PathBuf};

use spectral_search_core::classify::{
    analyze_tuplet, default_suite, delta2_model, fit_scaling, instance_tuplet_at, sweep_family, table_report, verdict,
    FitModel, GammaRule, Groverian, Quantity, ScalingFit, SweepOptions, VerdictOptions, MIN_SWEEP_SIZES,
};
use spectral_search_core::graphs::{Convention, FamilySpec};
use spectral_search_core::perturb::{
    delta_bound_audit, full_perturbed_spectrum, identity_audit, interlacing_check, secular_spectrum,
    weyl_audit_from_spectra, PerturbedSpectrum,
};
use spectral_search_core::spectra::{constant_gap_fact, moment_monotonicity, variance_fact, Tuplet};
use spectral_search_core::walk::{
    critical_time, fidelity_curve, lower_bound_audit, maximize_on_grid, perfect_fidelity_check, propositive_check,
    time_grid, DirectWalk, SpectralWalk, PEAK_GRID_POINTS,
};

use crate::args::{Cli, Command, CommonArgs, MAX_GRID_POINTS};
use crate::error::{CliError, ExitCode};
use crate::format::{curve_csv, families_csv, sweep_csv};
use crate::report::{
    AuditBundle, CurveReport, InstanceReport, Payload, ReportEnvelope, Settings, SweepReport, TableReport,
};
use crate::spec_parse::{parse_family_spec, PartialSpec};

/// Dense audits (identities, Weyl, direct walk) run up to this dimension.
pub const DENSE_AUDIT_LIMIT: usize = 2048;
/// Grid used for the method-agreement and triangle audits.
pub const AUDIT_GRID_POINTS: usize = 100;
/// τ samples for the time lower bound.
pub const LOWER_BOUND_SAMPLES: usize = 50;

/// Audit flags that describe the instance rather than signal a failure.
const INFORMATIONAL_FLAGS: [&str; 1] = ["theta2_outside_support"];

/// Rendered artifacts of one command, not yet written anywhere.
#[derive(Debug)]
pub struct Outcome {
    pub envelope: ReportEnvelope,
    pub json: String,
    pub csv: Option<String>,
    pub exit: ExitCode,
    /// `families` prints CSV on stdout; every other command prints JSON.
    csv_primary: bool,
    output: Option<PathBuf>,
    csv_path: Option<PathBuf>,
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

impl Outcome {
    /// Writes the artifacts to their destinations.
    pub fn emit(&self) -> Result<(), CliError> {
        let stdout_io = |source| CliError::Io {
            path: "<stdout>".into(),
            source,
        };
        let mut stdout = std::io::stdout().lock();
        if self.csv_primary {
            let csv = self.csv.as_deref().unwrap_or_default();
            match &self.csv_path {
                Some(path) => write_file(path, csv)?,
                None => stdout.write_all(csv.as_bytes()).map_err(stdout_io)?,
            }
            if let Some(path) = &self.output {
                write_file(path, &self.json)?;
            }
            return Ok(());
        }
        match &self.output {
            Some(path) => write_file(path, &self.json)?,
            None => writeln!(stdout, "{}", self.json).map_err(stdout_io)?,
        }
        if let (Some(path), Some(csv)) = (&self.csv_path, &self.csv) {
            write_file(path, csv)?;
        }
        Ok(())
    }
}

fn settings(common: &CommonArgs) -> Settings {
    Settings {
        convention: common.convention.into(),
        gamma: common.gamma,
        cluster_tolerance: common.tolerance,
        size_cap: common.size_cap,
        seed: common.seed,
    }
}

fn sweep_options(common: &CommonArgs) -> SweepOptions {
    SweepOptions {
        convention: common.convention.into(),
        gamma: common.gamma,
        size_cap: common.size_cap,
        cluster_tolerance: common.tolerance,
        ..SweepOptions::default()
    }
}

fn partial_spec(text: &str, common: &CommonArgs) -> Result<PartialSpec, CliError> {
    let mut partial = parse_family_spec(text)?;
    for (key, value) in [("k", common.k), ("q", common.q)] {
        if value.is_some() && partial.fill(key, value).is_err() {
            return Err(CliError::Usage(format!("--{key} does not apply to {}", partial.family)));
        }
    }
    Ok(partial)
}

fn finish(
    command: &str,
    payload: Payload,
    csv: Option<String>,
    exit: ExitCode,
    common: &CommonArgs,
    csv_primary: bool,
) -> Result<Outcome, CliError> {
    let envelope = ReportEnvelope::new(command, payload);
    Ok(Outcome {
        json: envelope.to_json()?,
        envelope,
        csv,
        exit,
        csv_primary,
        output: common.output.clone(),
        csv_path: common.csv.clone(),
    })
}

pub fn execute(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Analyze { spec, vertex, common } => analyze(&spec, vertex, &common),
        Command::Simulate {
            spec,
            until_multiple,
            points,
            common,
        } => simulate(&spec, until_multiple, points, &common),
        Command::Sweep { spec, sizes, common } => sweep(&spec, &sizes, &common),
        Command::Families { spec, common } => families(spec.as_deref(), &common),
    }
}

/// Weyl audit of γH + ww† from spectra already computed.
fn weyl_from_tuplet(t: &Tuplet, dense: &PerturbedSpectrum) -> Option<spectral_search_core::perturb::WeylAudit> {
    let a: Vec<f64> = t.hamiltonian().eig().values().iter().map(|v| t.gamma() * v).collect();
    let mut b = vec![0.0; a.len()];
    b[0] = 1.0;
    let sum = dense.dense()?.eig().values().to_vec();
    weyl_audit_from_spectra(&a, &b, &sum).ok()
}

fn run_audits(
    t: &Tuplet,
    secular: &PerturbedSpectrum,
    gamma_rule: GammaRule,
    horizon: f64,
) -> Result<AuditBundle, CliError> {
    let top = spectral_search_core::perturb::find_top_two(t)?;
    let mut audits = AuditBundle {
        interlacing: Some(interlacing_check(t, &top)),
        variance: Some(variance_fact(t)?),
        constant_gap: Some(constant_gap_fact(t)?),
        propositive: Some(propositive_check(t, secular)?),
        ..AuditBundle::default()
    };
    let unit = t.hamiltonian().convention() == Convention::UnitInterval;
    if unit {
        audits.moment_monotonicity = Some(moment_monotonicity(t)?);
    } else {
        audits
            .skipped
            .push("moment monotonicity: needs the unit_interval convention".into());
    }
    if gamma_rule == GammaRule::S1 && t.eps()[0] <= 0.2 {
        audits.delta_bounds = Some(delta_bound_audit(t, &top)?);
    } else {
        audits.skipped.push("delta bounds: need γ = S₁ and ε₁ ≤ 0.2".into());
    }
    if t.is_compressed() || t.dim() > DENSE_AUDIT_LIMIT {
        audits.skipped.push(format!(
            "dense audits: only for uncompressed instances up to {DENSE_AUDIT_LIMIT} vertices"
        ));
        return Ok(audits);
    }
    let dense = full_perturbed_spectrum(t)?;
    audits.identities = Some(identity_audit(t, &dense)?);
    audits.weyl = weyl_from_tuplet(t, &dense);
    let direct = DirectWalk::from_spectrum(t, &dense)?;
    let spectral = SpectralWalk::new(t, secular)?;
    let bound = spectral.triangle_bound();
    let grid = time_grid(horizon, AUDIT_GRID_POINTS);
    let mut gap: f64 = 0.0;
    let mut slack = f64::INFINITY;
    for &time in &grid {
        let f = direct.fidelity(time);
        gap = gap.max((f - spectral.fidelity(time)).abs());
        slack = slack.min(bound - f);
    }
    audits.method_agreement = Some(gap);
    audits.triangle_slack = Some(slack);
    audits.lower_bound = Some(lower_bound_audit(t, &direct, &time_grid(horizon, LOWER_BOUND_SAMPLES))?);
    match perfect_fidelity_check(t, &dense) {
        Ok(report) => audits.perfect_fidelity = Some(report),
        Err(e) => audits.skipped.push(format!("perfect fidelity: {e}")),
    }
    Ok(audits)
}

fn audit_findings(audits: &AuditBundle, unit: bool) -> Vec<String> {
    let mut out = Vec::new();
    let mut flag = |failed: bool, name: &str| {
        if failed {
            out.push(name.to_string());
        }
    };
    flag(audits.identities.as_ref().is_some_and(|a| !a.passed), "identities");
    flag(audits.weyl.as_ref().is_some_and(|a| !a.passed), "weyl");
    flag(
        audits
            .interlacing
            .as_ref()
            .is_some_and(|c| c.strict_expected && !c.holds),
        "interlacing",
    );
    flag(
        audits.delta_bounds.as_ref().is_some_and(|a| unit && !a.passed),
        "delta_bounds",
    );
    flag(audits.variance.as_ref().is_some_and(|c| !c.holds), "variance_fact");
    flag(
        audits.constant_gap.as_ref().is_some_and(|c| unit && !c.holds),
        "constant_gap_fact",
    );
    flag(audits.moment_monotonicity == Some(false), "moment_monotonicity");
    flag(audits.lower_bound.as_ref().is_some_and(|a| !a.passed), "lower_bound");
    flag(
        audits.method_agreement.is_some_and(|g| !(g <= 1e-8)),
        "method_agreement",
    );
    flag(audits.triangle_slack.is_some_and(|s| !(s >= -1e-9)), "triangle_bound");
    flag(
        audits.propositive.as_ref().is_some_and(|p| p.holds == Some(false)),
        "propositive",
    );
    out
}

fn analyze(text: &str, vertex: usize, common: &CommonArgs) -> Result<Outcome, CliError> {
    let spec = partial_spec(text, common)?.resolve(None)?;
    let options = sweep_options(common);
    let t = instance_tuplet_at(&spec, &options, vertex)?;
    let metrics = analyze_tuplet(&t, &spec.to_string(), spec.size_param(), options.horizon_multiple)?;
    let secular = secular_spectrum(&t)?;
    let horizon = options.horizon_multiple * metrics.t_star;
    let audits = run_audits(&t, &secular, common.gamma, horizon)?;
    let findings = audit_findings(&audits, t.hamiltonian().convention() == Convention::UnitInterval);
    let exit = if findings.is_empty() {
        ExitCode::Success
    } else {
        ExitCode::AuditFindings
    };
    let payload = Payload::Instance(InstanceReport {
        family: spec.to_string(),
        spec,
        vertex,
        settings: settings(common),
        metrics,
        audits,
        findings,
    });
    finish("analyze", payload, None, exit, common, false)
}

fn simulate(text: &str, until_multiple: f64, points: usize, common: &CommonArgs) -> Result<Outcome, CliError> {
    if points > MAX_GRID_POINTS {
        return Err(CliError::Usage(format!(
            "grid of {points} points exceeds the limit of {MAX_GRID_POINTS}"
        )));
    }
    if points < 2 {
        return Err(CliError::Usage("a fidelity grid needs at least 2 points".into()));
    }
    if !(until_multiple > 0.0 && until_multiple.is_finite()) {
        return Err(CliError::Usage(format!(
            "--until-multiple must be positive, got {until_multiple}"
        )));
    }
    let spec = partial_spec(text, common)?.resolve(None)?;
    let options = SweepOptions {
        horizon_multiple: until_multiple.max(1.0),
        ..sweep_options(common)
    };
    let t = instance_tuplet_at(&spec, &options, 0)?;
    let secular = secular_spectrum(&t)?;
    let horizon = until_multiple * critical_time(&secular)?;
    let direct = if !t.is_compressed() && t.dim() <= DENSE_AUDIT_LIMIT {
        Some(DirectWalk::new(&t)?)
    } else {
        None
    };
    let times = time_grid(horizon, points);
    let curve = fidelity_curve(&t, &secular, direct.as_ref(), &times, options.horizon_multiple)?;
    let direct_at_star = direct.as_ref().map(|d| d.fidelity(curve.t_star));
    let csv = curve_csv(&curve, direct_at_star)?;
    let walk = SpectralWalk::new(&t, &secular)?;
    let peak = maximize_on_grid(|x| walk.fidelity(x), horizon, PEAK_GRID_POINTS);
    let max_gap = curve.max_method_gap();
    let exit = if max_gap.is_some_and(|g| !(g <= 1e-8)) {
        ExitCode::AuditFindings
    } else {
        ExitCode::Success
    };
    let payload = Payload::FidelityCurve(CurveReport {
        family: spec.to_string(),
        spec,
        settings: settings(common),
        gamma: t.gamma(),
        eps1: t.eps()[0],
        horizon,
        peak,
        max_method_gap: max_gap,
        curve,
    });
    finish("simulate", payload, Some(csv), exit, common, false)
}

fn sweep_fits(template: &FamilySpec, rows: &[spectral_search_core::classify::InstanceMetrics]) -> Vec<ScalingFit> {
    [
        (Quantity::Eps1, FitModel::PowerInN),
        (Quantity::Delta2, delta2_model(template.family())),
        (Quantity::S1, FitModel::PowerInN),
        (Quantity::S2, FitModel::PowerInN),
        (Quantity::MomentRatio, FitModel::PowerInN),
        (Quantity::AssumptionRatio, FitModel::PowerInN),
        (Quantity::TStarEps1, FitModel::PowerInN),
    ]
    .into_iter()
    .filter_map(|(q, m)| fit_scaling(rows, q, m).ok())
    .collect()
}

fn has_failing_flags(rows: &[spectral_search_core::classify::InstanceMetrics]) -> bool {
    rows.iter()
        .flat_map(|m| &m.audit_flags)
        .any(|f| !INFORMATIONAL_FLAGS.contains(&f.as_str()))
}

fn sweep(text: &str, sizes: &[usize], common: &CommonArgs) -> Result<Outcome, CliError> {
    let partial = partial_spec(text, common)?;
    let first = *sizes
        .first()
        .ok_or_else(|| CliError::Usage("--sizes is empty".into()))?;
    for &size in sizes {
        partial.resolve(Some(size))?;
    }
    let template = partial.resolve(Some(first))?;
    let options = sweep_options(common);
    let result = sweep_family(&template, sizes, &options);
    let v = verdict(&result, &VerdictOptions::default());
    let exit = if v.groverian == Groverian::Inconclusive || result.rows.len() < MIN_SWEEP_SIZES {
        ExitCode::Inconclusive
    } else if has_failing_flags(&result.rows) || !result.failures.is_empty() {
        ExitCode::AuditFindings
    } else {
        ExitCode::Success
    };
    let csv = sweep_csv(&result.rows)?;
    let payload = Payload::Sweep(SweepReport {
        family: template.family().to_string(),
        template,
        settings: settings(common),
        sizes: result.rows.iter().map(|m| m.size_param).collect(),
        fits: sweep_fits(&template, &result.rows),
        rows: result.rows,
        failures: result.failures,
        verdict: v,
    });
    finish("sweep", payload, Some(csv), exit, common, false)
}

fn families(filter: Option<&str>, common: &CommonArgs) -> Result<Outcome, CliError> {
    let mut suite = default_suite();
    if let Some(name) = filter {
        let family = parse_family_spec(name)?.family;
        suite.retain(|e| e.template.family() == family);
        if suite.is_empty() {
            return Err(CliError::Usage(format!(
                "{family} is not part of the default families table"
            )));
        }
    }
    let reports = table_report(&suite, &sweep_options(common), &VerdictOptions::default());
    let rows: Vec<_> = reports.iter().map(|r| r.row.clone()).collect();
    let csv = families_csv(&rows)?;
    let all_match = rows.iter().all(|r| r.expected.is_none_or(|e| e == r.verdict));
    let payload = Payload::FamiliesTable(TableReport {
        settings: settings(common),
        verdicts: reports.into_iter().map(|r| r.verdict).collect(),
        rows,
        all_match_expected: all_match,
    });
    finish("families", payload, Some(csv), ExitCode::Success, common, true)
}
