//! Spectrum of the search Hamiltonian H̃ = γH + ww†.
//!
//! Moved eigenvalues are the zeros of g(x) = 1 − Σ_r ε_r²/(x − γθ_r), one per
//! gap between consecutive support poles plus one above the top pole.

use std::sync::Arc;

use faer::linalg::solvers::Solve;
use ndarray::Array1;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::numkernel::{compensated_sum, hermitian_eig, to_faer, ComplexMatrix, C64};
use crate::spectra::{decompose, moment_sk, SpectralDecomposition, Tuplet};

pub const MAX_BISECTION_STEPS: usize = 200;
pub const ROOT_TOLERANCE: f64 = 1e-13;
pub const IDENTITY_TOLERANCE: f64 = 1e-7;

pub fn pole_guard(gamma: f64) -> f64 {
    1e-12 * gamma.max(1.0)
}

/// Poles γθ_r (descending) and weights ε_r² over the support.
#[derive(Clone, Debug)]
pub struct SecularFunction {
    gamma: f64,
    poles: Vec<f64>,
    weights: Vec<f64>,
    /// Index into the tuplet's distinct eigenvalues for each pole.
    source: Vec<usize>,
}

impl SecularFunction {
    pub fn new(t: &Tuplet) -> Self {
        let threshold = t.options().support_threshold;
        let gamma = t.gamma();
        let source: Vec<usize> = (0..t.d()).filter(|&r| t.eps()[r] > threshold).collect();
        Self {
            gamma,
            poles: source.iter().map(|&r| gamma * t.theta()[r]).collect(),
            weights: source.iter().map(|&r| t.eps()[r].powi(2)).collect(),
            source,
        }
    }

    pub fn poles(&self) -> &[f64] {
        &self.poles
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn support(&self) -> &[usize] {
        &self.source
    }

    fn value_unchecked(&self, x: f64) -> f64 {
        1.0 - compensated_sum(self.poles.iter().zip(&self.weights).map(|(p, w)| w / (x - p)))
    }

    /// g(x), refusing points within the pole guard.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let guard = pole_guard(self.gamma);
        if let Some(&pole) = self.poles.iter().find(|&&p| (x - p).abs() < guard) {
            return Err(LabError::PoleProximity {
                x,
                pole,
                distance: (x - pole).abs(),
            });
        }
        Ok(self.value_unchecked(x))
    }

    /// Σ ε_r²/(x − γθ_r)², the derivative g′(x) and the inverse overlap at a root.
    pub fn inverse_overlap(&self, x: f64) -> f64 {
        compensated_sum(self.poles.iter().zip(&self.weights).map(|(p, w)| w / (x - p).powi(2)))
    }

    /// Root in the open interval (lo, hi), given g < 0 just above lo and
    /// g > 0 just below hi. Endpoints themselves are not evaluated.
    fn bisect(&self, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..MAX_BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let g = self.value_unchecked(mid);
            if g == 0.0 {
                return mid;
            }
            if g < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mid = 0.5 * (lo + hi);
        if mid > lo && mid < hi {
            mid
        } else {
            // Adjacent floats; pick the interior side with the smaller residual.
            [lo, hi]
                .into_iter()
                .filter(|x| !self.poles.contains(x))
                .min_by(|a, b| {
                    self.value_unchecked(*a)
                        .abs()
                        .total_cmp(&self.value_unchecked(*b).abs())
                })
                .unwrap_or(hi)
        }
    }

    /// The root above the largest pole.
    pub fn top_root(&self, preferred_upper: Option<f64>) -> Result<f64> {
        let top = self.poles[0];
        // ‖ww†‖ = 1, so ζ₁ ≤ γ + 1 by Weyl.
        let weyl = top + 1.0 + pole_guard(self.gamma);
        let candidates = preferred_upper.into_iter().chain([weyl, top + 2.0]);
        for hi in candidates {
            if hi > top && self.value_unchecked(hi) >= 0.0 {
                if self.value_unchecked(hi) == 0.0 {
                    return Ok(hi);
                }
                return Ok(self.bisect(top, hi));
            }
        }
        Err(LabError::BracketFailure {
            lo: top,
            hi: weyl,
            g_lo: f64::NEG_INFINITY,
            g_hi: self.value_unchecked(weyl),
        })
    }

    /// Every moved root, descending.
    pub fn roots(&self) -> Result<Vec<f64>> {
        let mut roots = vec![self.top_root(None)?];
        for pair in self.poles.windows(2) {
            roots.push(self.bisect(pair[1], pair[0]));
        }
        Ok(roots)
    }
}

/// g(x) for the tuplet.
pub fn secular_eval(t: &Tuplet, x: f64) -> Result<f64> {
    SecularFunction::new(t).eval(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMethod {
    TopTwo,
    Secular,
    Dense,
}

/// Eigenvalues ζ_p of H̃ (distinct, descending) with overlaps ‖F_p w‖².
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PerturbedSpectrum {
    pub gamma: f64,
    pub method: SpectrumMethod,
    pub zeta: Vec<f64>,
    pub overlaps: Vec<f64>,
    pub multiplicities: Vec<usize>,
    /// ζ₁ − γ.
    pub delta_plus: f64,
    /// ζ₂ − γ, negative.
    pub delta_minus: f64,
    /// Whether θ₂ ∈ Supp, making γθ₂ < ζ₂ strict.
    pub strict_bracket: bool,
    #[serde(skip)]
    dense: Option<SpectralDecomposition>,
}

impl PerturbedSpectrum {
    pub fn zeta1(&self) -> f64 {
        self.zeta[0]
    }

    pub fn zeta2(&self) -> f64 {
        self.zeta[1]
    }

    pub fn overlap_sum(&self) -> f64 {
        compensated_sum(self.overlaps.iter().copied())
    }

    /// Eigenvectors of H̃ clustered by ζ, available for the dense method.
    pub fn dense(&self) -> Option<&SpectralDecomposition> {
        self.dense.as_ref()
    }

    /// F_p w, from dense eigenvectors.
    pub fn projected_target(&self, t: &Tuplet, p: usize) -> Option<Array1<C64>> {
        self.dense.as_ref().map(|d| d.projector(p).apply(t.w()))
    }

    /// Principal perturbed eigenvector y₁ (dense method, ζ₁ simple).
    pub fn principal_vector(&self) -> Result<Array1<C64>> {
        let d = self
            .dense
            .as_ref()
            .ok_or_else(|| LabError::Precondition("principal eigenvector needs the dense spectrum".into()))?;
        if d.multiplicities()[0] != 1 {
            return Err(LabError::DegenerateGap(0.0));
        }
        Ok(d.projector(0).basis().column(0).to_owned())
    }
}

/// ζ₂ is the larger of the second moved root and the possibly unmoved γθ₂.
fn second_eigenvalue(t: &Tuplet, secular: &SecularFunction, moved_second: Option<f64>) -> (f64, bool) {
    let gamma = t.gamma();
    let theta2 = t.theta().get(1).map(|&x| gamma * x);
    let strict = secular.support().get(1) == Some(&1);
    let zeta2 = match (moved_second, theta2) {
        (Some(z), Some(p)) => z.max(p),
        (Some(z), None) => z,
        (None, Some(p)) => p,
        (None, None) => f64::NEG_INFINITY,
    };
    (zeta2, strict)
}

/// β₊ = (ε₁² + √(ε₁⁴ + 4γε₁²))/2.
pub fn beta_plus(eps1: f64, s1: f64) -> f64 {
    let e2 = eps1 * eps1;
    0.5 * (e2 + (e2 * e2 + 4.0 * s1 * e2).sqrt())
}

/// β₋ = (−ε₁² + √(ε₁⁴ + 4γε₁²))/2.
pub fn beta_minus(eps1: f64, s1: f64) -> f64 {
    let e2 = eps1 * eps1;
    0.5 * (-e2 + (e2 * e2 + 4.0 * s1 * e2).sqrt())
}

/// ζ₁ and ζ₂ by bisection of the secular function.
pub fn find_top_two(t: &Tuplet) -> Result<PerturbedSpectrum> {
    if t.d() < 2 {
        return Err(LabError::Domain("H has a single eigenvalue; ζ₂ is undefined".into()));
    }
    let secular = SecularFunction::new(t);
    let gamma = t.gamma();
    let beta = beta_plus(t.eps()[0], gamma);
    let zeta1 = secular.top_root(Some(gamma + beta + pole_guard(gamma)))?;
    let moved_second = (secular.poles().len() >= 2).then(|| secular.bisect(secular.poles()[1], secular.poles()[0]));
    let (zeta2, strict) = second_eigenvalue(t, &secular, moved_second);
    let o1 = 1.0 / secular.inverse_overlap(zeta1);
    let o2 = match moved_second {
        Some(z) if z >= zeta2 => 1.0 / secular.inverse_overlap(z),
        _ => 0.0,
    };
    Ok(PerturbedSpectrum {
        gamma,
        method: SpectrumMethod::TopTwo,
        zeta: vec![zeta1, zeta2],
        overlaps: vec![o1, o2],
        multiplicities: vec![1, 1],
        delta_plus: zeta1 - gamma,
        delta_minus: zeta2 - gamma,
        strict_bracket: strict,
        dense: None,
    })
}

/// Full spectrum from the secular roots plus the unmoved eigenvalues γθ_r,
/// overlaps from 1/‖F_p w‖² = Σ ε_r²/(ζ_p − γθ_r)².
pub fn secular_spectrum(t: &Tuplet) -> Result<PerturbedSpectrum> {
    let secular = SecularFunction::new(t);
    let gamma = t.gamma();
    let roots = secular.roots()?;
    let mults = t.decomposition().multiplicities();
    let mut entries: Vec<(f64, f64, usize)> = roots
        .iter()
        .map(|&z| (z, 1.0 / secular.inverse_overlap(z), 1))
        .collect();
    for r in 0..t.d() {
        let remaining = if secular.support().contains(&r) {
            mults[r] - 1
        } else {
            mults[r]
        };
        if remaining > 0 {
            entries.push((gamma * t.theta()[r], 0.0, remaining));
        }
    }
    entries.sort_by(|a, b| b.0.total_cmp(&a.0));
    let strict = secular.support().get(1) == Some(&1);
    let zeta2 = entries.get(1).map_or(f64::NEG_INFINITY, |e| e.0);
    Ok(PerturbedSpectrum {
        gamma,
        method: SpectrumMethod::Secular,
        delta_plus: entries[0].0 - gamma,
        delta_minus: zeta2 - gamma,
        zeta: entries.iter().map(|e| e.0).collect(),
        overlaps: entries.iter().map(|e| e.1).collect(),
        multiplicities: entries.iter().map(|e| e.2).collect(),
        strict_bracket: strict,
        dense: None,
    })
}

/// H̃ = γH + ww†.
pub fn search_hamiltonian(t: &Tuplet) -> Result<ComplexMatrix> {
    t.hamiltonian()
        .matrix()
        .scaled(t.gamma())
        .add(&ComplexMatrix::outer(t.w())?)
}

/// Dense eigendecomposition of H̃ clustered with the tuplet's tolerance.
pub fn full_perturbed_spectrum(t: &Tuplet) -> Result<PerturbedSpectrum> {
    let eig = hermitian_eig(&search_hamiltonian(t)?)?;
    let decomp = decompose(Arc::new(eig), t.options().cluster_tolerance);
    let overlaps: Vec<f64> = (0..decomp.d())
        .map(|p| decomp.projector(p).image_norm(t.w()).powi(2))
        .collect();
    let zeta = decomp.theta().to_vec();
    let gamma = t.gamma();
    let strict = t.eps().get(1).is_some_and(|&e| e > t.options().support_threshold);
    let zeta2 = zeta.get(1).copied().unwrap_or(f64::NEG_INFINITY);
    Ok(PerturbedSpectrum {
        gamma,
        method: SpectrumMethod::Dense,
        delta_plus: zeta[0] - gamma,
        delta_minus: zeta2 - gamma,
        multiplicities: decomp.multiplicities(),
        zeta,
        overlaps,
        strict_bracket: strict,
        dense: Some(decomp),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AuditFinding {
    pub name: String,
    pub index: Option<usize>,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub skipped: Option<String>,
}

impl AuditFinding {
    fn residual(name: &str, index: Option<usize>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            index,
            value,
            tolerance,
            passed: value.is_finite() && value <= tolerance,
            skipped: None,
        }
    }

    fn skip(name: &str, index: Option<usize>, reason: String) -> Self {
        Self {
            name: name.into(),
            index,
            value: f64::NAN,
            tolerance: f64::NAN,
            passed: true,
            skipped: Some(reason),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AuditReport {
    pub name: String,
    pub passed: bool,
    /// Largest residual, or smallest slack for inequality audits.
    pub worst: f64,
    pub findings: Vec<AuditFinding>,
}

impl AuditReport {
    fn from_residuals(name: &str, findings: Vec<AuditFinding>) -> Self {
        let worst = findings
            .iter()
            .filter(|f| f.skipped.is_none())
            .map(|f| f.value)
            .fold(0.0f64, |a, b| if b.is_nan() { f64::NAN } else { a.max(b) });
        Self {
            name: name.into(),
            passed: findings.iter().all(|f| f.passed),
            worst,
            findings,
        }
    }

    pub fn skipped(&self) -> usize {
        self.findings.iter().filter(|f| f.skipped.is_some()).count()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct WeylAudit {
    pub checked: usize,
    pub violations: usize,
    pub worst_slack: f64,
    pub passed: bool,
}

/// Both Weyl inequality families for descending spectra of A, B and A + B.
pub fn weyl_audit_from_spectra(a: &[f64], b: &[f64], sum: &[f64]) -> Result<WeylAudit> {
    let n = a.len();
    if b.len() != n || sum.len() != n {
        return Err(LabError::Shape("spectra of different lengths".into()));
    }
    let mut checked = 0;
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    let mut record = |slack: f64| {
        checked += 1;
        if slack < -1e-9 {
            violations += 1;
        }
        worst = worst.min(slack);
    };
    // 0-based: λ_i(A+B) ≤ λ_{i−j}(A) + λ_j(B) and λ_{i+j}(A) + λ_{n−1−j}(B) ≤ λ_i(A+B).
    for i in 0..n {
        for j in 0..=i {
            record(a[i - j] + b[j] - sum[i]);
        }
        for j in 0..n - i {
            record(sum[i] - a[i + j] - b[n - 1 - j]);
        }
    }
    Ok(WeylAudit {
        checked,
        violations,
        worst_slack: worst,
        passed: violations == 0,
    })
}

pub fn weyl_audit(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<WeylAudit> {
    let sum = a.add(b)?;
    weyl_audit_from_spectra(
        hermitian_eig(a)?.values(),
        hermitian_eig(b)?.values(),
        hermitian_eig(&sum)?.values(),
    )
}

/// Residuals of the exact identities linking ζ_p, ‖F_p w‖² and the shadows.
///
/// Clusters sitting on a support pole (unmoved eigenvalues, within the
/// cluster tolerance) are skipped for the unity identities, whose terms are
/// singular there.
pub fn identity_audit(t: &Tuplet, spec: &PerturbedSpectrum) -> Result<AuditReport> {
    let dense = spec
        .dense()
        .ok_or_else(|| LabError::Precondition("identity audit needs the dense perturbed spectrum".into()))?;
    let gamma = t.gamma();
    if spec.zeta.iter().any(|z| (z - gamma).abs() < pole_guard(gamma)) {
        return Err(LabError::Precondition("some ζ_p coincides with γ".into()));
    }
    let secular = SecularFunction::new(t);
    let near = t.options().cluster_tolerance * gamma.max(1.0);
    let eps1 = t.eps()[0];
    let e1w = t.principal_component();
    let v1 = t.decomposition().projector(0);
    let tol = IDENTITY_TOLERANCE;
    let mut findings = Vec::new();
    let mut signed = Vec::with_capacity(spec.zeta.len());

    for (p, (&zeta, &overlap)) in spec.zeta.iter().zip(&spec.overlaps).enumerate() {
        let shift = zeta - gamma;
        signed.push(overlap / shift);
        // Unmoved eigenvalues sit on some γθ_r, in or out of the support.
        let on_pole = t
            .theta()
            .iter()
            .map(|th| gamma * th)
            .find(|pole| (zeta - pole).abs() <= near);
        if let Some(pole) = on_pole {
            let reason = format!("ζ_{} = {zeta:.12} lies on the pole {pole:.12}", p + 1);
            findings.push(AuditFinding::skip("another_unity", Some(p), reason.clone()));
            findings.push(AuditFinding::skip("unity", Some(p), reason));
        } else {
            let inv = secular.inverse_overlap(zeta);
            let lhs = 1.0 / overlap;
            findings.push(AuditFinding::residual(
                "another_unity",
                Some(p),
                (lhs - inv).abs() / lhs.abs().max(inv.abs()),
                tol,
            ));
            let terms: Vec<f64> = secular
                .poles()
                .iter()
                .zip(secular.weights())
                .map(|(pole, w)| w / (zeta - pole))
                .collect();
            let sum = compensated_sum(terms.iter().copied());
            // Relative to the absolute term mass: near a pole the sum cancels
            // and a root error δζ shows up amplified by 1/‖F_p w‖².
            let mass = terms.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
            findings.push(AuditFinding::residual("unity", Some(p), (sum - 1.0).abs() / mass, tol));
        }

        let fpw = dense.projector(p).apply(t.w());
        let lhs = v1.apply(fpw.view());
        let scale = overlap / shift;
        let defect = lhs
            .iter()
            .zip(&e1w)
            .map(|(a, b)| (a - b * scale).norm_sqr())
            .sum::<f64>()
            .sqrt();
        findings.push(AuditFinding::residual("substitute", Some(p), defect / eps1, tol));

        let trace_fe1 = dense
            .projector(p)
            .coordinates(v1.basis().column(0))
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>();
        let flip = (eps1 * eps1 * overlap - shift * shift * trace_fe1).abs();
        findings.push(AuditFinding::residual("flip_trick", Some(p), flip / (eps1 * eps1), tol));
    }

    let total = compensated_sum(signed);
    findings.push(AuditFinding::residual(
        "signed_unity",
        None,
        (total.abs() - 1.0).abs(),
        tol,
    ));
    Ok(AuditReport::from_residuals("identities", findings))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DeltaBoundAudit {
    pub eps1: f64,
    pub s1: f64,
    pub gamma: f64,
    pub delta_plus: f64,
    pub delta_minus: f64,
    pub beta_plus: f64,
    pub beta_minus: f64,
    /// δ₊/(√S₁ ε₁).
    pub plus_ratio: f64,
    /// |δ₋|/(√S₁ ε₁).
    pub minus_ratio: f64,
    pub lower_holds: bool,
    pub upper_holds: Option<bool>,
    pub minus_holds: Option<bool>,
    pub strict_bracket: bool,
    pub preconditions: Vec<String>,
    pub passed: bool,
}

/// ε₁² < δ₊ ≤ β₊ and 0 < −δ₋ ≤ β₋ at γ = S₁.
///
/// The upper bounds use Δ_r ≤ 1 and are only asserted on unit-interval
/// Hamiltonians. Precondition failures are recorded, not raised.
pub fn delta_bound_audit(t: &Tuplet, spec: &PerturbedSpectrum) -> Result<DeltaBoundAudit> {
    let s1 = moment_sk(t, 1)?;
    let eps1 = t.eps()[0];
    let gamma = t.gamma();
    let mut preconditions = Vec::new();
    if (gamma - s1).abs() > 1e-9 * s1.max(1.0) {
        preconditions.push(format!("γ = {gamma} differs from S₁ = {s1}"));
    }
    if eps1 > 0.2 {
        preconditions.push(format!("ε₁ = {eps1:.4} exceeds 0.2"));
    }
    let unit = t.hamiltonian().convention() == crate::graphs::Convention::UnitInterval;
    if !unit {
        preconditions.push("symmetric-interval Hamiltonian: β bounds not asserted".into());
    }
    let slack = pole_guard(gamma);
    let bp = beta_plus(eps1, s1);
    let bm = beta_minus(eps1, s1);
    let dp = spec.delta_plus;
    let dm = spec.delta_minus;
    let lower_holds = dp > eps1 * eps1;
    let upper_holds = unit.then_some(dp <= bp + slack);
    let minus_holds = (unit && spec.strict_bracket).then_some(-dm > 0.0 && -dm <= bm + slack);
    if !spec.strict_bracket {
        preconditions.push("θ₂ not in the support: ζ₂ bound not strict".into());
    }
    let gated = preconditions
        .iter()
        .any(|p| !p.starts_with("θ₂") && !p.starts_with("symmetric"));
    let passed = lower_holds && upper_holds.unwrap_or(true) && minus_holds.unwrap_or(true);
    let scale = s1.sqrt() * eps1;
    Ok(DeltaBoundAudit {
        eps1,
        s1,
        gamma,
        delta_plus: dp,
        delta_minus: dm,
        beta_plus: bp,
        beta_minus: bm,
        plus_ratio: dp / scale,
        minus_ratio: -dm / scale,
        lower_holds,
        upper_holds,
        minus_holds,
        strict_bracket: spec.strict_bracket,
        passed: passed && !gated,
        preconditions,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InterlacingCheck {
    pub strict_expected: bool,
    /// min(ζ₁ − γ, γ − ζ₂, ζ₂ − γθ₂).
    pub margin: f64,
    pub holds: bool,
}

/// γθ₂ < ζ₂ < γ < ζ₁ (the first inequality non-strict when θ₂ ∉ Supp).
pub fn interlacing_check(t: &Tuplet, spec: &PerturbedSpectrum) -> InterlacingCheck {
    let gamma = t.gamma();
    let g2 = gamma * t.theta().get(1).copied().unwrap_or(f64::NEG_INFINITY);
    let margin = (spec.zeta1() - gamma).min(gamma - spec.zeta2()).min(spec.zeta2() - g2);
    let holds = if spec.strict_bracket {
        margin > 0.0
    } else {
        spec.zeta1() > gamma && spec.zeta2() < gamma && spec.zeta2() >= g2
    };
    InterlacingCheck {
        strict_expected: spec.strict_bracket,
        margin,
        holds,
    }
}

/// |det(A + xy†) − det(A)(1 + y†A⁻¹x)| / |det(A + xy†)|.
pub fn rank_one_determinant_residual(a: &ndarray::Array2<C64>, x: &Array1<C64>, y: &Array1<C64>) -> Result<f64> {
    let n = a.nrows();
    let mut updated = a.clone();
    for i in 0..n {
        for j in 0..n {
            updated[[i, j]] += x[i] * y[j].conj();
        }
    }
    let base = to_faer(a);
    let lhs = to_faer(&updated).determinant();
    let solved = base.partial_piv_lu().solve(faer::Mat::from_fn(n, 1, |i, _| x[i]));
    let quad: C64 = (0..n).map(|i| y[i].conj() * solved[(i, 0)]).sum();
    let rhs = base.determinant() * (C64::new(1.0, 0.0) + quad);
    Ok((lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(f64::MIN_POSITIVE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{normalize_adjacency, Convention, FamilySpec, DEFAULT_SIZE_CAP};
    use crate::spectra::TupletOptions;
    use approx::assert_abs_diff_eq;

    fn vertex_tuplet(spec: FamilySpec, gamma: Option<f64>) -> Tuplet {
        let g = spec.build(DEFAULT_SIZE_CAP).unwrap();
        let h = Arc::new(normalize_adjacency(&g, Convention::UnitInterval).unwrap());
        let t = Tuplet::vertex(h, 0, 1.0).unwrap();
        let gamma = gamma.unwrap_or_else(|| moment_sk(&t, 1).unwrap());
        t.with_gamma(gamma).unwrap()
    }

    fn two_level() -> Tuplet {
        let s = 0.5f64.sqrt();
        Tuplet::compressed(
            &[1.0, 0.0],
            &[s, s],
            1.0,
            2,
            Convention::UnitInterval,
            TupletOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn secular_limits_and_poles() {
        let t = vertex_tuplet(FamilySpec::Complete { n: 8 }, Some(0.5));
        assert!((secular_eval(&t, 1e9).unwrap() - 1.0).abs() < 1e-8);
        assert!(secular_eval(&t, 0.5 + 1e-6).unwrap() < -1e3);
        assert!(matches!(secular_eval(&t, 0.5), Err(LabError::PoleProximity { .. })));
    }

    #[test]
    fn two_level_roots_match_determinant() {
        // det(xI − H̃) with H̃ = [[3/2, 1/2], [1/2, 1/2]] is x² − 2x + 1/2.
        let t = two_level();
        let spec = find_top_two(&t).unwrap();
        let r = 0.5f64.sqrt();
        assert_abs_diff_eq!(spec.zeta1(), 1.0 + r, epsilon = 1e-13);
        assert_abs_diff_eq!(spec.zeta2(), 1.0 - r, epsilon = 1e-13);
        let h = search_hamiltonian(&t).unwrap();
        let tr = h.trace().re;
        let det = (h.get(0, 0) * h.get(1, 1) - h.get(0, 1) * h.get(1, 0)).re;
        let disc = (tr * tr - 4.0 * det).sqrt();
        assert_abs_diff_eq!(spec.zeta1(), (tr + disc) / 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(spec.zeta2(), (tr - disc) / 2.0, epsilon = 1e-13);
        assert!(secular_eval(&t, spec.zeta1()).unwrap().abs() <= 1e-10);
        let dense = full_perturbed_spectrum(&t).unwrap();
        let audit = identity_audit(&t, &dense).unwrap();
        assert!(audit.passed, "{audit:?}");
        assert_abs_diff_eq!(critical_gap(&spec), 2.0 * r, epsilon = 1e-13);
    }

    fn critical_gap(spec: &PerturbedSpectrum) -> f64 {
        spec.zeta1() - spec.zeta2()
    }

    #[test]
    fn clique_delta_bounds() {
        let t = vertex_tuplet(FamilySpec::Complete { n: 64 }, None);
        let top = find_top_two(&t).unwrap();
        let dense = full_perturbed_spectrum(&t).unwrap();
        assert_abs_diff_eq!(top.zeta1(), dense.zeta1(), epsilon = 1e-9);
        assert_abs_diff_eq!(top.zeta2(), dense.zeta2(), epsilon = 1e-9);
        let audit = delta_bound_audit(&t, &top).unwrap();
        assert!(audit.passed, "{audit:?}");
        assert!(audit.plus_ratio > 0.0 && audit.plus_ratio <= 1.01);
        assert!(secular_eval(&t, top.zeta1()).unwrap().abs() <= 1e-10);
        assert!(secular_eval(&t, top.zeta2()).unwrap().abs() <= 1e-10);
        assert!(interlacing_check(&t, &top).holds);
    }

    #[test]
    fn principal_target_block_diagonalizes() {
        let g = FamilySpec::Cycle { n: 9 }.build(DEFAULT_SIZE_CAP).unwrap();
        let h = Arc::new(normalize_adjacency(&g, Convention::UnitInterval).unwrap());
        let w = h.eig().vector(0).to_owned();
        let gamma = 0.7;
        let t = Tuplet::new(Arc::clone(&h), w, gamma).unwrap();
        let spec = find_top_two(&t).unwrap();
        assert_abs_diff_eq!(spec.zeta1(), gamma + 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(spec.zeta2(), gamma * t.theta()[1], epsilon = 1e-15);
        assert!(!spec.strict_bracket);
        assert!(interlacing_check(&t, &spec).holds);
    }

    #[test]
    fn dense_and_secular_spectra_agree() {
        for spec in [
            FamilySpec::Cycle { n: 12 },
            FamilySpec::Hamming { n: 5, q: 2 },
            FamilySpec::CycleInverseMatching { p: 23 },
        ] {
            let t = vertex_tuplet(spec, None);
            let dense = full_perturbed_spectrum(&t).unwrap();
            let sec = secular_spectrum(&t).unwrap();
            assert_eq!(dense.zeta.len(), sec.zeta.len(), "{spec}");
            assert_eq!(dense.multiplicities, sec.multiplicities, "{spec}");
            for (a, b) in dense.zeta.iter().zip(&sec.zeta) {
                assert!((a - b).abs() <= 1e-9 * t.gamma().max(1.0), "{spec}: {a} vs {b}");
            }
            for (a, b) in dense.overlaps.iter().zip(&sec.overlaps) {
                assert!((a - b).abs() <= 1e-9, "{spec}: {a} vs {b}");
            }
            assert_abs_diff_eq!(dense.overlap_sum(), 1.0, epsilon = 1e-9);
            assert_abs_diff_eq!(sec.overlap_sum(), 1.0, epsilon = 1e-9);
            let audit = identity_audit(&t, &dense).unwrap();
            assert!(audit.passed, "{spec}: {audit:?}");
        }
    }

    #[test]
    fn clique_identities() {
        let t = vertex_tuplet(FamilySpec::Complete { n: 32 }, None);
        let dense = full_perturbed_spectrum(&t).unwrap();
        let audit = identity_audit(&t, &dense).unwrap();
        assert!(audit.passed);
        assert!(audit.worst <= 1e-8, "{}", audit.worst);
        // One unmoved cluster at γθ₂ with multiplicity n − 2.
        assert_eq!(dense.multiplicities, vec![1, 1, 30]);
        assert_eq!(audit.skipped(), 2);
    }

    #[test]
    fn weyl_examples() {
        let h = search_hamiltonian(&vertex_tuplet(FamilySpec::Cycle { n: 10 }, None)).unwrap();
        let zero = ComplexMatrix::zeros(10);
        let audit = weyl_audit(&h, &zero).unwrap();
        assert!(audit.passed);
        assert!(audit.worst_slack.abs() < 1e-12);
        let a = ComplexMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let b = ComplexMatrix::diagonal(&[0.0, 1.0]).unwrap();
        let audit = weyl_audit(&a, &b).unwrap();
        assert!(audit.passed);
        assert_eq!(audit.worst_slack, 0.0);
        assert!(
            !weyl_audit_from_spectra(&[1.0, 0.0], &[0.0, 0.0], &[3.0, 0.0])
                .unwrap()
                .passed
        );
    }

    #[test]
    fn determinant_lemma_example() {
        let a = ndarray::array![
            [C64::new(2.0, 0.0), C64::new(0.5, 1.0)],
            [C64::new(-1.0, 0.0), C64::new(3.0, -0.5)]
        ];
        let x = Array1::from(vec![C64::new(1.0, 2.0), C64::new(0.0, -1.0)]);
        let y = Array1::from(vec![C64::new(0.3, 0.0), C64::new(-0.7, 0.4)]);
        assert!(rank_one_determinant_residual(&a, &x, &y).unwrap() < 1e-12);
    }

    #[test]
    fn non_support_second_eigenvalue() {
        // ε₂ = 0 and the moved root lies below γθ₂, so ζ₂ = γθ₂.
        let h = ComplexMatrix::diagonal(&[1.0, 0.6, 0.2]).unwrap();
        let h = Arc::new(crate::graphs::NormalizedHamiltonian::from_matrix(h, Convention::UnitInterval).unwrap());
        let w = Array1::from(vec![
            C64::new(0.95, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0975f64.sqrt(), 0.0),
        ]);
        let t = Tuplet::new(h, w, 0.5).unwrap();
        let spec = find_top_two(&t).unwrap();
        assert!(!spec.strict_bracket);
        assert_eq!(spec.zeta2(), 0.5 * 0.6);
        assert!(interlacing_check(&t, &spec).holds);
        let dense = full_perturbed_spectrum(&t).unwrap();
        assert!(!dense.strict_bracket);
        assert_abs_diff_eq!(dense.zeta2(), 0.3, epsilon = 1e-12);
    }
}
