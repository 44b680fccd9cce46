//! Distinct eigenspaces, search tuplets and the spectral parameters built on
//! them: shadows ε_r = ‖E_r w‖, gaps Δ_r = θ₁ − θ_r and moments S_k.

use std::ops::Range;
use std::sync::Arc;

use ndarray::{Array1, ArrayView1, ArrayView2};
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::graphs::{ClosedFormProfile, Convention, NormalizedHamiltonian};
use crate::numkernel::{compensated_sum, ComplexMatrix, EigenSystem, C64};

pub const DEFAULT_CLUSTER_TOLERANCE: f64 = 1e-7;
pub const DEFAULT_SUPPORT_THRESHOLD: f64 = 1e-10;

/// Eigenvalues grouped into distinct clusters θ_1 > θ_2 > … > θ_d.
///
/// Projectors are not stored densely: E_r = V_r V_r† where V_r is the block of
/// eigenvector columns in `ranges[r]` of the shared eigensystem.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eig: Arc<EigenSystem>,
    theta: Vec<f64>,
    ranges: Vec<Range<usize>>,
    cluster_tolerance: f64,
    ambiguous: bool,
}

/// Single-link clustering of a descending sequence.
pub(crate) fn cluster_ranges(values: &[f64], tol: f64) -> (Vec<Range<usize>>, bool) {
    let mut ranges = Vec::new();
    let mut ambiguous = false;
    let mut start = 0;
    for i in 1..=values.len() {
        let split = i == values.len() || {
            let gap = values[i - 1] - values[i];
            if gap >= 0.1 * tol && gap <= tol {
                ambiguous = true;
            }
            gap > tol
        };
        if split {
            if values[start] - values[i - 1] > tol {
                ambiguous = true;
            }
            ranges.push(start..i);
            start = i;
        }
    }
    (ranges, ambiguous)
}

/// Clusters eigenvalues whose consecutive gaps are at most `cluster_tolerance`.
pub fn decompose(eig: Arc<EigenSystem>, cluster_tolerance: f64) -> SpectralDecomposition {
    let (ranges, ambiguous) = cluster_ranges(eig.values(), cluster_tolerance);
    let theta = ranges
        .iter()
        .map(|r| eig.values()[r.clone()].iter().sum::<f64>() / r.len() as f64)
        .collect();
    SpectralDecomposition {
        eig,
        theta,
        ranges,
        cluster_tolerance,
        ambiguous,
    }
}

impl SpectralDecomposition {
    /// Number of distinct eigenvalues.
    pub fn d(&self) -> usize {
        self.theta.len()
    }

    pub fn dim(&self) -> usize {
        self.eig.dim()
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.ranges.iter().map(|r| r.len()).collect()
    }

    pub fn cluster_tolerance(&self) -> f64 {
        self.cluster_tolerance
    }

    /// Set when some gap falls in [0.1·tol, tol] or a cluster spreads beyond tol.
    pub fn is_ambiguous(&self) -> bool {
        self.ambiguous
    }

    pub fn eig(&self) -> &Arc<EigenSystem> {
        &self.eig
    }

    pub fn projector(&self, r: usize) -> Projector<'_> {
        let range = self.ranges[r].clone();
        Projector {
            block: self.eig.block(range.start, range.end),
        }
    }

    /// ‖Σ_r E_r − I‖_F.
    pub fn resolution_defect(&self) -> f64 {
        let n = self.dim();
        let mut sum = ComplexMatrix::zeros(n);
        for r in 0..self.d() {
            sum = sum.add(&self.projector(r).to_matrix()).expect("same dimension");
        }
        crate::numkernel::frobenius_norm(&sum.sub(&ComplexMatrix::identity(n)).expect("same dimension"))
    }

    /// max over (r, s) of ‖E_r E_s − δ_rs E_r‖_F.
    pub fn orthogonality_defect(&self) -> f64 {
        let mats: Vec<ComplexMatrix> = (0..self.d()).map(|r| self.projector(r).to_matrix()).collect();
        let mut worst = 0.0f64;
        for (r, a) in mats.iter().enumerate() {
            for (s, b) in mats.iter().enumerate() {
                let prod = a.matmul(b).expect("same dimension");
                let target = if r == s {
                    a.clone()
                } else {
                    ComplexMatrix::zeros(a.dim())
                };
                worst = worst.max(crate::numkernel::frobenius_norm(
                    &prod.sub(&target).expect("same dimension"),
                ));
            }
        }
        worst
    }
}

/// E = V V† for an orthonormal block V.
#[derive(Clone, Copy, Debug)]
pub struct Projector<'a> {
    block: ArrayView2<'a, C64>,
}

impl<'a> Projector<'a> {
    pub fn rank(&self) -> usize {
        self.block.ncols()
    }

    pub fn basis(&self) -> ArrayView2<'a, C64> {
        self.block
    }

    /// V† v, the coordinates of E v in the block basis.
    pub fn coordinates(&self, v: ArrayView1<C64>) -> Array1<C64> {
        self.block.t().mapv(|z| z.conj()).dot(&v)
    }

    pub fn apply(&self, v: ArrayView1<C64>) -> Array1<C64> {
        self.block.dot(&self.coordinates(v))
    }

    /// ‖E v‖.
    pub fn image_norm(&self, v: ArrayView1<C64>) -> f64 {
        self.coordinates(v).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        self.block.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let data = self.block.dot(&self.block.t().mapv(|z| z.conj()));
        ComplexMatrix::from_array(data).expect("square block product")
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TupletOptions {
    pub cluster_tolerance: f64,
    pub support_threshold: f64,
}

impl Default for TupletOptions {
    fn default() -> Self {
        Self {
            cluster_tolerance: DEFAULT_CLUSTER_TOLERANCE,
            support_threshold: DEFAULT_SUPPORT_THRESHOLD,
        }
    }
}

/// The search triple (H, w, γ) with cached shadows.
///
/// A compressed tuplet lives on the invariant subspace span{E_r w}: its
/// Hamiltonian is diag(θ_r) over the support and its target is (ε_r). Every
/// quantity computed downstream is identical to the full-space one, while
/// `ambient_dim` keeps the original vertex count.
#[derive(Clone, Debug)]
pub struct Tuplet {
    hamiltonian: Arc<NormalizedHamiltonian>,
    decomp: SpectralDecomposition,
    w: Array1<C64>,
    gamma: f64,
    eps: Vec<f64>,
    options: TupletOptions,
    ambient_dim: usize,
    compressed: bool,
}

impl Tuplet {
    pub fn new(hamiltonian: Arc<NormalizedHamiltonian>, w: Array1<C64>, gamma: f64) -> Result<Self> {
        Self::with_options(hamiltonian, w, gamma, TupletOptions::default())
    }

    pub fn with_options(
        hamiltonian: Arc<NormalizedHamiltonian>,
        w: Array1<C64>,
        gamma: f64,
        options: TupletOptions,
    ) -> Result<Self> {
        let decomp = decompose(Arc::clone(hamiltonian.eig()), options.cluster_tolerance);
        let ambient_dim = hamiltonian.dim();
        Self::assemble(hamiltonian, decomp, w, gamma, options, ambient_dim, false)
    }

    /// Target = indicator of `vertex`.
    pub fn vertex(hamiltonian: Arc<NormalizedHamiltonian>, vertex: usize, gamma: f64) -> Result<Self> {
        Self::vertex_with_options(hamiltonian, vertex, gamma, TupletOptions::default())
    }

    pub fn vertex_with_options(
        hamiltonian: Arc<NormalizedHamiltonian>,
        vertex: usize,
        gamma: f64,
        options: TupletOptions,
    ) -> Result<Self> {
        let n = hamiltonian.dim();
        if vertex >= n {
            return Err(LabError::InvalidParameter(format!(
                "vertex {vertex} out of range for {n} vertices"
            )));
        }
        let mut w = Array1::zeros(n);
        w[vertex] = C64::new(1.0, 0.0);
        Self::with_options(hamiltonian, w, gamma, options)
    }

    /// Compressed vertex-target tuplet of a distance-regular family, with
    /// ε_r² = m_r / N.
    pub fn from_profile(profile: &ClosedFormProfile, gamma: f64) -> Result<Self> {
        Self::from_profile_with_options(profile, gamma, TupletOptions::default())
    }

    pub fn from_profile_with_options(profile: &ClosedFormProfile, gamma: f64, options: TupletOptions) -> Result<Self> {
        let n = profile.num_vertices as f64;
        let eps: Vec<f64> = profile.multiplicities.iter().map(|&m| (m as f64 / n).sqrt()).collect();
        Self::compressed(
            &profile.theta,
            &eps,
            gamma,
            profile.num_vertices,
            profile.convention,
            options,
        )
    }

    /// Tuplet on the invariant subspace from distinct θ_r (descending, θ₁ = 1)
    /// and shadows ε_r.
    pub fn compressed(
        theta: &[f64],
        eps: &[f64],
        gamma: f64,
        ambient_dim: usize,
        convention: Convention,
        options: TupletOptions,
    ) -> Result<Self> {
        if theta.len() != eps.len() || theta.is_empty() {
            return Err(LabError::Shape(format!(
                "{} eigenvalues but {} shadows",
                theta.len(),
                eps.len()
            )));
        }
        let kept: Vec<usize> = (0..theta.len())
            .filter(|&r| r == 0 || eps[r] > options.support_threshold)
            .collect();
        let values: Vec<f64> = kept.iter().map(|&r| theta[r]).collect();
        let w: Array1<C64> = kept.iter().map(|&r| C64::new(eps[r], 0.0)).collect();
        let matrix = ComplexMatrix::diagonal(&values)?;
        let dim = values.len();
        let eig = EigenSystem::from_parts(values, ComplexMatrix::identity(dim).into_array())?;
        let hamiltonian = Arc::new(NormalizedHamiltonian::from_parts(matrix, convention, 1.0, eig)?);
        let decomp = decompose(Arc::clone(hamiltonian.eig()), options.cluster_tolerance);
        Self::assemble(hamiltonian, decomp, w, gamma, options, ambient_dim, true)
    }

    fn assemble(
        hamiltonian: Arc<NormalizedHamiltonian>,
        decomp: SpectralDecomposition,
        w: Array1<C64>,
        gamma: f64,
        options: TupletOptions,
        ambient_dim: usize,
        compressed: bool,
    ) -> Result<Self> {
        if w.len() != hamiltonian.dim() {
            return Err(LabError::Shape(format!(
                "target has length {} but H has dimension {}",
                w.len(),
                hamiltonian.dim()
            )));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(LabError::InvalidParameter(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(LabError::Precondition(format!(
                "target must be a unit vector, norm is {norm}"
            )));
        }
        if decomp.multiplicities()[0] != 1 {
            return Err(LabError::Precondition("top eigenvalue is not simple".into()));
        }
        let eps: Vec<f64> = (0..decomp.d())
            .map(|r| decomp.projector(r).image_norm(w.view()))
            .collect();
        let parseval: f64 = eps.iter().map(|e| e * e).sum();
        if (parseval - 1.0).abs() > 1e-9 {
            return Err(LabError::Precondition(format!(
                "shadows do not resolve the target (Σε² = {parseval})"
            )));
        }
        if eps[0] <= options.support_threshold {
            return Err(LabError::Assumption(format!(
                "target is orthogonal to the principal eigenspace (ε₁ = {:.3e})",
                eps[0]
            )));
        }
        Ok(Self {
            hamiltonian,
            decomp,
            w,
            gamma,
            eps,
            options,
            ambient_dim,
            compressed,
        })
    }

    /// Same H and w with a different γ.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(LabError::InvalidParameter(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        let mut out = self.clone();
        out.gamma = gamma;
        Ok(out)
    }

    pub fn hamiltonian(&self) -> &Arc<NormalizedHamiltonian> {
        &self.hamiltonian
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.decomp
    }

    pub fn w(&self) -> ArrayView1<'_, C64> {
        self.w.view()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn theta(&self) -> &[f64] {
        self.decomp.theta()
    }

    /// ε_r for every distinct eigenvalue, index 0 being the principal one.
    pub fn eps(&self) -> &[f64] {
        &self.eps
    }

    /// Δ_r = θ₁ − θ_r.
    pub fn delta(&self, r: usize) -> f64 {
        self.theta()[0] - self.theta()[r]
    }

    pub fn d(&self) -> usize {
        self.decomp.d()
    }

    pub fn options(&self) -> TupletOptions {
        self.options
    }

    /// Vertex count of the original graph (equals `dim` unless compressed).
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn is_compressed(&self) -> bool {
        self.compressed
    }

    /// E₁ w.
    pub fn principal_component(&self) -> Array1<C64> {
        self.decomp.projector(0).apply(self.w.view())
    }
}

/// 0-based indices r with ε_r > threshold.
pub fn eigenvalue_support(t: &Tuplet, threshold: f64) -> Vec<usize> {
    (0..t.d()).filter(|&r| t.eps()[r] > threshold).collect()
}

/// S_k = Σ_{r≥2} ε_r² / Δ_r^k, summed from the largest Δ_r down.
pub fn moment_sk(t: &Tuplet, k: u32) -> Result<f64> {
    if !(1..=3).contains(&k) {
        return Err(LabError::InvalidParameter(format!(
            "moment order must be 1, 2 or 3, got {k}"
        )));
    }
    if t.d() < 2 {
        return Err(LabError::Domain("S_k needs a non-principal eigenvalue".into()));
    }
    // θ is descending, so Δ_r grows with r; iterate from the end.
    Ok(compensated_sum(
        (1..t.d()).rev().map(|r| t.eps()[r].powi(2) / t.delta(r).powi(k as i32)),
    ))
}

/// Δ₂ = θ₁ − θ₂.
pub fn gap_delta2(decomp: &SpectralDecomposition) -> Result<f64> {
    if decomp.d() < 2 {
        return Err(LabError::Domain("Δ₂ needs a non-principal eigenvalue".into()));
    }
    Ok(decomp.theta()[0] - decomp.theta()[1])
}

/// ε₁ = ‖E₁ w‖.
pub fn shadow_eps1(t: &Tuplet) -> Result<f64> {
    let e = t.eps()[0];
    if e <= t.options().support_threshold {
        return Err(LabError::Assumption(format!(
            "ε₁ = {e:.3e} is below the support threshold"
        )));
    }
    Ok(e)
}

/// A two-sided or one-sided numeric inequality check.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InequalityCheck {
    pub name: String,
    pub lower: Option<f64>,
    pub value: f64,
    pub upper: Option<f64>,
    pub tolerance: f64,
    pub holds: bool,
}

impl InequalityCheck {
    pub fn new(name: &str, lower: Option<f64>, value: f64, upper: Option<f64>, tolerance: f64) -> Self {
        let holds = lower.is_none_or(|l| value >= l - tolerance) && upper.is_none_or(|u| value <= u + tolerance);
        Self {
            name: name.to_string(),
            lower,
            value,
            upper,
            tolerance,
            holds,
        }
    }
}

/// S₁²/S₂ ≤ 1 − ε₁².
pub fn variance_fact(t: &Tuplet) -> Result<InequalityCheck> {
    let s1 = moment_sk(t, 1)?;
    let s2 = moment_sk(t, 2)?;
    Ok(InequalityCheck::new(
        "variance",
        None,
        s1 * s1 / s2,
        Some(1.0 - t.eps()[0].powi(2)),
        1e-9,
    ))
}

/// ε₂² + Δ₂(1 − ε₁² − ε₂²) ≤ S₁Δ₂ ≤ 1 − ε₁². The lower side needs every
/// Δ_r ≤ 1, which the unit_interval convention guarantees.
pub fn constant_gap_fact(t: &Tuplet) -> Result<InequalityCheck> {
    let s1 = moment_sk(t, 1)?;
    let d2 = gap_delta2(t.decomposition())?;
    let e1 = t.eps()[0].powi(2);
    let e2 = t.eps()[1].powi(2);
    Ok(InequalityCheck::new(
        "constant_gap",
        Some(e2 + d2 * (1.0 - e1 - e2)),
        s1 * d2,
        Some(1.0 - e1),
        1e-9,
    ))
}

/// S₁ ≤ S₂ ≤ S₃; meaningful when every Δ_r ≤ 1.
pub fn moment_monotonicity(t: &Tuplet) -> Result<bool> {
    let s = [moment_sk(t, 1)?, moment_sk(t, 2)?, moment_sk(t, 3)?];
    let tol = 1e-12 * s[2].abs().max(1.0);
    Ok(s[0] <= s[1] + tol && s[1] <= s[2] + tol)
}
