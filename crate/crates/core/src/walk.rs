//! Search dynamics: ρ(0) = E₁ evolved under H̃ = γH + ww†, and the fidelity
//! f(t) = ⟨w|ρ(t)|w⟩ by direct evolution or from the perturbed spectrum.

use std::f64::consts::PI;

use ndarray::ArrayView2;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::numkernel::{frobenius_norm, ComplexMatrix, EigenSystem, FactoredEvolution, C64};
use crate::perturb::{full_perturbed_spectrum, pole_guard, PerturbedSpectrum};
use crate::spectra::{gap_delta2, moment_sk, Tuplet};

pub const PEAK_GRID_POINTS: usize = 2000;
pub const DEFAULT_HORIZON_MULTIPLE: f64 = 4.0;
const GOLDEN_RELATIVE_RESOLUTION: f64 = 1e-6;

/// Direct evaluator built on a dense eigendecomposition of H̃.
#[derive(Clone, Debug)]
pub struct DirectWalk {
    evolution: FactoredEvolution,
    probe: Vec<C64>,
}

impl DirectWalk {
    pub fn new(t: &Tuplet) -> Result<Self> {
        let spec = full_perturbed_spectrum(t)?;
        Self::from_spectrum(t, &spec)
    }

    /// Reuses the eigenvectors of a dense perturbed spectrum.
    pub fn from_spectrum(t: &Tuplet, spec: &PerturbedSpectrum) -> Result<Self> {
        let dense = spec
            .dense()
            .ok_or_else(|| LabError::Precondition("direct evolution needs the dense perturbed spectrum".into()))?;
        Self::from_eig(t, dense.eig())
    }

    pub fn from_eig(t: &Tuplet, eig: &EigenSystem) -> Result<Self> {
        let principal: ArrayView2<C64> = t.decomposition().projector(0).basis();
        let evolution = FactoredEvolution::new(eig, principal)?;
        let probe = eig.to_eigenbasis(t.w()).to_vec();
        Ok(Self { evolution, probe })
    }

    pub fn fidelity(&self, time: f64) -> f64 {
        self.evolution.expectation(&self.probe, time)
    }

    /// ‖ρ(τ) − E₁‖_F².
    pub fn distance_sq(&self, time: f64) -> f64 {
        self.evolution.distance_sq_from_initial(time)
    }
}

/// Tr(ww† e^{−itH̃} E₁ e^{itH̃}).
pub fn fidelity_direct(t: &Tuplet, time: f64) -> Result<f64> {
    Ok(DirectWalk::new(t)?.fidelity(time))
}

/// f(t) = ε₁² |Σ_p e^{−itζ_p} ‖F_p w‖²/(ζ_p − γ)|².
#[derive(Clone, Debug)]
pub struct SpectralWalk {
    eps1_sq: f64,
    zeta: Vec<f64>,
    coeffs: Vec<f64>,
}

impl SpectralWalk {
    pub fn new(t: &Tuplet, spec: &PerturbedSpectrum) -> Result<Self> {
        let counted: usize = spec.multiplicities.iter().sum();
        if counted != t.dim() {
            return Err(LabError::Precondition(format!(
                "spectral walk needs the full spectrum: {counted} of {} eigenvalues given",
                t.dim()
            )));
        }
        let gamma = t.gamma();
        let guard = pole_guard(gamma);
        let mut zeta = Vec::new();
        let mut coeffs = Vec::new();
        for (&z, &o) in spec.zeta.iter().zip(&spec.overlaps) {
            if (z - gamma).abs() < guard {
                return Err(LabError::PoleProximity {
                    x: z,
                    pole: gamma,
                    distance: (z - gamma).abs(),
                });
            }
            if o > 0.0 {
                zeta.push(z);
                coeffs.push(o / (z - gamma));
            }
        }
        Ok(Self {
            eps1_sq: t.eps()[0].powi(2),
            zeta,
            coeffs,
        })
    }

    pub fn fidelity(&self, time: f64) -> f64 {
        let amp: C64 = self
            .zeta
            .iter()
            .zip(&self.coeffs)
            .map(|(&z, &c)| C64::from_polar(c, -z * time))
            .sum();
        self.eps1_sq * amp.norm_sqr()
    }

    /// ε₁² (Σ_p ‖F_p w‖²/|ζ_p − γ|)², a time-independent ceiling on f.
    pub fn triangle_bound(&self) -> f64 {
        self.eps1_sq * self.coeffs.iter().map(|c| c.abs()).sum::<f64>().powi(2)
    }
}

pub fn fidelity_spectral(t: &Tuplet, spec: &PerturbedSpectrum, time: f64) -> Result<f64> {
    Ok(SpectralWalk::new(t, spec)?.fidelity(time))
}

pub fn triangle_bound(t: &Tuplet, spec: &PerturbedSpectrum) -> Result<f64> {
    Ok(SpectralWalk::new(t, spec)?.triangle_bound())
}

/// t* = π/(ζ₁ − ζ₂).
pub fn critical_time(spec: &PerturbedSpectrum) -> Result<f64> {
    let gap = spec.zeta1() - spec.zeta2();
    if !(gap >= 1e-13) {
        return Err(LabError::DegenerateGap(gap));
    }
    Ok(PI / gap)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Peak {
    pub time: f64,
    pub value: f64,
}

/// Maximizes `f` on [0, horizon]: a uniform grid, then golden-section
/// refinement around the best sample.
pub fn maximize_on_grid(f: impl Fn(f64) -> f64, horizon: f64, points: usize) -> Peak {
    let points = points.max(2);
    let step = horizon / (points - 1) as f64;
    let (best, value) = (0..points)
        .map(|i| (i, f(i as f64 * step)))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let mut lo = (best as f64 - 1.0).max(0.0) * step;
    let mut hi = ((best + 1).min(points - 1)) as f64 * step;
    let mut peak = Peak {
        time: best as f64 * step,
        value,
    };
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > GOLDEN_RELATIVE_RESOLUTION * peak.time.max(step) {
        if fa >= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = f(b);
        }
    }
    for (time, value) in [(a, fa), (b, fb)] {
        if value > peak.value {
            peak = Peak { time, value };
        }
    }
    peak
}

/// Peak of the spectral fidelity on [0, horizonMultiple/ε₁].
pub fn peak_fidelity(t: &Tuplet, spec: &PerturbedSpectrum, horizon_multiple: f64) -> Result<Peak> {
    if !(horizon_multiple >= 1.0) {
        return Err(LabError::InvalidParameter(format!(
            "horizon multiple must be at least 1, got {horizon_multiple}"
        )));
    }
    let walk = SpectralWalk::new(t, spec)?;
    Ok(maximize_on_grid(
        |x| walk.fidelity(x),
        horizon_multiple / t.eps()[0],
        PEAK_GRID_POINTS,
    ))
}

/// Sampled fidelity by both methods plus the summary times.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FidelityCurve {
    pub times: Vec<f64>,
    pub f_direct: Option<Vec<f64>>,
    pub f_spectral: Vec<f64>,
    pub t_star: f64,
    pub f_at_t_star: f64,
    pub peak_time: f64,
    pub peak_value: f64,
}

impl FidelityCurve {
    /// max_t |f_direct − f_spectral|, when the direct column exists.
    pub fn max_method_gap(&self) -> Option<f64> {
        self.f_direct.as_ref().map(|d| {
            d.iter()
                .zip(&self.f_spectral)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
    }
}

/// `points` equally spaced samples of [0, horizon].
pub fn time_grid(horizon: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points).map(|i| horizon * i as f64 / (points - 1) as f64).collect(),
    }
}

/// Samples the spectral fidelity (and the direct one when `direct` is given).
pub fn fidelity_curve(
    t: &Tuplet,
    spec: &PerturbedSpectrum,
    direct: Option<&DirectWalk>,
    times: &[f64],
    horizon_multiple: f64,
) -> Result<FidelityCurve> {
    let walk = SpectralWalk::new(t, spec)?;
    let t_star = critical_time(spec)?;
    let peak = peak_fidelity(t, spec, horizon_multiple)?;
    Ok(FidelityCurve {
        times: times.to_vec(),
        f_direct: direct.map(|d| times.iter().map(|&x| d.fidelity(x)).collect()),
        f_spectral: times.iter().map(|&x| walk.fidelity(x)).collect(),
        t_star,
        f_at_t_star: walk.fidelity(t_star),
        peak_time: peak.time,
        peak_value: peak.value,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LowerBoundAudit {
    pub taus: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    /// min over samples of rhs − lhs.
    pub margin: f64,
    pub passed: bool,
}

/// ‖ρ(τ) − E₁‖_F² ≤ 4ε₁τ at each sample.
pub fn lower_bound_audit(t: &Tuplet, walk: &DirectWalk, taus: &[f64]) -> Result<LowerBoundAudit> {
    if taus.iter().any(|&x| !(x >= 0.0)) {
        return Err(LabError::InvalidParameter("τ samples must be non-negative".into()));
    }
    let eps1 = t.eps()[0];
    let lhs: Vec<f64> = taus.iter().map(|&x| walk.distance_sq(x)).collect();
    let rhs: Vec<f64> = taus.iter().map(|&x| 4.0 * eps1 * x).collect();
    let margin = lhs.iter().zip(&rhs).map(|(l, r)| r - l).fold(f64::INFINITY, f64::min);
    Ok(LowerBoundAudit {
        taus: taus.to_vec(),
        passed: lhs.iter().zip(&rhs).all(|(l, r)| *l <= r + 1e-8),
        lhs,
        rhs,
        margin,
    })
}

/// ‖A − C‖² ≤ 2‖A − B‖² + 2‖B − C‖², returned as the slack.
pub fn squared_triangle_slack(a: &ComplexMatrix, b: &ComplexMatrix, c: &ComplexMatrix) -> Result<f64> {
    let ac = frobenius_norm(&a.sub(c)?).powi(2);
    let ab = frobenius_norm(&a.sub(b)?).powi(2);
    let bc = frobenius_norm(&b.sub(c)?).powi(2);
    Ok(2.0 * ab + 2.0 * bc - ac)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PerfectFidelityReport {
    /// |⟨y₁|z₁⟩|.
    pub overlap_principal: f64,
    /// |⟨y₁|w⟩|.
    pub overlap_target: f64,
    pub gap: f64,
}

/// Compares the principal perturbed eigenvector y₁ with z₁ and w.
pub fn perfect_fidelity_check(t: &Tuplet, spec: &PerturbedSpectrum) -> Result<PerfectFidelityReport> {
    let y1 = spec.principal_vector()?;
    let z1 = t.decomposition().projector(0).basis().column(0).to_owned();
    let inner = |a: &ndarray::Array1<C64>, b: ndarray::ArrayView1<C64>| -> f64 {
        a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum::<C64>().norm()
    };
    let overlap_principal = inner(&y1, z1.view());
    let overlap_target = inner(&y1, t.w());
    Ok(PerfectFidelityReport {
        overlap_principal,
        overlap_target,
        gap: (overlap_principal - overlap_target).abs(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PropositiveCheck {
    pub moment_ratio: f64,
    pub eps1_over_scale: f64,
    pub applicable: bool,
    pub f_at_t_star: f64,
    pub bound: f64,
    pub holds: Option<bool>,
}

/// Engineering constant of the finite-size rendering below.
pub const PROPOSITIVE_CONSTANT: f64 = 0.2;

/// f(t*) ≥ 0.2·S₁/√S₂ on instances with S₂/S₁² ∈ [1, 4] and ε₁ ≤ 0.05·√(S₁Δ₂).
pub fn propositive_check(t: &Tuplet, spec: &PerturbedSpectrum) -> Result<PropositiveCheck> {
    let s1 = moment_sk(t, 1)?;
    let s2 = moment_sk(t, 2)?;
    let d2 = gap_delta2(t.decomposition())?;
    let ratio = s2 / (s1 * s1);
    let scale = (s1 * d2).sqrt();
    let eps1 = t.eps()[0];
    let applicable = (1.0..=4.0).contains(&ratio) && eps1 <= 0.05 * scale;
    let f_at_t_star = fidelity_spectral(t, spec, critical_time(spec)?)?;
    let bound = PROPOSITIVE_CONSTANT * s1 / s2.sqrt();
    Ok(PropositiveCheck {
        moment_ratio: ratio,
        eps1_over_scale: eps1 / scale,
        applicable,
        f_at_t_star,
        bound,
        holds: applicable.then_some(f_at_t_star >= bound),
    })
}
