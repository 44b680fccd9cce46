//! Adjacency matrices for the built-in graph families and their normalization
//! to Hamiltonians with a simple top eigenvalue equal to one.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::numkernel::{hermitian_eig, ComplexMatrix, EigenSystem, C64};

/// Largest vertex count for which dense adjacency matrices are built.
pub const DEFAULT_SIZE_CAP: usize = 4096;

/// Simplicity threshold for the top adjacency eigenvalue.
const CONNECTIVITY_GAP: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Complete,
    Cycle,
    Hamming,
    Johnson,
    Grassmann,
    Paley,
    CycleInverseMatching,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Complete,
        Family::Cycle,
        Family::Hamming,
        Family::Johnson,
        Family::Grassmann,
        Family::Paley,
        Family::CycleInverseMatching,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Complete => "complete",
            Family::Cycle => "cycle",
            Family::Hamming => "hamming",
            Family::Johnson => "johnson",
            Family::Grassmann => "grassmann",
            Family::Paley => "paley",
            Family::CycleInverseMatching => "cycle_inverse_matching",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    /// Name of the parameter that grows along a sweep.
    pub fn size_key(self) -> &'static str {
        match self {
            Family::Paley | Family::CycleInverseMatching => "p",
            _ => "n",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A fully parameterized family member.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    Complete { n: usize },
    Cycle { n: usize },
    Hamming { n: usize, q: usize },
    Johnson { n: usize, k: usize },
    Grassmann { q: usize, n: usize, k: usize },
    Paley { p: usize },
    CycleInverseMatching { p: usize },
}

impl FamilySpec {
    pub fn family(&self) -> Family {
        match self {
            FamilySpec::Complete { .. } => Family::Complete,
            FamilySpec::Cycle { .. } => Family::Cycle,
            FamilySpec::Hamming { .. } => Family::Hamming,
            FamilySpec::Johnson { .. } => Family::Johnson,
            FamilySpec::Grassmann { .. } => Family::Grassmann,
            FamilySpec::Paley { .. } => Family::Paley,
            FamilySpec::CycleInverseMatching { .. } => Family::CycleInverseMatching,
        }
    }

    /// The parameter that varies along a sweep (`n`, or `p` for prime families).
    pub fn size_param(&self) -> usize {
        match *self {
            FamilySpec::Complete { n }
            | FamilySpec::Cycle { n }
            | FamilySpec::Hamming { n, .. }
            | FamilySpec::Johnson { n, .. }
            | FamilySpec::Grassmann { n, .. } => n,
            FamilySpec::Paley { p } | FamilySpec::CycleInverseMatching { p } => p,
        }
    }

    pub fn with_size(&self, size: usize) -> FamilySpec {
        match *self {
            FamilySpec::Complete { .. } => FamilySpec::Complete { n: size },
            FamilySpec::Cycle { .. } => FamilySpec::Cycle { n: size },
            FamilySpec::Hamming { q, .. } => FamilySpec::Hamming { n: size, q },
            FamilySpec::Johnson { k, .. } => FamilySpec::Johnson { n: size, k },
            FamilySpec::Grassmann { q, k, .. } => FamilySpec::Grassmann { q, n: size, k },
            FamilySpec::Paley { .. } => FamilySpec::Paley { p: size },
            FamilySpec::CycleInverseMatching { .. } => FamilySpec::CycleInverseMatching { p: size },
        }
    }

    /// (key, value) pairs in canonical order.
    pub fn params(&self) -> Vec<(&'static str, usize)> {
        match *self {
            FamilySpec::Complete { n } | FamilySpec::Cycle { n } => vec![("n", n)],
            FamilySpec::Hamming { n, q } => vec![("n", n), ("q", q)],
            FamilySpec::Johnson { n, k } => vec![("n", n), ("k", k)],
            FamilySpec::Grassmann { q, n, k } => vec![("q", q), ("n", n), ("k", k)],
            FamilySpec::Paley { p } | FamilySpec::CycleInverseMatching { p } => vec![("p", p)],
        }
    }

    /// Checks parameter ranges without building anything.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(LabError::InvalidParameter(msg));
        match *self {
            FamilySpec::Complete { n } if n < 2 => bad(format!("complete graph needs n >= 2, got {n}")),
            FamilySpec::Cycle { n } if n < 3 => bad(format!("cycle needs n >= 3, got {n}")),
            FamilySpec::Hamming { n, q } if n < 1 || q < 2 => {
                bad(format!("hamming graph needs n >= 1 and q >= 2, got n={n}, q={q}"))
            }
            FamilySpec::Johnson { n, k } if k < 1 || 2 * k > n => {
                bad(format!("johnson graph needs 1 <= k <= n/2, got n={n}, k={k}"))
            }
            FamilySpec::Grassmann { q, n, k } => {
                if !is_prime(q) {
                    bad(format!(
                        "grassmann graph needs prime q (prime powers unsupported), got {q}"
                    ))
                } else if k < 1 || n < 2 * k {
                    bad(format!("grassmann graph needs 1 <= k and n >= 2k, got n={n}, k={k}"))
                } else {
                    Ok(())
                }
            }
            FamilySpec::Paley { p } => {
                if !is_prime(p) {
                    bad(format!("paley graph needs prime p, got {p}"))
                } else if p % 4 != 1 {
                    bad(format!("paley graph needs p = 1 mod 4 (otherwise directed), got {p}"))
                } else {
                    Ok(())
                }
            }
            FamilySpec::CycleInverseMatching { p } if p < 5 || !is_prime(p) => {
                bad(format!("cycle with inverse matching needs a prime p >= 5, got {p}"))
            }
            _ => Ok(()),
        }
    }

    /// Vertex count from the closed form, without building the graph.
    pub fn vertex_count(&self) -> Result<usize> {
        self.validate()?;
        let overflow = || LabError::InvalidParameter(format!("{self} is too large to index"));
        let count: u128 = match *self {
            FamilySpec::Complete { n } | FamilySpec::Cycle { n } => n as u128,
            FamilySpec::Hamming { n, q } => (q as u128).checked_pow(n as u32).ok_or_else(overflow)?,
            FamilySpec::Johnson { n, k } => binomial(n, k).ok_or_else(overflow)?,
            FamilySpec::Grassmann { q, n, k } => gaussian_binomial(n, k, q).ok_or_else(overflow)?,
            FamilySpec::Paley { p } | FamilySpec::CycleInverseMatching { p } => p as u128,
        };
        usize::try_from(count).map_err(|_| overflow())
    }

    /// Regular degree where the family is regular.
    pub fn degree(&self) -> Option<usize> {
        match *self {
            FamilySpec::Complete { n } => Some(n - 1),
            FamilySpec::Cycle { .. } => Some(2),
            FamilySpec::Hamming { n, q } => Some(n * (q - 1)),
            FamilySpec::Johnson { n, k } => Some(k * (n - k)),
            FamilySpec::Grassmann { q, n, k } => {
                let g = |m: usize| q_integer(m, q).map(|x| x as usize);
                Some(q * g(k)? * g(n - k)?)
            }
            FamilySpec::Paley { p } => Some((p - 1) / 2),
            FamilySpec::CycleInverseMatching { .. } => None,
        }
    }

    /// Distance-regular families: every vertex sees the same eigenspace
    /// weights m_r / N, so the closed-form spectrum determines all shadows.
    pub fn is_distance_regular(&self) -> bool {
        !matches!(self, FamilySpec::CycleInverseMatching { .. })
    }

    /// Distinct adjacency eigenvalues (descending) with multiplicities.
    pub fn closed_form_spectrum(&self) -> Option<Vec<(f64, usize)>> {
        self.validate().ok()?;
        let spectrum = match *self {
            FamilySpec::Complete { n } => vec![((n - 1) as f64, 1), (-1.0, n - 1)],
            FamilySpec::Cycle { n } => (0..=n / 2)
                .map(|j| {
                    let theta = 2.0 * (2.0 * std::f64::consts::PI * j as f64 / n as f64).cos();
                    let m = if j == 0 || 2 * j == n { 1 } else { 2 };
                    (theta, m)
                })
                .collect(),
            FamilySpec::Hamming { n, q } => (0..=n)
                .map(|r| {
                    let theta = (n * (q - 1)) as f64 - (q * r) as f64;
                    let m = binomial(n, r)? * (q as u128 - 1).checked_pow(r as u32)?;
                    Some((theta, usize::try_from(m).ok()?))
                })
                .collect::<Option<Vec<_>>>()?,
            FamilySpec::Johnson { n, k } => (0..=k)
                .map(|r| {
                    let theta = ((k - r) * (n - k - r)) as f64 - r as f64;
                    let lower = if r == 0 { 0 } else { binomial(n, r - 1)? };
                    Some((theta, usize::try_from(binomial(n, r)? - lower).ok()?))
                })
                .collect::<Option<Vec<_>>>()?,
            FamilySpec::Grassmann { q, n, k } => (0..=k)
                .map(|r| {
                    let qi = |m: usize| q_integer(m, q).map(|x| x as f64);
                    let theta = (q as f64).powi(r as i32 + 1) * qi(k - r)? * qi(n - k - r)? - qi(r)?;
                    let lower = if r == 0 { 0 } else { gaussian_binomial(n, r - 1, q)? };
                    let m = gaussian_binomial(n, r, q)? - lower;
                    Some((theta, usize::try_from(m).ok()?))
                })
                .collect::<Option<Vec<_>>>()?,
            FamilySpec::Paley { p } => {
                let s = (p as f64).sqrt();
                let half = (p - 1) / 2;
                vec![(half as f64, 1), ((s - 1.0) / 2.0, half), ((-1.0 - s) / 2.0, half)]
            }
            FamilySpec::CycleInverseMatching { .. } => return None,
        };
        Some(spectrum)
    }

    /// Builds the dense adjacency matrix, refusing instances above `size_cap`.
    pub fn build(&self, size_cap: usize) -> Result<GraphInstance> {
        let vertices = self.vertex_count()?;
        if vertices > size_cap {
            return Err(LabError::SizeCap {
                vertices,
                cap: size_cap,
            });
        }
        let edges = match *self {
            FamilySpec::Complete { n } => complete_edges(n),
            FamilySpec::Cycle { n } => cycle_edges(n),
            FamilySpec::Hamming { n, q } => hamming_edges(n, q),
            FamilySpec::Johnson { n, k } => johnson_edges(n, k),
            FamilySpec::Grassmann { q, n, k } => grassmann_edges(q, n, k),
            FamilySpec::Paley { p } => paley_edges(p),
            FamilySpec::CycleInverseMatching { p } => cycle_inverse_matching_edges(p),
        };
        GraphInstance::from_edges(*self, vertices, &edges)
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family())?;
        for (i, (key, value)) in self.params().into_iter().enumerate() {
            write!(f, "{}{key}={value}", if i == 0 { ':' } else { ',' })?;
        }
        Ok(())
    }
}

/// A constructed graph with its 0/1 adjacency matrix.
#[derive(Clone, Debug)]
pub struct GraphInstance {
    pub spec: FamilySpec,
    pub num_vertices: usize,
    pub adjacency: ComplexMatrix,
    pub expected_spectrum: Option<Vec<(f64, usize)>>,
}

impl GraphInstance {
    fn from_edges(spec: FamilySpec, n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = ndarray::Array2::<C64>::zeros((n, n));
        for &(u, v) in edges {
            if u != v {
                adj[[u, v]] = C64::new(1.0, 0.0);
                adj[[v, u]] = C64::new(1.0, 0.0);
            }
        }
        Ok(Self {
            spec,
            num_vertices: n,
            adjacency: ComplexMatrix::from_array(adj)?,
            expected_spectrum: spec.closed_form_spectrum(),
        })
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency
            .as_array()
            .rows()
            .into_iter()
            .map(|row| row.iter().filter(|z| z.re != 0.0).count())
            .collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency.get(u, v).re != 0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// (A/λ₁ + I)/2, spectrum in [0, 1].
    #[default]
    UnitInterval,
    /// A/λ₁, spectrum in [−1, 1].
    SymmetricInterval,
}

impl Convention {
    /// Maps a raw eigenvalue given the top eigenvalue λ₁.
    pub fn map(self, lambda: f64, top: f64) -> f64 {
        match self {
            Convention::UnitInterval => 0.5 * (lambda / top + 1.0),
            Convention::SymmetricInterval => lambda / top,
        }
    }

    pub fn lower_bound(self) -> f64 {
        match self {
            Convention::UnitInterval => 0.0,
            Convention::SymmetricInterval => -1.0,
        }
    }
}

/// Hamiltonian with simple top eigenvalue 1 and its cached eigensystem.
#[derive(Clone, Debug)]
pub struct NormalizedHamiltonian {
    matrix: ComplexMatrix,
    convention: Convention,
    source_spectral_norm: f64,
    eig: Arc<EigenSystem>,
}

impl NormalizedHamiltonian {
    /// Wraps an already normalized Hermitian matrix after checking its spectrum.
    pub fn from_matrix(matrix: ComplexMatrix, convention: Convention) -> Result<Self> {
        let eig = hermitian_eig(&matrix)?;
        Self::from_parts(matrix, convention, 1.0, eig)
    }

    pub fn from_parts(
        matrix: ComplexMatrix,
        convention: Convention,
        source_spectral_norm: f64,
        eig: EigenSystem,
    ) -> Result<Self> {
        let values = eig.values();
        let top = values[0];
        if (top - 1.0).abs() > 1e-9 {
            return Err(LabError::Precondition(format!("top eigenvalue is {top}, expected 1")));
        }
        if let Some(&second) = values.get(1) {
            if top - second <= CONNECTIVITY_GAP {
                return Err(LabError::Disconnected { gap: top - second });
            }
        }
        let lowest = *values.last().unwrap_or(&top);
        if lowest < convention.lower_bound() - 1e-9 {
            return Err(LabError::Precondition(format!(
                "eigenvalue {lowest} lies below the {convention:?} range"
            )));
        }
        Ok(Self {
            matrix,
            convention,
            source_spectral_norm,
            eig: Arc::new(eig),
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn source_spectral_norm(&self) -> f64 {
        self.source_spectral_norm
    }

    pub fn eig(&self) -> &Arc<EigenSystem> {
        &self.eig
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// Scales a connected graph's adjacency matrix so its top eigenvalue is 1.
pub fn normalize_adjacency(g: &GraphInstance, convention: Convention) -> Result<NormalizedHamiltonian> {
    let raw = hermitian_eig(&g.adjacency)?;
    let values = raw.values();
    let top = values[0];
    if top <= 0.0 {
        return Err(LabError::Disconnected { gap: 0.0 });
    }
    if let Some(&second) = values.get(1) {
        if top - second <= CONNECTIVITY_GAP * top.max(1.0) {
            return Err(LabError::Disconnected { gap: top - second });
        }
    }
    let scaled = g.adjacency.scaled(1.0 / top);
    let matrix = match convention {
        Convention::SymmetricInterval => scaled,
        Convention::UnitInterval => scaled.shifted(1.0).scaled(0.5),
    };
    let mapped: Vec<f64> = values.iter().map(|&l| convention.map(l, top)).collect();
    let eig = EigenSystem::from_parts(mapped, raw.vectors().to_owned())?;
    NormalizedHamiltonian::from_parts(matrix, convention, top, eig)
}

/// Normalized distinct spectrum of a distance-regular family member, enough
/// to build the Krylov-compressed tuplet for a vertex target.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClosedFormProfile {
    pub spec: FamilySpec,
    pub num_vertices: usize,
    pub convention: Convention,
    /// Descending, with theta[0] = 1.
    pub theta: Vec<f64>,
    pub multiplicities: Vec<usize>,
}

pub fn closed_form_profile(spec: &FamilySpec, convention: Convention) -> Option<ClosedFormProfile> {
    if !spec.is_distance_regular() {
        return None;
    }
    let mut raw = spec.closed_form_spectrum()?;
    raw.sort_by(|a, b| b.0.total_cmp(&a.0));
    let top = raw[0].0;
    if top <= 0.0 || raw[0].1 != 1 {
        return None;
    }
    let num_vertices = raw.iter().map(|&(_, m)| m).sum();
    let (theta, multiplicities) = raw
        .into_iter()
        .filter(|&(_, m)| m > 0)
        .map(|(l, m)| (convention.map(l, top), m))
        .unzip();
    Some(ClosedFormProfile {
        spec: *spec,
        num_vertices,
        convention,
        theta,
        multiplicities,
    })
}

pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// The q-integer [m]_q = 1 + q + … + q^{m−1}.
pub fn q_integer(m: usize, q: usize) -> Option<u128> {
    let mut acc: u128 = 0;
    let mut power: u128 = 1;
    for _ in 0..m {
        acc = acc.checked_add(power)?;
        power = power.checked_mul(q as u128)?;
    }
    Some(acc)
}

/// Gaussian binomial [n choose k]_q, the number of k-subspaces of F_q^n.
pub fn gaussian_binomial(n: usize, k: usize, q: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let q = q as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num = num.checked_mul(q.checked_pow((n - i) as u32)? - 1)?;
        den = den.checked_mul(q.checked_pow((i + 1) as u32)? - 1)?;
    }
    Some(num / den)
}

fn complete_edges(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

fn cycle_edges(n: usize) -> Vec<(usize, usize)> {
    (0..n).map(|u| (u, (u + 1) % n)).collect()
}

fn hamming_edges(n: usize, q: usize) -> Vec<(usize, usize)> {
    let total = q.pow(n as u32);
    let mut edges = Vec::new();
    for u in 0..total {
        let mut stride = 1;
        for _ in 0..n {
            let digit = (u / stride) % q;
            for other in digit + 1..q {
                edges.push((u, u + (other - digit) * stride));
            }
            stride *= q;
        }
    }
    edges
}

/// k-subsets of {0..n} as bitmasks, in lexicographic order of sorted elements.
fn k_subsets(n: usize, k: usize) -> Vec<u64> {
    fn rec(start: usize, n: usize, left: usize, acc: u64, out: &mut Vec<u64>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for i in start..=n - left {
            rec(i + 1, n, left - 1, acc | (1 << i), out);
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, 0, &mut out);
    out
}

fn johnson_edges(n: usize, k: usize) -> Vec<(usize, usize)> {
    let sets = k_subsets(n, k);
    let mut edges = Vec::new();
    for (i, a) in sets.iter().enumerate() {
        for (j, b) in sets.iter().enumerate().skip(i + 1) {
            if (a & b).count_ones() as usize == k - 1 {
                edges.push((i, j));
            }
        }
    }
    edges
}

fn mod_inverse(a: usize, p: usize) -> usize {
    // p is prime, so a^{p-2} is the inverse.
    let mut result = 1usize;
    let mut base = a % p;
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    result
}

/// k×n matrices over F_q in reduced row-echelon form, one per k-subspace.
/// Ordered by pivot columns (lexicographic), then by free entries.
pub fn grassmann_subspaces(q: usize, n: usize, k: usize) -> Vec<Vec<Vec<u8>>> {
    let mut out = Vec::new();
    for pivots in k_subsets(n, k) {
        let pivot_cols: Vec<usize> = (0..n).filter(|c| pivots >> c & 1 == 1).collect();
        let free: Vec<(usize, usize)> = pivot_cols
            .iter()
            .enumerate()
            .flat_map(|(row, &pc)| (pc + 1..n).filter(|c| pivots >> c & 1 == 0).map(move |c| (row, c)))
            .collect();
        let combos = q.pow(free.len() as u32);
        for code in 0..combos {
            let mut m = vec![vec![0u8; n]; k];
            for (row, &pc) in pivot_cols.iter().enumerate() {
                m[row][pc] = 1;
            }
            // Most significant digit first so the first free entry varies slowest.
            let mut rest = code;
            for &(row, col) in free.iter().rev() {
                m[row][col] = (rest % q) as u8;
                rest /= q;
            }
            out.push(m);
        }
    }
    out
}

/// Rank of a matrix over F_p.
fn rank_mod_p(mut rows: Vec<Vec<u8>>, p: usize) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = mod_inverse(rows[rank][col] as usize, p);
        for c in 0..cols {
            rows[rank][c] = (rows[rank][c] as usize * inv % p) as u8;
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let factor = rows[r][col] as usize;
                for c in 0..cols {
                    let sub = factor * rows[rank][c] as usize % p;
                    rows[r][c] = ((rows[r][c] as usize + p - sub) % p) as u8;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn grassmann_edges(q: usize, n: usize, k: usize) -> Vec<(usize, usize)> {
    let spaces = grassmann_subspaces(q, n, k);
    let mut edges = Vec::new();
    for i in 0..spaces.len() {
        for j in i + 1..spaces.len() {
            let mut stacked = spaces[i].clone();
            stacked.extend(spaces[j].iter().cloned());
            // dim(A ∩ B) = 2k − rank([A; B]).
            if rank_mod_p(stacked, q) == k + 1 {
                edges.push((i, j));
            }
        }
    }
    edges
}

fn paley_edges(p: usize) -> Vec<(usize, usize)> {
    let mut residue = vec![false; p];
    for x in 1..p {
        residue[x * x % p] = true;
    }
    let mut edges = Vec::new();
    for u in 0..p {
        for v in u + 1..p {
            if residue[v - u] {
                edges.push((u, v));
            }
        }
    }
    edges
}

fn cycle_inverse_matching_edges(p: usize) -> Vec<(usize, usize)> {
    let mut edges = cycle_edges(p);
    for x in 1..p {
        let inv = mod_inverse(x, p);
        if x < inv {
            edges.push((x, inv));
        }
    }
    edges
}
