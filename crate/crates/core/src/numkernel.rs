//! Dense complex linear algebra: Hermitian eigendecomposition, unitary
//! evolution of density matrices, and matrix norms.
//!
//! Eigendecompositions are delegated to `faer` (real symmetric input takes
//! the real path). Everything else is elementwise or a thin layer over
//! `ndarray` products.

use faer::{Mat, Side};
use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2, Axis};
use num_complex::Complex64;

use crate::error::{LabError, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Relative tolerance used when accepting a matrix as Hermitian.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Square dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    data: Array2<C64>,
}

impl ComplexMatrix {
    pub fn from_array(data: Array2<C64>) -> Result<Self> {
        let (rows, cols) = data.dim();
        if rows != cols || rows == 0 {
            return Err(LabError::Shape(format!(
                "expected a non-empty square matrix, got {rows}x{cols}"
            )));
        }
        Ok(Self { data })
    }

    pub fn from_real(data: &Array2<f64>) -> Result<Self> {
        Self::from_array(data.mapv(|x| C64::new(x, 0.0)))
    }

    pub fn from_fn(dim: usize, f: impl FnMut((usize, usize)) -> C64) -> Result<Self> {
        Self::from_array(Array2::from_shape_fn((dim, dim), f))
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: Array2::zeros((dim.max(1), dim.max(1))),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            data: Array2::eye(dim.max(1)),
        }
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let n = values.len();
        Self::from_fn(n, |(i, j)| if i == j { C64::new(values[i], 0.0) } else { ZERO })
    }

    /// The rank-one operator |v⟩⟨v|.
    pub fn outer(v: ArrayView1<C64>) -> Result<Self> {
        let n = v.len();
        Self::from_fn(n, |(i, j)| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_array(&self) -> &Array2<C64> {
        &self.data
    }

    pub fn view(&self) -> ArrayView2<'_, C64> {
        self.data.view()
    }

    pub fn into_array(self) -> Array2<C64> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[[i, j]]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            data: self.data.t().mapv(|z| z.conj()),
        }
    }

    /// Largest entrywise deviation from Hermiticity, |a_ij - conj(a_ji)|.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.data[[i, j]] - self.data[[j, i]].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= HERMITIAN_TOLERANCE * frobenius_norm(self).max(1.0)
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    pub fn trace(&self) -> C64 {
        self.data.diag().sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            data: self.data.mapv(|z| z * factor),
        }
    }

    pub fn shifted(&self, shift: f64) -> Self {
        let mut data = self.data.clone();
        for i in 0..self.dim() {
            data[[i, i]] += shift;
        }
        Self { data }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            data: &self.data + &other.data,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            data: &self.data - &other.data,
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            data: self.data.dot(&other.data),
        })
    }

    pub fn apply(&self, v: ArrayView1<C64>) -> Result<Array1<C64>> {
        if v.len() != self.dim() {
            return Err(LabError::Shape(format!(
                "vector of length {} against a {}x{} matrix",
                v.len(),
                self.dim(),
                self.dim()
            )));
        }
        Ok(self.data.dot(&v))
    }

    /// Real part of the entries; used for real symmetric operators.
    pub fn real_part(&self) -> Array2<f64> {
        self.data.mapv(|z| z.re)
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(LabError::Shape(format!(
                "dimension mismatch: {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }
}

/// Frobenius norm sqrt(Tr(A†A)).
pub fn frobenius_norm(a: &ComplexMatrix) -> f64 {
    a.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest eigenvalue magnitude of a Hermitian matrix.
pub fn spectral_norm(a: &ComplexMatrix) -> Result<f64> {
    let eig = hermitian_eig(a)?;
    Ok(eig.spectral_radius())
}

/// Eigenvalues sorted descending with matching orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    values: Vec<f64>,
    vectors: Array2<C64>,
}

impl EigenSystem {
    /// Builds an eigensystem from already-computed parts. Values must be
    /// descending and the columns of `vectors` orthonormal.
    pub fn from_parts(values: Vec<f64>, vectors: Array2<C64>) -> Result<Self> {
        if vectors.nrows() != values.len() || vectors.ncols() != values.len() {
            return Err(LabError::Shape(
                "eigenvector block does not match eigenvalue count".into(),
            ));
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(LabError::Precondition("eigenvalues must be sorted descending".into()));
        }
        Ok(Self { values, vectors })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> ArrayView2<'_, C64> {
        self.vectors.view()
    }

    pub fn vector(&self, i: usize) -> ArrayView1<'_, C64> {
        self.vectors.column(i)
    }

    /// Columns `start..end` as an orthonormal block.
    pub fn block(&self, start: usize, end: usize) -> ArrayView2<'_, C64> {
        self.vectors.slice(s![.., start..end])
    }

    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Coefficients U†v of a vector in the eigenbasis.
    pub fn to_eigenbasis(&self, v: ArrayView1<C64>) -> Array1<C64> {
        self.vectors.t().mapv(|z| z.conj()).dot(&v)
    }

    /// U Λ U†.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut scaled = self.vectors.clone();
        for (mut col, &lambda) in scaled.axis_iter_mut(Axis(1)).zip(&self.values) {
            col.mapv_inplace(|z| z * lambda);
        }
        let data = scaled.dot(&self.vectors.t().mapv(|z| z.conj()));
        ComplexMatrix { data }
    }

    /// ‖U†U − I‖_F.
    pub fn orthonormality_defect(&self) -> f64 {
        let gram = self.vectors.t().mapv(|z| z.conj()).dot(&self.vectors);
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { ONE } else { ZERO };
                acc += (gram[[i, j]] - target).norm_sqr();
            }
        }
        acc.sqrt()
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<EigenSystem> {
    if !h.is_hermitian() {
        return Err(LabError::NotHermitian {
            defect: h.hermiticity_defect(),
        });
    }
    let n = h.dim();
    let backend = |e: faer::linalg::evd::EvdError| LabError::Backend(format!("{e:?}"));
    let (ascending, vectors): (Vec<f64>, Array2<C64>) = if h.is_real() {
        let m = Mat::<f64>::from_fn(n, n, |i, j| h.data[[i, j]].re);
        let evd = m.self_adjoint_eigen(Side::Lower).map_err(backend)?;
        let u = evd.U();
        let vals = evd.S().column_vector().iter().copied().collect();
        (vals, Array2::from_shape_fn((n, n), |(i, j)| C64::new(u[(i, j)], 0.0)))
    } else {
        let m = to_faer(&h.data);
        let evd = m.self_adjoint_eigen(Side::Lower).map_err(backend)?;
        let u = evd.U();
        let vals = evd.S().column_vector().iter().map(|z| z.re).collect();
        (vals, Array2::from_shape_fn((n, n), |(i, j)| u[(i, j)]))
    };
    let mut values = ascending;
    values.reverse();
    let mut descending = Array2::zeros((n, n));
    for j in 0..n {
        descending.column_mut(j).assign(&vectors.column(n - 1 - j));
    }
    Ok(EigenSystem {
        values,
        vectors: descending,
    })
}

pub(crate) fn to_faer(a: &Array2<C64>) -> Mat<C64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

fn check_density(rho0: &ComplexMatrix) -> Result<()> {
    let tr = rho0.trace();
    if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
        return Err(LabError::Precondition(format!(
            "density matrix must have unit trace, got {:.12}",
            tr
        )));
    }
    Ok(())
}

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            carry += (sum - t) + x;
        } else {
            carry += (x - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// e^{−itH} ρ₀ e^{itH}, evaluated as U e^{−itΛ} (U†ρ₀U) e^{itΛ} U†.
pub fn evolve_density(rho0: &ComplexMatrix, eig: &EigenSystem, t: f64) -> Result<ComplexMatrix> {
    if rho0.dim() != eig.dim() {
        return Err(LabError::Shape("density and Hamiltonian dimensions differ".into()));
    }
    check_density(rho0)?;
    let u = &eig.vectors;
    let u_dag = u.t().mapv(|z| z.conj());
    let mut inner = u_dag.dot(&rho0.data).dot(u);
    let phases: Vec<C64> = eig.values.iter().map(|&l| C64::from_polar(1.0, -t * l)).collect();
    for ((p, q), z) in inner.indexed_iter_mut() {
        *z *= phases[p] * phases[q].conj();
    }
    Ok(ComplexMatrix {
        data: u.dot(&inner).dot(&u_dag),
    })
}

/// Unitary evolution of a density matrix given in factored form ρ₀ = B B†,
/// carried out in the eigenbasis of the evolution Hamiltonian.
///
/// After an O(n² k) setup, expectations ⟨v|ρ(t)|v⟩ cost O(n k) per time and
/// the distance ‖ρ(t) − ρ₀‖_F² costs O(n k²).
#[derive(Clone, Debug)]
pub struct FactoredEvolution {
    values: Vec<f64>,
    coeffs: Array2<C64>,
    initial_purity: f64,
}

impl FactoredEvolution {
    pub fn new(eig: &EigenSystem, factor: ArrayView2<C64>) -> Result<Self> {
        if factor.nrows() != eig.dim() {
            return Err(LabError::Shape("state factor rows do not match the Hamiltonian".into()));
        }
        let trace: f64 = factor.iter().map(|z| z.norm_sqr()).sum();
        if (trace - 1.0).abs() > 1e-8 {
            return Err(LabError::Precondition(format!(
                "density matrix must have unit trace, got {trace:.12}"
            )));
        }
        let coeffs = eig.vectors.t().mapv(|z| z.conj()).dot(&factor);
        let gram = coeffs.t().mapv(|z| z.conj()).dot(&coeffs);
        let initial_purity = gram.iter().map(|z| z.norm_sqr()).sum();
        Ok(Self {
            values: eig.values.clone(),
            coeffs,
            initial_purity,
        })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// ⟨v|ρ(t)|v⟩ where `probe` holds the eigenbasis coefficients U†v.
    pub fn expectation(&self, probe: &[C64], t: f64) -> f64 {
        let mut total = 0.0;
        for col in self.coeffs.axis_iter(Axis(1)) {
            let mut amp = ZERO;
            for ((&lambda, &a), &c) in self.values.iter().zip(probe).zip(col.iter()) {
                amp += a.conj() * C64::from_polar(1.0, -t * lambda) * c;
            }
            total += amp.norm_sqr();
        }
        total
    }

    /// ‖ρ(t) − ρ₀‖_F² = 2 Tr ρ₀² − 2 Tr(ρ(t) ρ₀).
    pub fn distance_sq_from_initial(&self, t: f64) -> f64 {
        let k = self.coeffs.ncols();
        let mut overlap = 0.0;
        for a in 0..k {
            for b in 0..k {
                let mut z = ZERO;
                for (p, &lambda) in self.values.iter().enumerate() {
                    z += self.coeffs[[p, a]].conj() * C64::from_polar(1.0, -t * lambda) * self.coeffs[[p, b]];
                }
                overlap += z.norm_sqr();
            }
        }
        (2.0 * self.initial_purity - 2.0 * overlap).max(0.0)
    }
}
