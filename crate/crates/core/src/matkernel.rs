//! Dense complex linear algebra shared by every other module.
//!
//! Matrices are `nalgebra` dense matrices over `Complex64`. Storage is
//! column-major, so column-stacking vectorization is a reinterpretation of
//! the backing slice.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Absolute tolerance on `max |M - M^dagger|` for a matrix to count as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

/// Builds a matrix from real row-major entries.
pub fn from_real_rows(rows: usize, cols: usize, entries: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |i, j| c(entries[i * cols + j], 0.0))
}

pub fn diag_real(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    ComplexMatrix::from_fn(n, n, |i, j| if i == j { c(values[i], 0.0) } else { ZERO })
}

pub fn sigma_x() -> ComplexMatrix {
    from_real_rows(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn sigma_z() -> ComplexMatrix {
    from_real_rows(2, 2, &[1.0, 0.0, 0.0, -1.0])
}

/// The single-qubit Paulis in the order `1, X, Y, Z`.
pub fn paulis() -> [ComplexMatrix; 4] {
    [identity(2), sigma_x(), sigma_y(), sigma_z()]
}

/// `|i><j|` in dimension `d`.
pub fn ket_bra(d: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = zeros(d, d);
    m[(i, j)] = ONE;
    m
}

/// Column-stacking vectorization: entry `(i, j)` lands at index `j * rows + i`.
pub fn col(m: &ComplexMatrix) -> ComplexVector {
    ComplexVector::from_column_slice(m.as_slice())
}

/// Inverse of [`col`].
pub fn uncol(v: &ComplexVector, rows: usize, cols: usize) -> Result<ComplexMatrix> {
    if v.len() != rows * cols {
        return Err(Error::shape(format!("vector of length {}", rows * cols), v.len()));
    }
    Ok(ComplexMatrix::from_column_slice(rows, cols, v.as_slice()))
}

/// Hilbert-Schmidt inner product `tr(A^dagger B)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    if a.shape() != b.shape() {
        return Err(Error::shape(format!("{:?}", a.shape()), format!("{:?}", b.shape())));
    }
    Ok(a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum())
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    ensure_square(m)?;
    Ok(m.clone().singular_values().iter().sum())
}

/// Largest singular value.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    m.clone().singular_values().iter().cloned().fold(0.0, f64::max)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Largest entrywise modulus of `a - b`. Panics on shape mismatch.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff shape mismatch");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn hermitian_residual(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(m, &m.adjoint())
}

/// Largest entry of `|U^dagger U - 1|`, or infinity for non-square input.
pub fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(&(u.adjoint() * u), &identity(u.nrows()))
}

pub fn ensure_square(m: &ComplexMatrix) -> Result<usize> {
    if m.is_square() {
        Ok(m.nrows())
    } else {
        Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() })
    }
}

pub fn ensure_unitary(u: &ComplexMatrix, tol: f64) -> Result<()> {
    ensure_square(u)?;
    let residual = unitarity_residual(u);
    if residual > tol {
        return Err(Error::NotUnitary { residual });
    }
    Ok(())
}

pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Vec<ComplexVector>,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.min() >= -tol
    }

    /// `sum_k f(lambda_k) v_k v_k^dagger`
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.vectors.first().map_or(0, |v| v.len());
        let mut out = zeros(n, n);
        for (&value, v) in self.values.iter().zip(&self.vectors) {
            let w = f(value);
            if w != 0.0 {
                out += (v * v.adjoint()).scale(w);
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_values(|x| x)
    }
}

/// Spectral decomposition of a Hermitian matrix.
///
/// The input is symmetrized as `(M + M^dagger)/2` first. Ties in the
/// descending sort keep the solver's original order.
pub fn hermitian_spectral(m: &ComplexMatrix) -> Result<Spectrum> {
    ensure_square(m)?;
    let residual = hermitian_residual(m);
    if residual > HERMITIAN_TOL {
        return Err(Error::NotHermitian { residual });
    }
    Ok(spectral_unchecked(&hermitian_part(m)))
}

pub(crate) fn spectral_unchecked(h: &ComplexMatrix) -> Spectrum {
    let eig = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    Spectrum {
        values: order.iter().map(|&k| eig.eigenvalues[k]).collect(),
        vectors: order.iter().map(|&k| eig.eigenvectors.column(k).into_owned()).collect(),
    }
}

/// Principal square root of a PSD matrix; negative eigenvalues are clipped to zero.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(hermitian_spectral(m)?.map_values(|x| x.max(0.0).sqrt()))
}

/// Partial trace over the first tensor factor of a `(d_first * d_second)`-square matrix.
pub fn partial_trace_first(m: &ComplexMatrix, d_first: usize, d_second: usize) -> Result<ComplexMatrix> {
    let n = d_first * d_second;
    if m.shape() != (n, n) {
        return Err(Error::shape(format!("({n}, {n})"), format!("{:?}", m.shape())));
    }
    Ok(ComplexMatrix::from_fn(d_second, d_second, |i, j| {
        (0..d_first).map(|a| m[(a * d_second + i, a * d_second + j)]).sum()
    }))
}

/// Partial trace over the second tensor factor.
pub fn partial_trace_second(m: &ComplexMatrix, d_first: usize, d_second: usize) -> Result<ComplexMatrix> {
    let n = d_first * d_second;
    if m.shape() != (n, n) {
        return Err(Error::shape(format!("({n}, {n})"), format!("{:?}", m.shape())));
    }
    Ok(ComplexMatrix::from_fn(d_first, d_first, |a, b| {
        (0..d_second).map(|i| m[(a * d_second + i, b * d_second + i)]).sum()
    }))
}

pub fn ensure_finite(m: &ComplexMatrix) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}
