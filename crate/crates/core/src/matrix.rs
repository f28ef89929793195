//! Dense complex square matrices (nalgebra) and the few helpers the operator
//! algebra needs on top.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::Zero;

pub type CMatrix = DMatrix<Complex64>;

pub fn zeros(dim: usize) -> CMatrix {
    CMatrix::zeros(dim, dim)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn from_diagonal(diag: &[Complex64]) -> CMatrix {
    CMatrix::from_diagonal(&DVector::from_column_slice(diag))
}

pub fn from_real_diagonal(diag: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&DVector::from_iterator(diag.len(), diag.iter().map(|&x| Complex64::new(x, 0.0))))
}

/// `[a, b] = ab − ba`
pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// `{a, b} = ab + ba`
pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b + b * a
}

pub trait OperatorExt {
    fn scaled(&self, factor: Complex64) -> CMatrix;
    fn scaled_real(&self, factor: f64) -> CMatrix;
    /// Largest entrywise modulus of `self − other`.
    fn max_abs_diff(&self, other: &CMatrix) -> f64;
    /// Principal submatrix on the given (row = column) index set.
    fn principal_submatrix(&self, indices: &[usize]) -> CMatrix;
    fn is_diagonal(&self) -> bool;
}

impl OperatorExt for CMatrix {
    fn scaled(&self, factor: Complex64) -> CMatrix {
        self * factor
    }

    fn scaled_real(&self, factor: f64) -> CMatrix {
        self * Complex64::new(factor, 0.0)
    }

    fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.shape(), other.shape(), "dimension mismatch");
        self.iter().zip(other.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    fn principal_submatrix(&self, indices: &[usize]) -> CMatrix {
        self.select_rows(indices).select_columns(indices)
    }

    fn is_diagonal(&self) -> bool {
        let n = self.nrows();
        // column-major storage
        self.iter().enumerate().all(|(idx, z)| idx % n == idx / n || z.is_zero())
    }
}
