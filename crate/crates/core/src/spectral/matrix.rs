use nalgebra::{DMatrix, DVector};

use super::{Scalar, SpectralError};

/// Dense self-adjoint matrix.
///
/// Construction checks that the input equals its conjugate transpose within
/// `1e-12 · ‖H‖_F` and then stores the exactly symmetrized matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix<T: Scalar = f64> {
    data: DMatrix<T>,
}

const HERMITIAN_REL_TOL: f64 = 1e-12;

impl<T: Scalar> HermitianMatrix<T> {
    pub fn new(data: DMatrix<T>) -> Result<Self, SpectralError> {
        Self::with_tolerance(data, HERMITIAN_REL_TOL)
    }

    /// Same as [`HermitianMatrix::new`] with a caller-chosen relative
    /// Hermiticity tolerance. Used to coerce evaluated products.
    pub fn with_tolerance(data: DMatrix<T>, rel_tol: f64) -> Result<Self, SpectralError> {
        let (rows, cols) = data.shape();
        if rows != cols {
            return Err(SpectralError::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(SpectralError::Empty);
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(SpectralError::NonFinite);
        }
        let residual = hermitian_residual(&data);
        let bound = rel_tol * data.norm();
        if residual > bound {
            return Err(SpectralError::NotHermitian { residual, bound });
        }
        Ok(Self::symmetrized(data))
    }

    /// Row-major construction.
    pub fn from_row_slice(dim: usize, entries: &[T]) -> Result<Self, SpectralError> {
        if entries.len() != dim * dim {
            return Err(SpectralError::Format(format!(
                "expected {} entries for dim {dim}, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            data: DMatrix::identity(dim, dim),
        }
    }

    pub fn scaled_identity(dim: usize, c: f64) -> Self {
        Self {
            data: DMatrix::identity(dim, dim) * T::from_real(c),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|&x| T::from_real(x)));
        Self {
            data: DMatrix::from_diagonal(&d),
        }
    }

    /// `(M + M*) / 2` without any check; callers guarantee `M` is Hermitian up
    /// to rounding.
    pub(crate) fn symmetrized(data: DMatrix<T>) -> Self {
        let adj = data.adjoint();
        let half = T::from_real(0.5);
        Self {
            data: (data + adj) * half,
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<T> {
        &self.data
    }

    pub fn into_inner(self) -> DMatrix<T> {
        self.data
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.norm()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.data.diagonal().iter().map(|x| x.real()).collect()
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, SpectralError> {
        self.check_dim(other)?;
        Ok(Self {
            data: &self.data - &other.data,
        })
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, SpectralError> {
        self.check_dim(other)?;
        Ok(Self {
            data: &self.data + &other.data,
        })
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            data: &self.data * T::from_real(c),
        }
    }

    pub(crate) fn check_dim(&self, other: &Self) -> Result<(), SpectralError> {
        if self.dim() != other.dim() {
            return Err(SpectralError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }
}

/// Frobenius norm of `M - M*`.
pub(crate) fn hermitian_residual<T: Scalar>(m: &DMatrix<T>) -> f64 {
    (m - m.adjoint()).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn rejects_non_square_and_empty() {
        let m = DMatrix::<f64>::zeros(2, 3);
        assert!(matches!(
            HermitianMatrix::new(m),
            Err(SpectralError::NotSquare { rows: 2, cols: 3 })
        ));
        let m = DMatrix::<f64>::zeros(0, 0);
        assert_eq!(HermitianMatrix::new(m), Err(SpectralError::Empty));
    }

    #[test]
    fn rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(
            HermitianMatrix::new(m),
            Err(SpectralError::NotHermitian { .. })
        ));
    }

    #[test]
    fn tiny_asymmetry_is_symmetrized() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0 + 1e-14, 1.0]);
        let h = HermitianMatrix::new(m).unwrap();
        assert_eq!(h.as_matrix()[(0, 1)], h.as_matrix()[(1, 0)]);
    }

    #[test]
    fn complex_hermitian_accepted() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let m = DMatrix::from_row_slice(2, 2, &[one * 2.0, i, -i, one]);
        assert!(HermitianMatrix::new(m.clone()).is_ok());
        let bad = DMatrix::from_row_slice(2, 2, &[one * 2.0, i, i, one]);
        assert!(HermitianMatrix::new(bad).is_err());
    }

    #[test]
    fn rejects_nan() {
        let m = DMatrix::from_row_slice(1, 1, &[f64::NAN]);
        assert_eq!(HermitianMatrix::new(m), Err(SpectralError::NonFinite));
    }
}
