use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{HermitianMatrix, Scalar, SpectralError, TolerancePolicy};

const MAX_EIGEN_ITERATIONS: usize = 10_000;

/// Eigenvalues in ascending order with matching orthonormal eigenvectors
/// (one per column).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition<T: Scalar = f64> {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<T>,
}

impl<T: Scalar> SpectralDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> f64 {
        self.min_eigenvalue().abs().max(self.max_eigenvalue().abs())
    }

    /// `U · diag(f(λ)) · U*`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix<T> {
        let u = &self.eigenvectors;
        let mut scaled = u.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let fl = f(lambda);
            scaled.column_mut(j).scale_mut(fl);
        }
        HermitianMatrix::symmetrized(scaled * u.adjoint())
    }

    pub fn reconstruct(&self) -> HermitianMatrix<T> {
        self.map(|x| x)
    }
}

pub fn spectral_decompose<T: Scalar>(
    h: &HermitianMatrix<T>,
) -> Result<SpectralDecomposition<T>, SpectralError> {
    let m = h.as_matrix().clone();
    let dim = h.dim();
    let eig = SymmetricEigen::try_new(m, f64::EPSILON, MAX_EIGEN_ITERATIONS).ok_or_else(|| {
        SpectralError::NoConvergence {
            dim,
            condition_estimate: diagonal_condition_estimate(h),
        }
    })?;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = DVector::from_iterator(dim, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut eigenvectors = DMatrix::zeros(dim, dim);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn diagonal_condition_estimate<T: Scalar>(h: &HermitianMatrix<T>) -> f64 {
    let diag: Vec<f64> = h.diagonal().iter().map(|x| x.abs()).collect();
    let max = diag.iter().copied().fold(0.0, f64::max);
    let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// `H^alpha` with the default tolerance policy.
pub fn matrix_power<T: Scalar>(
    h: &HermitianMatrix<T>,
    alpha: f64,
) -> Result<HermitianMatrix<T>, SpectralError> {
    matrix_power_with(h, alpha, &TolerancePolicy::default())
}

/// `U · diag(λ^alpha) · U*`.
///
/// Negative or non-integer exponents require `λ_min > eps_pd`; anything at or
/// below the gate is a [`SpectralError::NearSingular`] error, never a clamp.
pub fn matrix_power_with<T: Scalar>(
    h: &HermitianMatrix<T>,
    alpha: f64,
    policy: &TolerancePolicy,
) -> Result<HermitianMatrix<T>, SpectralError> {
    if alpha == 0.0 {
        return Ok(HermitianMatrix::identity(h.dim()));
    }
    if alpha == 1.0 {
        return Ok(h.clone());
    }
    let d = spectral_decompose(h)?;
    let integral = alpha.fract() == 0.0;
    if alpha < 0.0 || !integral {
        let eps_pd = policy.eps_pd(d.spectral_norm());
        if d.min_eigenvalue() <= eps_pd {
            return Err(SpectralError::NearSingular {
                min_eigenvalue: d.min_eigenvalue(),
                eps_pd,
                alpha,
            });
        }
    }
    if integral && alpha.abs() <= i32::MAX as f64 {
        let k = alpha as i32;
        Ok(d.map(|x| x.powi(k)))
    } else {
        Ok(d.map(|x| x.powf(alpha)))
    }
}

/// `H^alpha` for positive semidefinite `H` and `alpha >= 0`.
///
/// Eigenvalues within `eps_pd` of zero are treated as exact zeros (`0^0 = 1`);
/// anything more negative is rejected with [`SpectralError::NotPositive`].
pub fn psd_power<T: Scalar>(
    h: &HermitianMatrix<T>,
    alpha: f64,
    policy: &TolerancePolicy,
) -> Result<HermitianMatrix<T>, SpectralError> {
    assert!(alpha >= 0.0, "psd_power needs a non-negative exponent");
    if alpha == 0.0 {
        return Ok(HermitianMatrix::identity(h.dim()));
    }
    let d = spectral_decompose(h)?;
    let eps_pd = policy.eps_pd(d.spectral_norm());
    if d.min_eigenvalue() < -eps_pd {
        return Err(SpectralError::NotPositive {
            min_eigenvalue: d.min_eigenvalue(),
        });
    }
    Ok(d.map(|x| if x <= eps_pd { 0.0 } else { x.powf(alpha) }))
}

/// `X* · H · X`.
pub fn congruence<T: Scalar>(
    x: &DMatrix<T>,
    h: &HermitianMatrix<T>,
) -> Result<HermitianMatrix<T>, SpectralError> {
    if x.nrows() != h.dim() {
        return Err(SpectralError::DimensionMismatch {
            left: x.nrows(),
            right: h.dim(),
        });
    }
    Ok(HermitianMatrix::symmetrized(
        x.adjoint() * h.as_matrix() * x,
    ))
}

/// Smallest eigenvalue; `1/δ` in the strict-positivity bound `H ≥ (1/δ) I`.
pub fn positivity_margin<T: Scalar>(h: &HermitianMatrix<T>) -> Result<f64, SpectralError> {
    Ok(spectral_decompose(h)?.min_eigenvalue())
}

/// Spectral norm: the largest absolute eigenvalue.
pub fn operator_norm<T: Scalar>(h: &HermitianMatrix<T>) -> Result<f64, SpectralError> {
    Ok(spectral_decompose(h)?.spectral_norm())
}
