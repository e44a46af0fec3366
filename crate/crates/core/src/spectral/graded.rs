//! Log-spectral representation of strictly positive matrices.
//!
//! Nested words such as `(X (Y Z^p Y)^q X)^w` reach eigenvalue ranges far
//! beyond `f64` (ψ-fold powers of a matrix with condition number 10³ span
//! e^1000 and more), yet their final outer power brings them back to a
//! moderate range. The matrices are therefore kept as eigenvectors plus
//! logarithms of eigenvalues, and congruences `X H X` are computed as the
//! left singular system of the column-graded factor `X U diag(e^{ℓ/2})`
//! using one-sided Jacobi rotations on unit columns with separate log scales.
//! For column-graded matrices with a well-conditioned unscaled part this
//! yields every eigenvalue to high relative accuracy, independently of the
//! grading.

use nalgebra::{DMatrix, DVector};

use super::{spectral_decompose, HermitianMatrix, Scalar, SpectralDecomposition, SpectralError, TolerancePolicy};

const MAX_SWEEPS: usize = 80;

/// Largest log-eigenvalue that still materializes as a finite `f64` matrix.
pub const MAX_MATERIAL_LOG: f64 = 700.0;

/// Strictly positive matrix `U · diag(exp(ℓ)) · U*`, ℓ ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct LogSpectral<T: Scalar = f64> {
    vectors: DMatrix<T>,
    logs: DVector<f64>,
}

impl<T: Scalar> LogSpectral<T> {
    pub fn identity(dim: usize) -> Self {
        Self {
            vectors: DMatrix::identity(dim, dim),
            logs: DVector::zeros(dim),
        }
    }

    pub fn from_hermitian(
        h: &HermitianMatrix<T>,
        policy: &TolerancePolicy,
    ) -> Result<Self, SpectralError> {
        Self::from_decomposition(&spectral_decompose(h)?, policy)
    }

    /// Fails with [`SpectralError::NearSingular`] unless `λ_min > eps_pd`.
    pub fn from_decomposition(
        d: &SpectralDecomposition<T>,
        policy: &TolerancePolicy,
    ) -> Result<Self, SpectralError> {
        let eps_pd = policy.eps_pd(d.spectral_norm());
        if d.min_eigenvalue() <= eps_pd {
            return Err(SpectralError::NearSingular {
                min_eigenvalue: d.min_eigenvalue(),
                eps_pd,
                alpha: f64::NAN,
            });
        }
        Ok(Self {
            vectors: d.eigenvectors.clone(),
            logs: d.eigenvalues.map(f64::ln),
        })
    }

    pub fn dim(&self) -> usize {
        self.logs.len()
    }

    pub fn logs(&self) -> &DVector<f64> {
        &self.logs
    }

    pub fn vectors(&self) -> &DMatrix<T> {
        &self.vectors
    }

    pub fn min_log(&self) -> f64 {
        self.logs[0]
    }

    pub fn max_log(&self) -> f64 {
        self.logs[self.dim() - 1]
    }

    /// `H^e`, exact on the log scale.
    pub fn powf(&self, e: f64) -> Self {
        let mut logs = self.logs.map(|l| l * e);
        let mut vectors = self.vectors.clone();
        if e < 0.0 {
            let n = self.dim();
            logs = DVector::from_iterator(n, (0..n).rev().map(|i| logs[i]));
            let mut flipped = DMatrix::zeros(n, n);
            for j in 0..n {
                flipped.set_column(j, &vectors.column(n - 1 - j));
            }
            vectors = flipped;
        }
        Self { vectors, logs }
    }

    /// `e^{-s} H` as a dense matrix together with `s = max ℓ`.
    pub fn scaled_dense(&self) -> (DMatrix<T>, f64) {
        let s = self.max_log();
        let mut scaled = self.vectors.clone();
        for j in 0..self.dim() {
            scaled
                .column_mut(j)
                .scale_mut((self.logs[j] - s).exp());
        }
        (scaled * self.vectors.adjoint(), s)
    }

    pub fn to_hermitian(&self) -> Result<HermitianMatrix<T>, SpectralError> {
        if self.max_log() > MAX_MATERIAL_LOG || !self.max_log().is_finite() {
            return Err(SpectralError::Overflow {
                log_max: self.max_log(),
            });
        }
        let mut scaled = self.vectors.clone();
        for j in 0..self.dim() {
            scaled.column_mut(j).scale_mut(self.logs[j].exp());
        }
        Ok(HermitianMatrix::symmetrized(scaled * self.vectors.adjoint()))
    }

    /// `X · H · X` for strictly positive `X` (self is `H`).
    ///
    /// `X H X = G G*` for `G = X H^{1/2}` and `= G'* G'` for `G' = H^{1/2} X`.
    /// The first is column-graded by the spectrum of `H` with unscaled part
    /// `X U_H`, the second by the spectrum of `X` with unscaled part
    /// `H^{1/2} U_X`; the factor whose unscaled part has the smaller log-range
    /// is orthogonalized.
    pub fn congruence(&self, x: &Self) -> Result<Self, SpectralError> {
        if x.dim() != self.dim() {
            return Err(SpectralError::DimensionMismatch {
                left: x.dim(),
                right: self.dim(),
            });
        }
        let range = |l: &Self| l.max_log() - l.min_log();
        if range(x) <= range(self) / 2.0 {
            let (x_scaled, x_shift) = x.scaled_dense();
            let half: Vec<f64> = self.logs.iter().map(|l| l / 2.0).collect();
            let (columns, scales, _) = orthogonalize(x_scaled * &self.vectors, x_shift, &half, false)?;
            Ok(Self::assemble(columns, &scales))
        } else {
            let (root_scaled, root_shift) = self.powf(0.5).scaled_dense();
            let logs: Vec<f64> = x.logs.iter().copied().collect();
            let (_, scales, v) =
                orthogonalize(root_scaled * &x.vectors, root_shift, &logs, true)?;
            let v = v.expect("rotations accumulated");
            let right: Vec<DVector<T>> = (0..self.dim())
                .map(|j| &x.vectors * v.column(j))
                .collect();
            Ok(Self::assemble(right, &scales))
        }
    }

    fn assemble(columns: Vec<DVector<T>>, scales: &[f64]) -> Self {
        let n = columns.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| scales[a].total_cmp(&scales[b]));
        let mut vectors = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &columns[src]);
        }
        let logs = DVector::from_iterator(n, order.iter().map(|&i| 2.0 * scales[i]));
        Self { vectors, logs }
    }
}

/// Splits the columns of `e^{shift} · base · diag(e^{grading})` into unit
/// vectors and log scales and orthogonalizes them.
#[allow(clippy::type_complexity)]
fn orthogonalize<T: Scalar>(
    base: DMatrix<T>,
    shift: f64,
    grading: &[f64],
    accumulate: bool,
) -> Result<(Vec<DVector<T>>, Vec<f64>, Option<DMatrix<T>>), SpectralError> {
    let n = base.ncols();
    let mut columns = Vec::with_capacity(n);
    let mut scales = Vec::with_capacity(n);
    for j in 0..n {
        let col = base.column(j).into_owned();
        let norm = col.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(SpectralError::Overflow { log_max: shift });
        }
        columns.push(col / T::from_real(norm));
        scales.push(grading[j] + shift + norm.ln());
    }
    let mut v = accumulate.then(|| DMatrix::identity(n, n));
    graded_jacobi(&mut columns, &mut scales, v.as_mut())?;
    Ok((columns, scales, v))
}

/// Orthogonalizes the columns `e^{s_i} b_i` (unit `b_i`) in place. Each step
/// is a plane rotation of the unscaled columns; `v`, when given, accumulates
/// them.
fn graded_jacobi<T: Scalar>(
    columns: &mut [DVector<T>],
    scales: &mut [f64],
    mut v: Option<&mut DMatrix<T>>,
) -> Result<(), SpectralError> {
    let n = columns.len();
    let tol = f64::EPSILON * n as f64;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let (hi, lo) = if scales[i] >= scales[j] { (i, j) } else { (j, i) };
                let g = columns[hi].dotc(&columns[lo]);
                let gabs = g.modulus();
                if gabs <= tol {
                    continue;
                }
                rotated = true;
                // phase-align the smaller column so that the coupling is real
                let phase = g.conjugate() / T::from_real(gabs);
                columns[lo] *= phase;

                let rho = (scales[lo] - scales[hi]).exp();
                let x = rho * rho - 1.0;
                let h = x.hypot(2.0 * rho * gabs);
                let tau = if x >= 0.0 {
                    2.0 * gabs / (x + h)
                } else {
                    -2.0 * gabs / (-x + h)
                };
                let t = rho * tau;
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                if let Some(v) = v.as_deref_mut() {
                    let mut col_lo = v.column(lo).into_owned() * phase;
                    let col_hi = v.column(hi).into_owned();
                    let new_hi = &col_hi * T::from_real(c) - &col_lo * T::from_real(s);
                    col_lo = col_hi * T::from_real(s) + col_lo * T::from_real(c);
                    v.set_column(hi, &new_hi);
                    v.set_column(lo, &col_lo);
                }
                let new_hi = &columns[hi] * T::from_real(c) - &columns[lo] * T::from_real(s * rho);
                let new_lo = &columns[hi] * T::from_real(c * tau) + &columns[lo] * T::from_real(c);
                for (idx, v) in [(hi, new_hi), (lo, new_lo)] {
                    let norm = v.norm();
                    if norm == 0.0 || !norm.is_finite() {
                        return Err(SpectralError::NoConvergence {
                            dim: n,
                            condition_estimate: f64::INFINITY,
                        });
                    }
                    scales[idx] += norm.ln();
                    columns[idx] = v / T::from_real(norm);
                }
            }
        }
        if !rotated {
            return Ok(());
        }
    }
    Err(SpectralError::NoConvergence {
        dim: n,
        condition_estimate: f64::NAN,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{congruence, matrix_power};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_spd<T: Scalar>(dim: usize, seed: u64) -> HermitianMatrix<T> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::from_fn(dim, dim, |_, _| T::sample_normal(&mut rng));
        HermitianMatrix::symmetrized(
            g.adjoint() * &g + DMatrix::identity(dim, dim) * T::from_real(0.1),
        )
    }

    fn rel_err<T: Scalar>(a: &HermitianMatrix<T>, b: &HermitianMatrix<T>) -> f64 {
        (a.as_matrix() - b.as_matrix()).norm() / b.frobenius_norm()
    }

    fn check_congruence<T: Scalar>(seed: u64) {
        let policy = TolerancePolicy::default();
        let h = random_spd::<T>(4, seed);
        let x = random_spd::<T>(4, seed + 1000);
        let expected = congruence(x.as_matrix(), &h).unwrap();
        let got = LogSpectral::from_hermitian(&h, &policy)
            .unwrap()
            .congruence(&LogSpectral::from_hermitian(&x, &policy).unwrap())
            .unwrap()
            .to_hermitian()
            .unwrap();
        assert!(rel_err(&got, &expected) < 1e-10, "seed {seed}");
    }

    #[test]
    fn widely_graded_outer_factor() {
        let policy = TolerancePolicy::default();
        for seed in 0..10 {
            let h = random_spd::<f64>(4, seed);
            let lx = LogSpectral::from_hermitian(&random_spd::<f64>(4, seed + 500), &policy)
                .unwrap()
                .powf(6.0);
            let x = lx.to_hermitian().unwrap();
            let expected = congruence(x.as_matrix(), &h).unwrap();
            let lh = LogSpectral::from_hermitian(&h, &policy).unwrap();
            assert!(lx.max_log() - lx.min_log() > lh.max_log() - lh.min_log());
            let got = lh.congruence(&lx).unwrap().to_hermitian().unwrap();
            assert!(rel_err(&got, &expected) < 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn congruence_matches_dense_real() {
        for seed in 0..20 {
            check_congruence::<f64>(seed);
        }
    }

    #[test]
    fn congruence_matches_dense_complex() {
        for seed in 0..20 {
            check_congruence::<Complex64>(seed);
        }
    }

    #[test]
    fn powers_match_dense() {
        let policy = TolerancePolicy::default();
        let h = random_spd::<f64>(3, 5);
        let ls = LogSpectral::from_hermitian(&h, &policy).unwrap();
        for e in [-1.5, -0.5, 0.3, 2.0] {
            let got = ls.powf(e).to_hermitian().unwrap();
            let expected = matrix_power(&h, e).unwrap();
            assert!(rel_err(&got, &expected) < 1e-12);
            assert!(ls.powf(e).logs().as_slice().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn extreme_grading_stays_accurate() {
        // (X H^p X)^{1/p} for huge p: eigenvalues of H^p span e^(p·log κ),
        // far outside f64, but the round trip through the log scale is exact
        // for commuting X = I and stays positive for general X.
        let policy = TolerancePolicy::default();
        let h = random_spd::<f64>(4, 11);
        let ls = LogSpectral::from_hermitian(&h, &policy).unwrap();
        let big = ls.powf(400.0);
        assert!(big.max_log() - big.min_log() > 700.0);
        let id = LogSpectral::identity(4);
        let back = big.congruence(&id).unwrap().powf(1.0 / 400.0);
        let got = back.to_hermitian().unwrap();
        assert!(rel_err(&got, &h) < 1e-10);

        let x = LogSpectral::from_hermitian(&random_spd::<f64>(4, 12), &policy).unwrap();
        let sandwiched = big.congruence(&x).unwrap();
        assert!(sandwiched.logs().iter().all(|l| l.is_finite()));
        // the product of the eigenvalues is preserved: det(XHX) = det(X)² det(H)
        let lhs: f64 = sandwiched.logs().iter().sum();
        let rhs: f64 = 2.0 * x.logs().iter().sum::<f64>() + big.logs().iter().sum::<f64>();
        assert!((lhs - rhs).abs() < 1e-9 * rhs.abs());
    }

    #[test]
    fn overflow_reported_on_materialization() {
        let h = HermitianMatrix::<f64>::from_diagonal(&[2.0, 3.0]);
        let ls = LogSpectral::from_hermitian(&h, &TolerancePolicy::default()).unwrap();
        assert!(matches!(
            ls.powf(1000.0).to_hermitian(),
            Err(SpectralError::Overflow { .. })
        ));
    }

    #[test]
    fn singular_input_rejected() {
        let h = HermitianMatrix::<f64>::from_diagonal(&[0.0, 3.0]);
        assert!(matches!(
            LogSpectral::from_hermitian(&h, &TolerancePolicy::default()),
            Err(SpectralError::NearSingular { .. })
        ));
    }
}
