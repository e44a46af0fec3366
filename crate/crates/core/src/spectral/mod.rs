//! Hermitian matrix arithmetic and the Löwner order.

mod decomp;
mod graded;
mod io;
mod matrix;
mod order;

pub use decomp::{
    congruence, matrix_power, matrix_power_with, operator_norm, positivity_margin, psd_power,
    spectral_decompose, SpectralDecomposition,
};
pub use graded::LogSpectral;
pub use io::{Entries, MatrixFile};
pub use matrix::HermitianMatrix;
pub use order::{loewner_compare, Relation, Verdict};

use nalgebra::ComplexField;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Scalar field of the matrix entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Real => f.write_str("real"),
            Field::Complex => f.write_str("complex"),
        }
    }
}

/// Entry type of a [`HermitianMatrix`]: `f64` (real symmetric) or
/// `Complex64` (complex Hermitian).
pub trait Scalar:
    ComplexField<RealField = f64> + Copy + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    const FIELD: Field;

    /// Builds an entry from real and imaginary parts. Returns `None` when the
    /// field cannot hold the value (a non-zero imaginary part for reals).
    fn from_parts(re: f64, im: f64) -> Option<Self>;

    fn parts(self) -> (f64, f64);

    /// Standard Gaussian sample; complex entries have unit total variance.
    fn sample_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

impl Scalar for f64 {
    const FIELD: Field = Field::Real;

    fn from_parts(re: f64, im: f64) -> Option<Self> {
        (im == 0.0).then_some(re)
    }

    fn parts(self) -> (f64, f64) {
        (self, 0.0)
    }

    fn sample_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }
}

impl Scalar for Complex64 {
    const FIELD: Field = Field::Complex;

    fn from_parts(re: f64, im: f64) -> Option<Self> {
        Some(Complex64::new(re, im))
    }

    fn parts(self) -> (f64, f64) {
        (self.re, self.im)
    }

    fn sample_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix dimension must be at least 1")]
    Empty,
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix is not Hermitian: residual {residual:e} exceeds {bound:e}")]
    NotHermitian { residual: f64, bound: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("eigen-solver did not converge (dim {dim}, condition estimate {condition_estimate:e})")]
    NoConvergence { dim: usize, condition_estimate: f64 },
    #[error(
        "matrix is near-singular for exponent {alpha}: λ_min = {min_eigenvalue:e} <= eps_pd = {eps_pd:e}"
    )]
    NearSingular {
        min_eigenvalue: f64,
        eps_pd: f64,
        alpha: f64,
    },
    #[error("matrix is not positive semidefinite: λ_min = {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },
    #[error("result overflows f64: log of largest eigenvalue is {log_max}")]
    Overflow { log_max: f64 },
    #[error("matrix file: {0}")]
    Format(String),
}

/// Scale-aware tolerances used by every comparison and by the positivity gate
/// of negative or fractional powers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    /// Löwner comparisons use `tol_rel * max(1, ‖P‖, ‖Q‖)`.
    pub tol_rel: f64,
    /// Negative or fractional powers require `λ_min > eps_pd_rel * max(1, ‖H‖)`.
    pub eps_pd_rel: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            tol_rel: 1e-9,
            eps_pd_rel: 1e-10,
        }
    }
}

impl TolerancePolicy {
    pub fn scale(norms: &[f64]) -> f64 {
        norms.iter().copied().fold(1.0, f64::max)
    }

    /// Absolute tolerance for comparing operators with the given spectral norms.
    pub fn comparison_tol(&self, norms: &[f64]) -> f64 {
        self.tol_rel * Self::scale(norms)
    }

    pub fn eps_pd(&self, norm: f64) -> f64 {
        self.eps_pd_rel * norm.max(1.0)
    }
}
