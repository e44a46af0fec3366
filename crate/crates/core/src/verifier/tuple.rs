use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{compare, VerifierError};
use crate::spectral::{
    spectral_decompose, HermitianMatrix, MatrixFile, Scalar, SpectralError, TolerancePolicy,
};

/// Strictly positive `A_1..A_k` of a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorTuple<T: Scalar = f64> {
    matrices: Vec<HermitianMatrix<T>>,
    lambda_min: Vec<f64>,
    lambda_max: Vec<f64>,
}

/// Serialized form: one matrix file per member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TupleFile {
    pub matrices: Vec<MatrixFile>,
}

impl<T: Scalar> OperatorTuple<T> {
    pub fn new(matrices: Vec<HermitianMatrix<T>>, policy: &TolerancePolicy) -> Result<Self, VerifierError> {
        if matrices.len() < 2 {
            return Err(VerifierError::InvalidArgument(format!(
                "a tuple needs k ≥ 2 matrices, got {}",
                matrices.len()
            )));
        }
        let dim = matrices[0].dim();
        let mut lambda_min = Vec::with_capacity(matrices.len());
        let mut lambda_max = Vec::with_capacity(matrices.len());
        for (i, m) in matrices.iter().enumerate() {
            if m.dim() != dim {
                return Err(SpectralError::DimensionMismatch {
                    left: dim,
                    right: m.dim(),
                }
                .into());
            }
            let d = spectral_decompose(m)?;
            let eps = policy.eps_pd(d.spectral_norm());
            if d.min_eigenvalue() <= eps {
                return Err(VerifierError::Precondition(format!(
                    "A{} is not strictly positive (λ_min = {:e})",
                    i + 1,
                    d.min_eigenvalue()
                )));
            }
            lambda_min.push(d.min_eigenvalue());
            lambda_max.push(d.max_eigenvalue());
        }
        Ok(Self {
            matrices,
            lambda_min,
            lambda_max,
        })
    }

    pub fn k(&self) -> usize {
        self.matrices.len()
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].dim()
    }

    pub fn matrices(&self) -> &[HermitianMatrix<T>] {
        &self.matrices
    }

    /// `A_i`, 1-based.
    pub fn get(&self, i: usize) -> &HermitianMatrix<T> {
        &self.matrices[i - 1]
    }

    /// `λ_min(A_i)`, 1-based.
    pub fn lambda_min(&self, i: usize) -> f64 {
        self.lambda_min[i - 1]
    }

    /// `‖A_i‖ = λ_max(A_i)`, 1-based.
    pub fn norm(&self, i: usize) -> f64 {
        self.lambda_max[i - 1]
    }

    /// `δ_i = 1/λ_min(A_i)`, so that `A_i ≥ (1/δ_i) I`.
    pub fn delta(&self, i: usize) -> f64 {
        1.0 / self.lambda_min(i)
    }

    pub fn scaled(&self, c: f64) -> Self {
        assert!(c > 0.0 && c.is_finite(), "scale factor must be positive");
        Self {
            matrices: self.matrices.iter().map(|m| m.scale(c)).collect(),
            lambda_min: self.lambda_min.iter().map(|l| l * c).collect(),
            lambda_max: self.lambda_max.iter().map(|l| l * c).collect(),
        }
    }

    /// Rescales so that the largest norm in the tuple equals `ceiling`.
    pub fn normalized(&self, ceiling: f64) -> Self {
        let top = self.lambda_max.iter().copied().fold(0.0, f64::max);
        self.scaled(ceiling / top)
    }

    /// The first `m` members.
    pub fn truncated(&self, m: usize) -> Self {
        assert!((2..=self.k()).contains(&m), "truncation keeps 2..=k members");
        Self {
            matrices: self.matrices[..m].to_vec(),
            lambda_min: self.lambda_min[..m].to_vec(),
            lambda_max: self.lambda_max[..m].to_vec(),
        }
    }

    pub fn to_file(&self) -> TupleFile {
        TupleFile {
            matrices: self.matrices.iter().map(HermitianMatrix::to_file).collect(),
        }
    }

    pub fn from_file(file: &TupleFile, policy: &TolerancePolicy) -> Result<Self, VerifierError> {
        let matrices = file
            .matrices
            .iter()
            .map(HermitianMatrix::from_file)
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(matrices, policy)
    }
}

/// Per-instance seed derived from the master seed (splitmix64 finalizer).
pub fn instance_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn gram<T: Scalar>(dim: usize, rng: &mut impl Rng) -> DMatrix<T> {
    let g = DMatrix::from_fn(dim, dim, |_, _| T::sample_normal(rng));
    g.adjoint() * g
}

fn check_shape(k: usize, dim: usize) -> Result<(), VerifierError> {
    if k < 2 || dim < 1 {
        return Err(VerifierError::InvalidArgument(format!(
            "need k ≥ 2 and dim ≥ 1, got k = {k}, dim = {dim}"
        )));
    }
    Ok(())
}

/// Ordered tuple `A_1 ≤ A_2 ≤ … ≤ A_k`: `A_1 = G*G + 0.1 I` and
/// `A_{i+1} = A_i + H_i*H_i + gap I`.
pub fn gen_ordered_tuple<T: Scalar>(
    k: usize,
    dim: usize,
    seed: u64,
    gap: f64,
) -> Result<OperatorTuple<T>, VerifierError> {
    check_shape(k, dim)?;
    if !(gap >= 0.0) || !gap.is_finite() {
        return Err(VerifierError::InvalidArgument(format!("gap must be ≥ 0, got {gap}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift = |c: f64| DMatrix::<T>::identity(dim, dim) * T::from_real(c);
    let mut current = gram::<T>(dim, &mut rng) + shift(0.1);
    let mut matrices = vec![HermitianMatrix::symmetrized(current.clone())];
    for _ in 1..k {
        current = current + gram::<T>(dim, &mut rng) + shift(gap);
        matrices.push(HermitianMatrix::symmetrized(current.clone()));
    }
    OperatorTuple::new(matrices, &TolerancePolicy::default())
}

/// Independent strictly positive members `G_i*G_i + 0.1 I`.
pub fn gen_random_tuple<T: Scalar>(
    k: usize,
    dim: usize,
    seed: u64,
) -> Result<OperatorTuple<T>, VerifierError> {
    check_shape(k, dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let matrices = (0..k)
        .map(|_| {
            HermitianMatrix::symmetrized(
                gram::<T>(dim, &mut rng) + DMatrix::identity(dim, dim) * T::from_real(0.1),
            )
        })
        .collect();
    OperatorTuple::new(matrices, &TolerancePolicy::default())
}

/// Random tuple with at least one adjacent pair where `A_{i+1} ≥ A_i` fails.
/// Returns the tuple and the first such `i` (1-based).
pub fn gen_unordered_tuple<T: Scalar>(
    k: usize,
    dim: usize,
    seed: u64,
    budget: usize,
) -> Result<(OperatorTuple<T>, usize), VerifierError> {
    check_shape(k, dim)?;
    let policy = TolerancePolicy::default();
    for attempt in 0..budget {
        let tuple = gen_random_tuple::<T>(k, dim, instance_seed(seed, attempt as u64))?;
        for i in 1..k {
            if !compare(tuple.get(i + 1), tuple.get(i), &policy)?.is_ge() {
                return Ok((tuple, i));
            }
        }
    }
    Err(VerifierError::BudgetExhausted { attempts: budget })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn ordered_margins_respect_gap() {
        let policy = TolerancePolicy::default();
        for seed in 0..10 {
            let t = gen_ordered_tuple::<f64>(4, 3, seed, 0.25).unwrap();
            for i in 1..4 {
                let v = compare(t.get(i + 1), t.get(i), &policy).unwrap();
                assert!(v.ge_margin >= 0.25 - 1e-10, "seed {seed}: {}", v.ge_margin);
            }
        }
    }

    #[test]
    fn generator_is_deterministic() {
        let a = gen_ordered_tuple::<f64>(3, 2, 42, 0.0).unwrap();
        let b = gen_ordered_tuple::<f64>(3, 2, 42, 0.0).unwrap();
        assert_eq!(a, b);
        let c = gen_ordered_tuple::<f64>(3, 2, 43, 0.0).unwrap();
        assert_ne!(a, c);
        let z = gen_ordered_tuple::<Complex64>(3, 2, 42, 0.0).unwrap();
        assert_eq!(z.k(), 3);
    }

    #[test]
    fn unordered_has_a_violation() {
        for seed in 0..5 {
            let (t, i) = gen_unordered_tuple::<f64>(3, 1, seed, 100).unwrap();
            assert!(t.get(i + 1).as_matrix()[(0, 0)] < t.get(i).as_matrix()[(0, 0)]);
        }
        assert!(gen_unordered_tuple::<f64>(3, 2, 0, 0).is_err());
    }

    #[test]
    fn rejects_non_positive_members() {
        let policy = TolerancePolicy::default();
        let singular = HermitianMatrix::from_row_slice(2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        let good = HermitianMatrix::identity(2);
        assert!(OperatorTuple::new(vec![good.clone(), singular], &policy).is_err());
        assert!(OperatorTuple::new(vec![good.clone()], &policy).is_err());
        let t = OperatorTuple::new(vec![good.clone(), good.scale(3.0)], &policy).unwrap();
        assert_eq!(t.delta(1), 1.0);
        assert!((t.normalized(0.5).norm(2) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn file_round_trip() {
        let policy = TolerancePolicy::default();
        let t = gen_ordered_tuple::<f64>(3, 2, 7, 0.1).unwrap();
        let json = serde_json::to_string(&t.to_file()).unwrap();
        let back = OperatorTuple::from_file(&serde_json::from_str(&json).unwrap(), &policy).unwrap();
        for i in 1..=3 {
            assert_eq!(back.get(i), t.get(i));
        }
    }
}
