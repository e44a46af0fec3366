use std::collections::BTreeMap;

use super::EvalError;
use crate::chain::{Name, ParamSet};
use crate::spectral::{HermitianMatrix, LogSpectral, Scalar, SpectralError, TolerancePolicy};

#[derive(Debug, Clone)]
struct Binding<T: Scalar> {
    matrix: HermitianMatrix<T>,
    /// Present when the matrix is strictly positive.
    positive: Option<LogSpectral<T>>,
}

/// Bindings for scalar names and for the symbols `A_i`.
///
/// Each bound matrix is decomposed once; strictly positive ones keep their
/// log-spectral form so that every power of them is exact on the log scale.
#[derive(Debug, Clone)]
pub struct Environment<T: Scalar = f64> {
    scalars: BTreeMap<Name, f64>,
    symbols: BTreeMap<usize, Binding<T>>,
    policy: TolerancePolicy,
}

impl<T: Scalar> Default for Environment<T> {
    fn default() -> Self {
        Self::new(TolerancePolicy::default())
    }
}

impl<T: Scalar> Environment<T> {
    pub fn new(policy: TolerancePolicy) -> Self {
        Self {
            scalars: BTreeMap::new(),
            symbols: BTreeMap::new(),
            policy,
        }
    }

    /// Binds `A_1..A_k` to `tuple` and every scalar of `params`.
    pub fn from_tuple(
        tuple: &[HermitianMatrix<T>],
        params: Option<&ParamSet>,
        policy: TolerancePolicy,
    ) -> Result<Self, EvalError> {
        let mut env = Self::new(policy);
        for (i, h) in tuple.iter().enumerate() {
            env.bind_matrix(i + 1, h.clone())?;
        }
        if let Some(p) = params {
            env.bind_params(p);
        }
        Ok(env)
    }

    pub fn policy(&self) -> &TolerancePolicy {
        &self.policy
    }

    pub fn bind_scalar(&mut self, name: Name, value: f64) -> &mut Self {
        self.scalars.insert(name, value);
        self
    }

    pub fn bind_params(&mut self, params: &ParamSet) -> &mut Self {
        for (i, &t) in params.t.iter().enumerate() {
            self.scalars.insert(Name::T(i + 1), t);
        }
        for (i, &p) in params.p.iter().enumerate() {
            self.scalars.insert(Name::P(i + 1), p);
        }
        for (i, &w) in params.w.iter().enumerate() {
            self.scalars.insert(Name::W(i + 1), w);
        }
        self.scalars.insert(Name::R, params.r);
        self
    }

    pub fn bind_matrix(&mut self, index: usize, matrix: HermitianMatrix<T>) -> Result<&mut Self, EvalError> {
        if let Some(d) = self.dim() {
            if d != matrix.dim() {
                return Err(SpectralError::DimensionMismatch {
                    left: d,
                    right: matrix.dim(),
                }
                .into());
            }
        }
        let positive = match LogSpectral::from_hermitian(&matrix, &self.policy) {
            Ok(l) => Some(l),
            Err(SpectralError::NearSingular { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        self.symbols.insert(index, Binding { matrix, positive });
        Ok(self)
    }

    pub fn scalar(&self, name: Name) -> Option<f64> {
        self.scalars.get(&name).copied()
    }

    pub fn matrix(&self, index: usize) -> Option<&HermitianMatrix<T>> {
        self.symbols.get(&index).map(|b| &b.matrix)
    }

    pub(crate) fn positive(&self, index: usize) -> Option<&LogSpectral<T>> {
        self.symbols.get(&index).and_then(|b| b.positive.as_ref())
    }

    /// Common dimension of the bound matrices.
    pub fn dim(&self) -> Option<usize> {
        self.symbols.values().next().map(|b| b.matrix.dim())
    }
}
