use nalgebra::DMatrix;
use thiserror::Error;

use super::Environment;
use crate::chain::{Name, OperatorWord, ScalarExpr};
use crate::spectral::{
    matrix_power_with, spectral_decompose, HermitianMatrix, LogSpectral, Scalar, SpectralError,
};

/// Products are accepted as self-adjoint when their Hermiticity residual is
/// within this multiple of their norm.
const COERCE_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound scalar `{0}`")]
    UnboundName(Name),
    #[error("unbound symbol A{0}")]
    UnboundSymbol(usize),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("value is not self-adjoint (residual {residual:e} > {bound:e}){}",
        if *.palindromic { "; internal consistency failure for a palindromic word" } else { "" })]
    NotSelfAdjoint {
        residual: f64,
        bound: f64,
        palindromic: bool,
    },
    #[error("non-integer power {exponent} of a non-self-adjoint value")]
    NonHermitianPower { exponent: f64 },
    #[error("singular value raised to the negative power {exponent}")]
    SingularInverse { exponent: f64 },
}

enum Value<T: Scalar> {
    Positive(LogSpectral<T>),
    Dense(DMatrix<T>),
}

impl<T: Scalar> Value<T> {
    fn into_dense(self) -> Result<DMatrix<T>, EvalError> {
        match self {
            Value::Positive(l) => Ok(l.to_hermitian()?.into_inner()),
            Value::Dense(m) => Ok(m),
        }
    }
}

/// Evaluates a self-adjoint word to a [`HermitianMatrix`].
///
/// Strictly positive intermediates stay in log-spectral form, so nested
/// powers whose eigenvalues leave the `f64` range in the middle of the word
/// still evaluate accurately as long as the final value is representable.
/// Palindromic products `X Y X` use the graded congruence; other products are
/// multiplied out left to right. A value whose Hermiticity residual exceeds
/// `1e-8` of its norm is an error.
pub fn evaluate<T: Scalar>(
    word: &OperatorWord,
    env: &Environment<T>,
) -> Result<HermitianMatrix<T>, EvalError> {
    match eval_value(word, env)? {
        Value::Positive(l) => Ok(l.to_hermitian()?),
        Value::Dense(m) => coerce(m).map_err(|e| match e {
            SpectralError::NotHermitian { residual, bound } => EvalError::NotSelfAdjoint {
                residual,
                bound,
                palindromic: word.is_palindromic(),
            },
            other => other.into(),
        }),
    }
}

/// Evaluates any word, self-adjoint or not, to a dense matrix.
pub fn evaluate_general<T: Scalar>(
    word: &OperatorWord,
    env: &Environment<T>,
) -> Result<DMatrix<T>, EvalError> {
    eval_value(word, env)?.into_dense()
}

fn coerce<T: Scalar>(m: DMatrix<T>) -> Result<HermitianMatrix<T>, SpectralError> {
    HermitianMatrix::with_tolerance(m, COERCE_REL_TOL)
}

fn exponent<T: Scalar>(e: &ScalarExpr, env: &Environment<T>) -> Result<f64, EvalError> {
    e.eval(|n| env.scalar(n)).map_err(EvalError::UnboundName)
}

fn eval_value<T: Scalar>(word: &OperatorWord, env: &Environment<T>) -> Result<Value<T>, EvalError> {
    match word {
        OperatorWord::Symbol { index, exponent: e } => {
            let alpha = exponent(e, env)?;
            if let Some(l) = env.positive(*index) {
                return Ok(Value::Positive(l.powf(alpha)));
            }
            let h = env.matrix(*index).ok_or(EvalError::UnboundSymbol(*index))?;
            Ok(Value::Dense(matrix_power_with(h, alpha, env.policy())?.into_inner()))
        }
        OperatorWord::Power(child, e) => {
            let alpha = exponent(e, env)?;
            power(eval_value(child, env)?, alpha, env)
        }
        OperatorWord::Product(fs) => {
            if fs.len() % 2 == 1 && word.is_palindromic() {
                sandwich(fs, env)
            } else {
                let mut acc: Option<DMatrix<T>> = None;
                for f in fs {
                    let m = eval_value(f, env)?.into_dense()?;
                    acc = Some(match acc {
                        None => m,
                        Some(a) => a * m,
                    });
                }
                Ok(Value::Dense(acc.expect("products are non-empty")))
            }
        }
    }
}

/// `f_0 (f_1 (... f_mid ...) f_1) f_0` for a palindromic factor list.
fn sandwich<T: Scalar>(fs: &[OperatorWord], env: &Environment<T>) -> Result<Value<T>, EvalError> {
    let mid = fs.len() / 2;
    let mut core = eval_value(&fs[mid], env)?;
    for f in fs[..mid].iter().rev() {
        let x = eval_value(f, env)?;
        core = match (x, core) {
            (Value::Positive(x), Value::Positive(c)) => Value::Positive(c.congruence(&x)?),
            (x, c) => {
                let x = x.into_dense()?;
                Value::Dense(&x * c.into_dense()? * &x)
            }
        };
    }
    Ok(core)
}

fn power<T: Scalar>(v: Value<T>, alpha: f64, env: &Environment<T>) -> Result<Value<T>, EvalError> {
    let m = match v {
        Value::Positive(l) => return Ok(Value::Positive(l.powf(alpha))),
        Value::Dense(m) => m,
    };
    match coerce(m.clone()) {
        Ok(h) => {
            let d = spectral_decompose(&h)?;
            match LogSpectral::from_decomposition(&d, env.policy()) {
                Ok(l) => Ok(Value::Positive(l.powf(alpha))),
                Err(SpectralError::NearSingular { .. }) => {
                    Ok(Value::Dense(matrix_power_with(&h, alpha, env.policy())?.into_inner()))
                }
                Err(e) => Err(e.into()),
            }
        }
        Err(SpectralError::NotHermitian { .. }) => integer_power(m, alpha),
        Err(e) => Err(e.into()),
    }
}

fn integer_power<T: Scalar>(m: DMatrix<T>, alpha: f64) -> Result<Value<T>, EvalError> {
    if alpha.fract() != 0.0 || alpha.abs() > u32::MAX as f64 {
        return Err(EvalError::NonHermitianPower { exponent: alpha });
    }
    let base = if alpha < 0.0 {
        m.try_inverse()
            .ok_or(EvalError::SingularInverse { exponent: alpha })?
    } else {
        m
    };
    let mut k = alpha.abs() as u64;
    let mut result = DMatrix::identity(base.nrows(), base.ncols());
    let mut sq = base;
    while k > 0 {
        if k & 1 == 1 {
            result = &result * &sq;
        }
        k >>= 1;
        if k > 0 {
            sq = &sq * &sq;
        }
    }
    Ok(Value::Dense(result))
}
