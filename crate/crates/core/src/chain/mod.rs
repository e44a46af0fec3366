//! Combinatorics of the ascending/descending chain inequalities: parameter
//! sets, the ψ exponent aggregate, index and exponent schedules, and the
//! builders that turn them into operator words.

mod build;
mod params;
mod schedule;
mod word;

pub use build::{build_chain, hypothesis_set, ChainInequality, Direction, Family};
pub use params::{necessity_weight, necessity_weight_for, psi_exponent, ChainShape, ParamSet};
pub use schedule::{ascending_index, descending_index, layer_exponent};
pub use word::{Literal, Name, OperatorWord, ScalarExpr, SignedTerm, Term};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChainError {
    #[error("k must be at least 2, got {0}")]
    InvalidK(usize),
    #[error("k = {k} is neither 2n nor 2n+1 for n = {n}")]
    ShapeMismatch { n: usize, k: usize },
    #[error("{what}: expected length {expected}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{what} = {value} is outside {range}")]
    OutOfRange {
        what: String,
        value: f64,
        range: &'static str,
    },
    #[error("r = {r} must exceed t_n = {t_n}")]
    RNotAboveT { r: f64, t_n: f64 },
    #[error("{what} {value} out of range {lo}..={hi}")]
    IndexOutOfRange {
        what: &'static str,
        value: usize,
        lo: usize,
        hi: usize,
    },
    #[error("ψ - t_n + r = {0} is not positive")]
    DegenerateWeight(f64),
}
