//! Numerical laboratory for Löwner-order chains of strictly positive matrices.
//!
//! The crate is split into four layers:
//!
//! * [`spectral`] – Hermitian matrices, spectral decomposition, real matrix
//!   powers, congruences and Löwner comparisons with an explicit tolerance
//!   policy, plus a log-spectral representation for strongly graded operators.
//! * [`chain`] – the parameter set, the ψ recurrence, index/exponent schedules
//!   and builders for the ascending/descending chain inequalities.
//! * [`dsl`] – a small textual language for operator words with a parser,
//!   canonical printer and an evaluator against a matrix environment.
//! * [`verifier`] – instance generators, hypothesis/conclusion checks, probes,
//!   proof-step replication and the counterexample search.

pub mod chain;
pub mod dsl;
pub mod spectral;
pub mod verifier;

pub use chain::{
    build_chain, hypothesis_set, necessity_weight, psi_exponent, ChainInequality, ChainShape,
    Direction, Family, Name, OperatorWord, ParamSet, ScalarExpr,
};
pub use dsl::{evaluate, parse, pretty_print, Environment, Statement};
pub use spectral::{
    loewner_compare, matrix_power, spectral_decompose, Field, HermitianMatrix, Relation, Scalar,
    SpectralDecomposition, SpectralError, TolerancePolicy, Verdict,
};
