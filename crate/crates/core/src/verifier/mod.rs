//! Numerical experiments on chain inequalities: instance generators, p-grids,
//! hypothesis campaigns, the Löwner–Heinz and `Q ≤ I` probes, replication of
//! the proof steps, and the counterexample search.

mod campaign;
mod grid;
mod probes;
mod proof;
mod search;
mod tuple;

pub use campaign::{
    check_conclusion, check_hypotheses, compare, CampaignOptions, CampaignReport, ParamTemplate,
    Row, RowVerdict, WeightPolicy,
};
pub use grid::{latin_hypercube, PGrid, DEFAULT_MAX_POINTS};
pub use probes::{
    probe_loewner_heinz, probe_theorem_1_2, HeinzReport, HeinzRow, ImplicationStatus, SideOfOne,
    Theorem12Report, Theorem12Row,
};
pub use proof::{
    limit_probe, replicate_proof_steps, LimitReport, ProofReport, ProofRow, LIMIT_SEQUENCE,
};
pub use search::{
    search_counterexample, Finding, SearchConfig, SearchOutcome, SearchStats, TupleSource,
};
pub use tuple::{
    gen_ordered_tuple, gen_random_tuple, gen_unordered_tuple, instance_seed, OperatorTuple, TupleFile,
};

use thiserror::Error;

use crate::chain::ChainError;
use crate::dsl::EvalError;
use crate::spectral::SpectralError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifierError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no unordered tuple found in {attempts} attempts")]
    BudgetExhausted { attempts: usize },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}
