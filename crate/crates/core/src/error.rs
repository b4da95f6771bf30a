//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("state space m^N = {levels}^{sites} does not fit in the index type")]
    StateSpaceOverflow { sites: usize, levels: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("index {index} out of range for {what} (limit {limit})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("builder precondition violated: {0}")]
    BuilderPrecondition(String),

    #[error("condition set mentions site {site} more than once")]
    DuplicateConditionSite { site: usize },

    #[error("invalid transition: {0}")]
    InvalidTransition(String),

    #[error("negative rate {rate} for transition `{name}`")]
    NegativeRate { name: String, rate: f64 },

    #[error("all transition rates are zero; the chain has no dynamics")]
    AllRatesZero,

    #[error("model has no transitions")]
    EmptyModel,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix dimensions overflow the index type")]
    DimensionOverflow,

    #[error("allowable state set is empty")]
    EmptyStateSet,

    #[error("state set not closed: transition `{transition}` maps state {state} to {successor}, which is outside the set")]
    ClosureViolation {
        state: String,
        transition: String,
        successor: String,
    },

    #[error("column {column} sums to {sum}, not 1; matrix is not column-stochastic")]
    NotStochastic { column: usize, sum: f64 },

    #[error("solver did not converge within {iterations} iterations (last residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("dimension {dim} exceeds the direct-solver cap {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },

    #[error("distributions have mismatched dimension or state ordering")]
    OrderingMismatch,

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
}
