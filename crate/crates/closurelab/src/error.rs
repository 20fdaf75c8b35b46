use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain size must be at least 1")]
    EmptyDomain,

    #[error("row {row} has length {got}, expected domain size {expected}")]
    RowLength {
        row: usize,
        got: usize,
        expected: usize,
    },

    #[error("point index {index} out of range for domain of size {size}")]
    InvalidPoint { index: usize, size: usize },

    #[error("duplicate point index {index} in projection set")]
    DuplicatePoint { index: usize },

    #[error("classes live on different domains ({0} vs {1})")]
    DomainMismatch(usize, usize),

    #[error("operation requires a nonempty class")]
    EmptyClass,

    #[error("aggregator arity {arity} does not match {classes} classes")]
    ArityMismatch { arity: usize, classes: usize },

    #[error("aggregator arity {0} exceeds the configured cap {1}")]
    ArityCap(usize, usize),

    #[error("truth table length {got} does not match 2^{arity}")]
    TruthTableLength { got: usize, arity: usize },

    #[error("resource guardrail exceeded: {0}")]
    ResourceLimit(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("sequence is not realizable by the class")]
    NotRealizable,

    #[error("missing parameter: {0}")]
    MissingParam(&'static str),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
