use thiserror::Error;

use crate::graph::Violation;

#[derive(Debug, Error)]
pub enum ArrivalError {
    #[error("invalid switch graph: {}", join_violations(.0))]
    InvalidGraph(Vec<Violation>),

    #[error("malformed graph document at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("flow has {found} entries but the graph has {expected} edge slots")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("counter overflow: {0}")]
    Overflow(&'static str),

    #[error("prefix beyond termination: requested {requested} steps, run terminated after {steps}")]
    PrefixBeyondTermination { requested: u64, steps: u64 },

    #[error("requested prefix of {requested} steps exceeds the step budget {budget}")]
    PrefixBeyondBudget { requested: u64, budget: u64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("completion run did not terminate within {budget} steps")]
    CompletionDidNotTerminate { budget: u64 },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("walk exhausted its budget of {budget} steps without reaching a local optimum")]
    WalkBudgetExhausted { budget: u64 },

    #[error("non-conforming local optimum at vertex {vertex}: {reason}")]
    NonConformingOptimum { vertex: usize, reason: String },

    #[error("malformed bit string: {0}")]
    BitString(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, ArrivalError>;
