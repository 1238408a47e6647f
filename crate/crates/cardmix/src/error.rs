use thiserror::Error;

/// Errors produced by the library.
///
/// `InternalContract` signals a violated invariant that the underlying
/// combinatorics guarantee cannot happen; it is surfaced loudly rather
/// than swallowed, and maps to a distinct process exit code in the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("deck sizes differ: {0} vs {1}")]
    SizeMismatch(usize, usize),

    #[error("sequence/mask lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("incomplete generating sequence: transposition ({0} {1}) never occurs")]
    IncompleteGeneratingSequence(usize, usize),

    #[error("state space too large for exact {what}: n = {n} exceeds guard {guard}")]
    GuardExceeded {
        what: &'static str,
        n: usize,
        guard: usize,
    },

    #[error("record impossible in state: {0}")]
    InfeasibleRecord(String),

    #[error("conditioning event has zero mass (empty condition)")]
    EmptyCondition,

    #[error("stopping rule unsatisfied: {0}")]
    RuleUnsatisfied(&'static str),

    #[error("path not in image of the mutation map: {0}")]
    NotInImage(String),

    #[error("relabel time {time} out of range for path of length {len}")]
    TimeOutOfRange { time: usize, len: usize },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("internal contract violation: {0}")]
    InternalContract(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
