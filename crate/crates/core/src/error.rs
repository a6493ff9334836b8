use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input string contains a symbol outside the machine's alphabet.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A machine spec could not be assembled (unknown names, bad shapes).
    #[error("invalid machine spec: {0}")]
    InvalidSpec(String),

    /// A spec failed validation; violations are listed in the message.
    #[error("machine failed validation:\n{0}")]
    Validation(String),

    /// Step semantics could not be carried out (head left the tape, missing transition, ...).
    #[error("semantics error: {0}")]
    Semantics(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    /// Both per-pass probabilities are zero; the machine never halts.
    #[error("non-halting: p_acc = p_rej = 0")]
    NonHalting,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
