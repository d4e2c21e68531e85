use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("arity mismatch for `{name}`: declared {expected}, used with {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },

    #[error("invalid position {0}")]
    InvalidPosition(String),

    #[error("invalid signature: {0}")]
    Signature(String),

    #[error("invalid automaton:\n  {}", .0.join("\n  "))]
    Invalid(Vec<String>),

    #[error("incompatible operands: {0}")]
    Incompatible(String),

    /// An operation the theory rules out (undecidable or not closed).
    #[error("unsupported by theory: {0}")]
    Unsupported(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
