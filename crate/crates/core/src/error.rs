//! Crate-wide error type.
//!
//! The variants map one-to-one onto the CLI exit codes: precondition
//! violations (2), exhausted search budgets (3), and failed lemma-level
//! assertions (4) — the last one being the interesting outcome.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An operation's stated precondition does not hold for the input.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A budget-limited exact search ran out of nodes/retries.
    #[error("budget exhausted: {0}")]
    Budget(String),

    /// A paper-level proposition failed on an instance where it must hold.
    #[error("lemma assertion failed: {0}")]
    Lemma(String),

    /// A division the decomposition algorithm assumes integral is not.
    #[error("non-integral division: {0}")]
    NonIntegral(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 precondition, 3 budget, 4 lemma.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Precondition(_) | Error::NonIntegral(_) | Error::Parse(_) | Error::Io(_) => 2,
            Error::Budget(_) => 3,
            Error::Lemma(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
