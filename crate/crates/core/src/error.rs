use thiserror::Error;

/// Largest enumeration the brute-force routines will attempt, as a power of two.
pub const ENUMERATION_BUDGET_LOG2: u32 = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("enumeration of 2^{needed} {what} exceeds the 2^{limit} budget")]
    Budget {
        what: &'static str,
        needed: u32,
        limit: u32,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("degenerate state: {0}")]
    Degenerate(String),

    #[error("target function is identically zero")]
    NoDistribution,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_budget(what: &'static str, needed_log2: u32) -> Result<()> {
    if needed_log2 > ENUMERATION_BUDGET_LOG2 {
        return Err(Error::Budget {
            what,
            needed: needed_log2,
            limit: ENUMERATION_BUDGET_LOG2,
        });
    }
    Ok(())
}

pub(crate) fn invalid(message: impl Into<String>) -> Error {
    Error::InvalidParameter(message.into())
}
