//! Error type shared by the whole crate.

use thiserror::Error;

/// Errors reported by the XP formalism routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum XpError {
    /// Operator text or a code file could not be parsed.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// Operators with different precision or qubit count were combined.
    #[error("shape mismatch: {0}")]
    Mismatch(String),

    /// The stabiliser group contains a nontrivial phase multiple of the identity.
    #[error("empty codespace: w^{q} I is in the stabiliser group")]
    EmptyCodespace { q: i64 },

    /// The stabiliser group has no common +1 eigenvector for another reason.
    #[error("empty codespace: the diagonal stabilisers have no common +1 eigenvector")]
    NoSupport,

    /// A computation was refused because of a size limit.
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    /// A search ran past its node budget.
    #[error("search budget of {budget} nodes exhausted")]
    SearchBudget { budget: u64 },

    /// An operator expected to be logical does not preserve the codespace.
    #[error("operator {0} is not a logical operator of the code")]
    NotLogical(String),

    /// The spanning set is not the codespace of an XP code at this precision.
    #[error("not an XP codespace at this precision: {0}")]
    NotXpCodespace(String),

    /// The requested operation needs an XP-regular code.
    #[error("code is not XP-regular (|E_q| = {0})")]
    NotRegular(usize),

    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, XpError>;
