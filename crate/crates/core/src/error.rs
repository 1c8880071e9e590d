//! Crate error type.

use thiserror::Error;

/// Errors surfaced by instance validation, belief computation and solvers.
#[derive(Debug, Error)]
pub enum SgiaError {
    /// A tensor had the wrong number of entries for the declared sizes.
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        got: usize,
    },

    /// An instance failed structural validation; the report lists every
    /// violated constraint with coordinates.
    #[error("invalid instance: {0}")]
    InvalidInstance(crate::game::ValidationReport),

    /// A posterior was requested for a type that has zero probability at the
    /// given history and cognition choice, so Bayes' rule does not apply.
    #[error(
        "type {type_index} of agent {agent} has zero probability at history {history} under cognition choice {cognition}"
    )]
    ZeroProbabilityType {
        agent: usize,
        type_index: usize,
        history: usize,
        cognition: usize,
    },

    /// A caller-supplied argument violated an interface contract.
    #[error("contract violation: {0}")]
    Contract(String),

    /// The exhaustive enumerator refused to start because the profile count
    /// exceeds the configured budget.
    #[error("enumeration budget exceeded: {required} profiles requested, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    /// A linear system arising in policy evaluation was numerically singular.
    #[error("singular linear system while solving {context}")]
    SingularSystem { context: String },

    /// Input file could not be read or written.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Input file was not valid JSON.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// Input file parsed as JSON but not as a known schema.
    #[error("format error: {0}")]
    Format(String),
}

impl SgiaError {
    /// Shorthand for a contract violation with a formatted message.
    pub fn contract(msg: impl Into<String>) -> Self {
        SgiaError::Contract(msg.into())
    }
}
