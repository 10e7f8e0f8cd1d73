//! Error type shared by all library operations.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("side mismatch: {0}")]
    SideMismatch(String),

    #[error("term budget exceeded: operation needs {needed} terms, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("missing coordinate for support position {0}")]
    MissingCoordinate(u64),

    #[error("support violation: {0}")]
    SupportViolation(String),

    #[error("leading term is zero: {0}")]
    ZeroLeadingTerm(String),

    #[error("polynomial has a constant term")]
    ConstantTerm,

    #[error("finite field construction failed: {0}")]
    FieldConstruction(String),

    #[error("invalid series data: {0}")]
    InvalidSeries(String),

    #[error("certificate mismatch: {0}")]
    CertificateMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
