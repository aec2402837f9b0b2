//! Crate-wide error type.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Construction or call arguments violate a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A closed-form expression was requested for a configuration it does not
    /// cover (e.g. different contact-time distributions at the two stops).
    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    /// Input lies outside the domain a numeric routine can handle.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numeric routine produced values outside its sanity bounds.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// A caller broke an ordering or state contract.
    #[error("contract violation: {0}")]
    ContractViolation(String),
}
