use thiserror::Error;

/// Errors raised by the algebra, the walk engine and the oracles.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Inputs that do not fit together (mismatched groups, bad weights, bad points).
    #[error("configuration error: {0}")]
    Config(String),

    /// Enclosure refinement hit the precision cap without separating two points.
    #[error("undecidable comparison between {left} and {right} (independence assumption violated?)")]
    UndecidableComparison { left: String, right: String },

    /// An internal invariant failed. Always a bug or a violated declaration.
    #[error("invariant violation: {0}")]
    Invariant(String),

    /// An exact enumeration would exceed its configured budget.
    #[error("budget exceeded: {needed} > {budget} ({what})")]
    Budget { what: String, needed: u128, budget: u128 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

pub(crate) fn invariant(msg: impl Into<String>) -> Error {
    Error::Invariant(msg.into())
}
