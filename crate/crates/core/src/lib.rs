//! Exact period valuations of rank-one A-motives over global function fields
//! and the regularized product formula they satisfy.
//!
//! Every logarithmic quantity is an exact rational multiple of `log q`.

pub mod cli;
pub mod drinfeld;
pub mod ffield;
pub mod funcfield;
pub mod genus1;
pub mod rational;
pub mod series;
pub mod zeta_periods;

pub use rational::Rational;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] ffield::FieldError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("zero element")]
    ZeroElement,
    #[error("bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("precision insufficient: {0}")]
    PrecisionInsufficient(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precision(msg: impl Into<String>) -> Error {
    Error::PrecisionInsufficient(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn failed(msg: impl Into<String>) -> Error {
    Error::VerificationFailed(msg.into())
}
