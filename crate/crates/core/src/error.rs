use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// `w >= n*x`: every vector with full mass zeroes the objective.
    #[error("trivial regime: w = {w} is not below n*x = {nx}")]
    TrivialRegime { w: String, nx: String },

    #[error("unstable queue: rho = {rho} must be below 1")]
    Unstable { rho: String },

    #[error("wrong solver branch: {0}")]
    WrongBranch(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("{what} needs {needed} evaluations, cap is {cap}")]
    SizeCap {
        what: &'static str,
        needed: u128,
        cap: u128,
    },
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
