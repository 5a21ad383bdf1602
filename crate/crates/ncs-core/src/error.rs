use thiserror::Error;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("outside radius of convergence: |x| = {x} but radius is {radius}")]
    OutsideRadius { x: f64, radius: f64 },

    #[error("{what} did not converge: {detail}")]
    NonConvergent { what: &'static str, detail: String },

    #[error("overflow in {0}")]
    Overflow(&'static str),

    #[error("negative weight {value:e} at x = {x}")]
    NegativeWeight { x: f64, value: f64 },

    #[error("unstable division: weight {value:e} at x = {x} is below tolerance")]
    DivisionUnstable { x: f64, value: f64 },

    /// The Mellin transform does not belong to any positive weight.
    #[error("no weight function: {0}")]
    NoWeight(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn non_convergent(what: &'static str, detail: impl Into<String>) -> Self {
        Error::NonConvergent {
            what,
            detail: detail.into(),
        }
    }
}
