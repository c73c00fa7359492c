use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The alternating sum lost more digits than the working precision can absorb.
    #[error(
        "insufficient precision at D={dimension}: working precision {working_digits} digits, \
         cancellation loses {digits_lost:.1} digits"
    )]
    InsufficientPrecision {
        dimension: u32,
        working_digits: u32,
        digits_lost: f64,
    },

    #[error("ill-conditioned fit: condition estimate 1e{condition_digits:.1} exceeds budget of {budget} digits")]
    IllConditioned { condition_digits: f64, budget: u32 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
