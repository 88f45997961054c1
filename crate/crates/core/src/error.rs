use thiserror::Error;

/// Errors raised by moment-based estimators and their numerical machinery.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("empty sample set")]
    EmptySamples,

    #[error("moment order {got} is insufficient, need at least {needed}")]
    InsufficientOrder { needed: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The support is too small for the requested degree (a singular moment matrix).
    #[error("degenerate support: {0}")]
    DegenerateSupport(String),

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("polynomial variable mismatch")]
    VariableMismatch,

    #[error("{what} size {size} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    /// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
    #[error("quadrature failed after {subdivisions} subdivisions (value {value}, error estimate {error_estimate})")]
    QuadratureFailure {
        value: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    #[error("integrand is not finite at t = {0}")]
    NonFiniteIntegrand(f64),

    #[error("no samples remain after dropping labels seen at most {0} times")]
    EmptyAfterFilter(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
