use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("eigenvalue vector is outside the admissible cone Gamma_{k}")]
    ConeViolation { k: usize },

    #[error("singular input: {0}")]
    SingularInput(String),

    /// The pairing `[alpha]^l [omega]^(N-l)` vanishes, so `mu` is undefined.
    #[error("degenerate class: G^l(b, q) = 0")]
    DegenerateClass,

    #[error("seed not found: {0}")]
    SeedNotFound(String),

    #[error("seed chain is not monotone at epsilon = {epsilon}; retry with a smaller epsilon")]
    RetryWithSmallerEpsilon { epsilon: f64 },

    #[error("seed slope {slope} disagrees with chain limit {chain} (|diff| = {diff:e})")]
    SeedMismatch { slope: f64, chain: f64, diff: f64 },

    #[error("explicit ODE denominator vanished at x = {x}")]
    OracleBreakdown { x: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
