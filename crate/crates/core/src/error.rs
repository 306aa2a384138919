use thiserror::Error;

/// Errors raised by the computational core.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime below 65536")]
    NotPrime(u32),

    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("monomial ideal contains no power of variable `{0}`; the quotient is infinite-dimensional")]
    InfiniteDimension(String),

    #[error("fiber product setting violated: {0}")]
    SettingViolation(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("algebra or module invariant violated: {0}")]
    Invariant(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("second-syzygy splitting failed: {0}")]
    SplitFailure(String),

    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
