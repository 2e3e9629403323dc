use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max |X - X^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("size guard: {what} = {size} exceeds limit {limit}")]
    TooLarge {
        what: &'static str,
        size: u128,
        limit: u128,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid channel: trace-preservation residual {tp:e}, CP residual {cp:e}")]
    InvalidChannel { tp: f64, cp: f64 },

    #[error("completeness violated: |Tr X - d^2| = {trace:e}, |Tr[X SWAP] - d| = {swap:e}")]
    Incomplete { trace: f64, swap: f64 },

    #[error("unknown reference operator `{0}`")]
    UnknownOperator(String),

    #[error("no samples: {0}")]
    NoSamples(String),
}

pub type Result<T> = std::result::Result<T, Error>;
