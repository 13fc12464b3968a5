use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid stochastic vector: {0}")]
    InvalidStochasticVector(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("config is missing required key `{0}`")]
    MissingKey(String),

    #[error("io: {0}")]
    Io(String),

    /// The simulation produced a NaN or infinite state.
    #[error("run diverged at t={t}: {reason}")]
    Diverged { t: usize, reason: String },
}
