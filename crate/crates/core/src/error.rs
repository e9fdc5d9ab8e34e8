use thiserror::Error;

/// Errors produced by channel construction and analysis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max |M - M^dagger| entry = {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("Choi matrix is not positive semidefinite (min eigenvalue = {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("matrix is not unitary (max |U^dagger U - 1| entry = {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("channel is not CPTP: {0}")]
    NotCptp(String),

    #[error("channel is not stochastic")]
    NotStochastic,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn shape(expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
