use thiserror::Error;

/// Errors produced by the estimators, selectors and the evaluation harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical failure: {0}")]
    Numerical(NumericalDiagnostics),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// Condition summary of a matrix that the spectral routines refused.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericalDiagnostics {
    pub reason: String,
    pub size: usize,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub trace: f64,
}

impl std::fmt::Display for NumericalDiagnostics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} (n = {}, eigenvalue range [{:e}, {:e}], trace {:e})",
            self.reason, self.size, self.min_eigenvalue, self.max_eigenvalue, self.trace
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid_input(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn invalid_param(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
