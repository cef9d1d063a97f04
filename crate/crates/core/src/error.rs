use thiserror::Error;

use crate::discrimination::OptimalityReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("operator is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("operator is not PSD (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("density matrix trace is {0}, expected 1")]
    TraceNotOne(f64),

    #[error("state not normalized (squared norm {0})")]
    StateNotNormalized(f64),

    #[error("priors not normalized (sum {0})")]
    PriorsNotNormalized(f64),

    #[error("prior {index} is not positive ({value})")]
    NonPositivePrior { index: usize, value: f64 },

    #[error("completeness violated: max |sum K^dag K - I| = {0:e}")]
    Incomplete(f64),

    #[error("{name} = {value} outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("p_max = 1/N: all reduced states coincide, every measurement succeeds with probability 1/N and the attack strength is undefined")]
    DegenerateScheme,

    #[error("requested success probability unattainable: p = {p} exceeds p_max = {p_max}")]
    Unattainable { p: f64, p_max: f64 },

    #[error("invalid scheme: {0}")]
    InvalidScheme(String),

    #[error("discrimination solver not converged after {iterations} iterations (best p = {best_p}, max pairwise residual {:e}, min operator eigenvalue {:e})", report.max_pairwise_residual(), report.min_operator_eigenvalue())]
    NotConverged {
        iterations: usize,
        best_p: f64,
        report: Box<OptimalityReport>,
    },

    #[error("scheme document: {0}")]
    Parse(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn out_of_range(name: &'static str, value: f64, lo: f64, hi: f64) -> Self {
        Error::OutOfRange {
            name,
            value,
            lo,
            hi,
        }
    }
}
