//! Library side of the `qseal` command: parameter sweeps, the verification
//! suite, and the end-to-end attack pipeline.

pub mod commands;
pub mod probe;
pub mod sweep;
pub mod verify;

use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] qseal::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 1 for numerical failures (a solver that did not converge), 2 for
    /// anything caused by the arguments or input files.
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Model(qseal::Error::NotConverged { .. }) => ExitCode::from(1),
            _ => ExitCode::from(2),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Twelve significant digits, lowercase exponent.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.11e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_formatting() {
        assert_eq!(fmt_real(0.82), "8.20000000000e-1");
        assert_eq!(fmt_real(1.0), "1.00000000000e0");
        assert_eq!(fmt_real(0.975_885_3), "9.75885300000e-1");
    }
}
