use thiserror::Error;

/// Failure of a command, carrying its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed flags or input files (exit 1).
    #[error("{0}")]
    Input(String),
    /// The solver found no positive exact weights (exit 2).
    #[error(
        "no positive cubature: residual {residual:e}, {zero_nodes} zero-weight nodes; try --delta {suggested_delta}"
    )]
    Infeasible { residual: f64, zero_nodes: usize, suggested_delta: f64 },
    /// A `--assert` threshold was violated (exit 3).
    #[error("assertion failed: {0}")]
    Assertion(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Infeasible { .. } => 2,
            CliError::Assertion(_) => 3,
        }
    }
}

impl From<capquad_core::Error> for CliError {
    fn from(e: capquad_core::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

/// Prefixes a core error with the flag it came from.
pub(crate) fn flag<T>(name: &str, r: capquad_core::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Input(format!("--{name}: {e}")))
}
