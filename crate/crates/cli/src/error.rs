use thiserror::Error;

/// Failure of a run, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input: unreadable or malformed config, expression, or grid file.
    #[error("{0}")]
    Validation(String),
    /// The computation itself failed or did not converge.
    #[error("{0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<srmc_core::Error> for CliError {
    fn from(e: srmc_core::Error) -> Self {
        use srmc_core::Error as E;
        match e {
            E::Parse(_) | E::InvalidArgument(_) | E::OutsideDomain { .. } => CliError::Validation(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Validation(format!("csv: {e}"))
    }
}
