use cf_core::Error;

/// Failure of a command, mapped onto the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, config or input values (exit 2).
    #[error("{0}")]
    Usage(String),
    /// A computation failed, e.g. an exhausted search budget (exit 3).
    #[error("{0}")]
    Compute(String),
    /// A validation check did not pass (exit 4).
    #[error("{0}")]
    Validation(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) | CliError::Io(_) => 3,
            CliError::Validation(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e.root() {
            Error::BudgetExceeded { .. } | Error::Convergence { .. } | Error::InvariantViolation(_) => {
                CliError::Compute(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}
