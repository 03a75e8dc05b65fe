use std::fmt;
use std::process::ExitCode;

/// What went wrong, grouped by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or settings (exit 1).
    Usage(String),
    /// Unreadable or inconsistent input data (exit 2).
    Input(String),
    /// A failure inside the pipeline (exit 3).
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<reebdist::Error> for CliError {
    fn from(e: reebdist::Error) -> Self {
        use reebdist::Error::*;
        let message = e.to_string();
        match e {
            ZeroSlabs | InvalidWeights(_) => CliError::Usage(message),
            EigenSolver(_) | NonPositiveEigenvalue { .. } | EmptyJcn | NotMorse { .. } | KindMismatch(..)
            | NonSquare { .. } | NonFinite { .. } => CliError::Internal(message),
            _ => CliError::Input(message),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
