use mumhodge::continuation::ContinuationError;

/// Failure of a command; each class maps to its own exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Precision(String),
    #[error("{0}")]
    Recognition(String),
    #[error("{0}")]
    Input(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Precision(_) => 3,
            CliError::Recognition(_) => 4,
            CliError::Input(_) => 5,
            CliError::Io { .. } | CliError::Other(_) => 1,
        }
    }
}

impl From<ContinuationError> for CliError {
    fn from(e: ContinuationError) -> Self {
        match e {
            ContinuationError::PrecisionExhausted(_) => CliError::Precision(e.to_string()),
            ContinuationError::Clearance(_) => CliError::Input(e.to_string()),
            ContinuationError::Recognition(_) | ContinuationError::FrameHypothesis(_) => CliError::Recognition(e.to_string()),
            other => CliError::Other(other.to_string()),
        }
    }
}
