use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] rado_core::Error),
    #[error("{0}")]
    Usage(#[from] clap::Error),
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Input(String),
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Self::Io { context: context.into(), source }
    }

    /// Process exit status for this error.
    ///
    /// | code | meaning |
    /// |------|---------|
    /// | 1 | other operational error |
    /// | 2 | bad command line |
    /// | 3 | unparsable equation, coloring or input file |
    /// | 4 | enumeration limit exceeded |
    /// | 5 | arithmetic overflow |
    pub fn exit_code(&self) -> i32 {
        use rado_core::Error as E;
        match self {
            CliError::Usage(e) => e.exit_code(),
            CliError::Core(E::Parse(_)) | CliError::Json(_) | CliError::Input(_) => 3,
            CliError::Core(E::EnumerationLimitExceeded { .. }) => 4,
            CliError::Core(E::Overflow { .. }) => 5,
            _ => 1,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
