use thiserror::Error;

/// Failure of a command, carrying its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("embedding {index}: {source}")]
    Embedding {
        index: usize,
        source: mlk_core::Error,
    },
    #[error("{0}")]
    Invalid(mlk_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Parse(_) => 2,
            CliError::Embedding { .. } | CliError::Invalid(_) => 3,
        }
    }
}

impl From<mlk_core::Error> for CliError {
    fn from(e: mlk_core::Error) -> Self {
        CliError::Invalid(e)
    }
}
