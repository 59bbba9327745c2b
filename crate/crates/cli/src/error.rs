use ssa_core::SsaError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    /// A malformed input file; `line` is 1-based and counts the header.
    #[error("{path}:{line}: {message}")]
    Data {
        path: String,
        line: u64,
        message: String,
    },

    #[error("{0}")]
    Input(String),

    #[error(transparent)]
    Solver(#[from] SsaError),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// Machine-readable category printed alongside the message.
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Data { .. } | CliError::Input(_) => "input",
            CliError::Solver(e) => e.code(),
            CliError::Io { .. } => "io",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data { .. } | CliError::Input(_) => 3,
            CliError::Solver(_) => 4,
            CliError::Io { .. } => 5,
        }
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
