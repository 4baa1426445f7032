use std::io;
use std::path::PathBuf;

/// Failures surfaced to the shell, each with its own exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("writing output: {0}")]
    Output(#[source] io::Error),

    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io { .. } | CliError::Output(_) => 2,
            CliError::Data(_) => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

impl From<binlaw::Error> for CliError {
    fn from(e: binlaw::Error) -> Self {
        use binlaw::Error as E;
        match e {
            E::InvalidScheme(_)
            | E::InvalidParameter { .. }
            | E::CycleOutOfRange { .. }
            | E::LengthMismatch(..) => CliError::Usage(e.to_string()),
            E::EmptyData => CliError::Data("no positive in-range values to analyze".to_owned()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Output(e)
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
