use thiserror::Error;

/// CLI failure, classified by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or configuration. Exit code 1.
    #[error("{0}")]
    Usage(String),
    /// Unreadable or unwritable files. Exit code 2.
    #[error("{0}")]
    Io(String),
    /// Inputs that disagree with each other. Exit code 3.
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Data(_) => 3,
        }
    }
}

impl From<rlbsp::Error> for CliError {
    fn from(e: rlbsp::Error) -> Self {
        use rlbsp::Error as E;
        let msg = e.to_string();
        match e {
            E::InvalidParams(_) => CliError::Usage(msg),
            E::Unreadable { .. } | E::UnsupportedFormat(_) | E::Io(_) | E::Snapshot(_) => {
                CliError::Io(msg)
            }
            E::DimensionMismatch { .. }
            | E::FrameTooSmall { .. }
            | E::EmptySequence(_)
            | E::InvalidSequence(_)
            | E::InvalidLabel(_)
            | E::InvalidMaskValue(_)
            | E::EmptyAggregate => CliError::Data(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
