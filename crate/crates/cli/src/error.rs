use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] dtqc_core::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self::Usage(msg.into())
    }

    /// Exit codes: 2 validation (parameters, config, input schema),
    /// 3 i/o, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(dtqc_core::Error::Numerical(_)) => 4,
            CliError::Core(_) => 2,
            CliError::Io(_) => 3,
            CliError::Usage(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
