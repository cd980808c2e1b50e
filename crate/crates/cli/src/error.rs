use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("numeric guard: {0}")]
    Numeric(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Core(#[from] dvcv_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 0 ok, 1 verification failure or I/O, 2 usage, 3 numeric guard.
    pub fn exit_code(&self) -> i32 {
        use dvcv_core::Error as E;
        match self {
            CliError::Verification(_) | CliError::Io(_) | CliError::Csv(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Core(E::TailMass { .. } | E::TruncationOverflow { .. }) => 3,
            CliError::Core(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
