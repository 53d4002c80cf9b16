use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Numeric(#[from] phiform_core::Error),

    #[error("{failed} verification check(s) failed: {names}")]
    Verification { failed: usize, names: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    /// 0 success, 1 verification or runtime failure, 2 usage, 3 convergence.
    pub fn exit_code(&self) -> i32 {
        use phiform_core::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(e) => match e {
                E::Convergence { .. } | E::NonFiniteIntegrand { .. } | E::InsufficientRecords { .. } => 3,
                E::InvalidSpec(_) | E::InvalidCharge(_) | E::InvalidTheta(_) | E::InvalidParams(_) => 2,
                _ => 1,
            },
            CliError::Verification { .. } | CliError::Io(_) => 1,
        }
    }
}
