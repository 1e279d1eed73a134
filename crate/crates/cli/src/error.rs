use trp_core::TrpError;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Bad input is a usage error; everything the integrator or linear
    /// algebra raises is numerical.
    pub fn from_core(e: TrpError) -> Self {
        match e {
            TrpError::InvalidParameter { .. }
            | TrpError::UnknownName(_)
            | TrpError::Schedule(_)
            | TrpError::Unsupported(_) => CliError::Usage(e.to_string()),
            TrpError::Linalg(_)
            | TrpError::DegenerateTopLevel { .. }
            | TrpError::AtTime { .. }
            | TrpError::Consistency(_) => CliError::Numerical(e.to_string()),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            // an unwritable output path is a usage problem from the caller's side
            CliError::Io(_) => EXIT_USAGE,
        }
    }
}

impl From<TrpError> for CliError {
    fn from(e: TrpError) -> Self {
        CliError::from_core(e)
    }
}
