use thiserror::Error;

use crate::linalg::LinalgError;

pub type Result<T, E = TrpError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrpError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },
    #[error("top eigenvalue of the base Hamiltonian is degenerate at tau = {tau} (gap {gap:e})")]
    DegenerateTopLevel { tau: f64, gap: f64 },
    #[error("Hamiltonian evaluation failed at tau = {tau}: {source}")]
    AtTime {
        tau: f64,
        #[source]
        source: Box<TrpError>,
    },
    #[error("schedule misaligned: {0}")]
    Schedule(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

impl TrpError {
    pub fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Self::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    /// Attaches the evaluation time unless the error already carries one.
    pub fn at_time(self, tau: f64) -> Self {
        match self {
            e @ (Self::AtTime { .. } | Self::DegenerateTopLevel { .. }) => e,
            e => Self::AtTime {
                tau,
                source: Box::new(e),
            },
        }
    }
}
