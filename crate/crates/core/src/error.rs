use thiserror::Error;

use crate::quadrature::QuadratureError;

#[derive(Debug, Error)]
pub enum Error {
    /// A model parameter lies outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// A formula was evaluated outside the region where it holds.
    #[error("domain error: {0}")]
    Domain(String),
    /// Inputs are mutually inconsistent (lengths, ranges, regimes).
    #[error("argument error: {0}")]
    Argument(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] QuadratureError),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serialization(#[from] serde_json::Error),
}

impl Error {
    /// Process exit status: 1 for configuration and argument errors,
    /// 2 for numerical failures, 3 for I/O and serialization.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::InvalidParameter(_) | Self::Argument(_) | Self::Config(_) => 1,
            Self::Domain(_) | Self::Numerical(_) => 2,
            Self::Io(_) | Self::Serialization(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
