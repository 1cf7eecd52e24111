use thiserror::Error;

use crate::waveforms::Scheme;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{scheme} does not support {mode} detection")]
    UnsupportedMode { scheme: Scheme, mode: &'static str },

    #[error("search failure: {0}")]
    SearchFailure(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
