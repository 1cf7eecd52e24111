use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("search failure: {0}")]
    Search(String),

    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Output(_) => 1,
            CliError::Config(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Search(_) => 4,
        }
    }

    /// A library error raised while checking configuration values.
    pub fn from_config(e: lcss_core::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<lcss_core::Error> for CliError {
    fn from(e: lcss_core::Error) -> Self {
        match e {
            lcss_core::Error::SearchFailure(msg) => CliError::Search(msg),
            other => CliError::Config(other.to_string()),
        }
    }
}
