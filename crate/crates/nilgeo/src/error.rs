use std::path::PathBuf;

use thiserror::Error;

/// Failures of a CLI command, each mapped to one exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("construction failed: {0}")]
    Construction(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Degenerate(_) => 4,
            CliError::Construction(_) => 5,
        }
    }
}

impl From<nilgeo_core::Error> for CliError {
    fn from(e: nilgeo_core::Error) -> Self {
        use nilgeo_core::Error as E;
        match e {
            E::BadSelector(_) | E::DimensionMismatch { .. } => CliError::Usage(e.to_string()),
            E::Construction(_) => CliError::Construction(e.to_string()),
            _ => CliError::Degenerate(e.to_string()),
        }
    }
}
