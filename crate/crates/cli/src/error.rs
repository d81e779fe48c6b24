use std::path::PathBuf;

use flood_exposure::{EquityError, ExposureError, IngestError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Exposure(#[from] ExposureError),
    #[error(transparent)]
    Equity(#[from] EquityError),
}

impl CliError {
    /// 1 for I/O, 2 for bad input or configuration, 3 for geometry failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Config(_) => 2,
            CliError::Ingest(e) if e.is_validation() => 2,
            CliError::Ingest(_) => 1,
            CliError::Exposure(ExposureError::Config(_)) => 2,
            CliError::Exposure(_) | CliError::Equity(_) => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}
