use thiserror::Error;

use crate::capacity::CapacityError;
use crate::channel::ChannelError;
use crate::info::InfoError;
use crate::pipeline::{PipelineError, WireError};
use crate::rdp::RdpError;

/// Crate-level error, wrapping the per-module error types.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Info(#[from] InfoError),
    #[error(transparent)]
    Rdp(#[from] RdpError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Capacity(#[from] CapacityError),
    #[error(transparent)]
    Wire(#[from] WireError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
