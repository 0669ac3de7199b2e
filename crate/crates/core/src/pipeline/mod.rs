//! End-to-end feature transmission: selection, `SFF1` framing, the semantic
//! channel, receiver-side completion and run reporting.

mod completion;
mod frame;
mod run;
mod wire;

pub use completion::{complete_features, CompletionPolicy};
pub use frame::{select_features, FeatureFrame, Selection, SelectionMask};
pub use run::{
    process_frame, run_pipeline, run_pipeline_stream, transmit_stream, ChannelReport, FrameFailure,
    PipelineOutput, RunReport, StreamOutput,
};
pub use wire::{
    decode_frame, decode_stream, encode_frame, encode_frame_into, encode_stream, encoded_len,
    DecodedFrame, FrameReader, FLAG_QUANTIZED, HEADER_LEN, MAGIC, VERSION,
};

use thiserror::Error;

use crate::channel::ChannelError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WireError {
    #[error("bad magic {0:02x?}, expected \"SFF1\"")]
    BadMagic([u8; 4]),
    #[error("frame truncated: need {needed} bytes, have {available}")]
    TruncatedFrame { needed: usize, available: usize },
    #[error("unsupported SFF version {0}")]
    VersionUnsupported(u8),
    #[error("frame declares zero features")]
    EmptyFrame,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("no features selected for transmission")]
    EmptySelection,
    #[error("frame must carry at least one feature")]
    EmptyFrame,
    #[error("frame has {0} features, more than the wire format allows")]
    FrameTooLarge(usize),
    #[error("mask covers {mask} features but frame has {features}")]
    MaskLengthMismatch { mask: usize, features: usize },
    #[error("expected {expected} received values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Wire(#[from] WireError),
}
