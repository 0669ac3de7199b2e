//! Semantic channel: uniform quantizer, composite uniform + Gaussian noise,
//! and slow Rayleigh fading, producing `ẑ = g z + n_s`.

mod config;
mod noise;
mod quantizer;
mod rng;
mod transmit;

pub(crate) use config::snr_db_serde;
pub use config::{ChannelConfig, Fading, QuantizerConfig};
pub use noise::{sample_noise, SemanticNoiseModel};
pub use quantizer::{histogram_entropy, joint_histogram_entropy, Quantizer};
pub use rng::{stream_rng, Stream, StreamRng};
pub use transmit::{
    equalize, noise_scale, transmit, transmit_frame, write_trace_csv, TraceRow, Transmission,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("quantizer needs at least two levels, got {0}")]
    TooFewLevels(usize),
    #[error("quantizer levels must be finite, strictly increasing and inside the input range")]
    InvalidLevels,
    #[error("input range [{min}, {max}] is invalid")]
    InvalidRange { min: f64, max: f64 },
    #[error("noise bounds must satisfy a < b (a = {a}, b = {b})")]
    InvalidBounds { a: f64, b: f64 },
    #[error("physical noise variance must be positive and finite, got {0}")]
    InvalidVariance(f64),
    #[error("Rayleigh fading needs sigma_h2 > 0, got {0}")]
    InvalidFading(f64),
    #[error("SNR must be finite or +inf, got {0}")]
    InvalidSnr(f64),
    #[error("gain at index {index} is not strictly positive ({value})")]
    ZeroGain { index: usize, value: f64 },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
}
