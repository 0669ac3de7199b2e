//! Discrete probability objects and the information measures used throughout
//! the crate. All public quantities are reported in bits.

mod distribution;
mod measures;

pub use distribution::{ConditionalDistribution, DiscreteDistribution, JointDistribution};
pub use measures::{
    chain_identity_residual, conditional_entropy, entropy, entropy_of, kl_divergence,
    kl_divergence_of, mutual_information, psnr, PSNR_CAP_DB,
};

pub(crate) use measures::psnr_from_mse;

use thiserror::Error;

/// Renormalisation is applied silently when the probability mass is off by
/// less than this amount.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-9;

/// Normalisation tolerance every constructed distribution satisfies.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InfoError {
    #[error("distribution is empty")]
    Empty,
    #[error("alphabet has {alphabet} symbols but {probs} probabilities were given")]
    ShapeMismatch { alphabet: usize, probs: usize },
    #[error("probability at index {index} is invalid ({value})")]
    InvalidProbability { index: usize, value: f64 },
    #[error("probabilities sum to {sum}, which is not within {RENORMALIZE_TOLERANCE} of 1")]
    NotNormalized { sum: f64 },
    #[error("alphabet symbols must be finite and strictly increasing (index {index})")]
    AlphabetNotIncreasing { index: usize },
    #[error("distributions are defined over different alphabets")]
    SupportMismatch,
    #[error("p({index}) > 0 but q({index}) = 0")]
    AbsoluteContinuityViolation { index: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("peak value must be positive and finite, got {0}")]
    InvalidPeak(f64),
}
