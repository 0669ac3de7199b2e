//! Numerical toolkit for task-oriented semantic communications.
//!
//! The crate is organised bottom-up:
//!
//! - [`info`]: discrete distributions and the information measures built on
//!   them (entropy, KL divergence, mutual information, PSNR).
//! - [`rdp`]: a Blahut–Arimoto style solver for the rate-distortion-perception
//!   function under squared-error distortion and KL perception.
//! - [`channel`]: the semantic channel (uniform quantizer, uniform + Gaussian
//!   composite noise, slow Rayleigh fading).
//! - [`capacity`]: equivalent-Gaussian lower bound and KL-gap upper bound on
//!   the capacity of the additive non-Gaussian semantic channel.
//! - [`pipeline`]: feature frames, the `SFF1` wire format, feature selection
//!   and completion, and the end-to-end transmit/receive simulation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod channel;
pub mod cli;
pub mod error;
pub mod info;
pub mod pipeline;
pub mod rdp;

pub use error::{Error, Result};
