//! Capacity bounds for the additive non-Gaussian semantic channel.
//!
//! With `sigma_s^2` the semantic noise variance, the capacity is sandwiched
//! between the equivalent-Gaussian capacity `1/2 log2(1 + SNR)` and that value
//! plus the KL divergence between the true noise density and
//! `N(0, sigma_s^2)`. The divergence is invariant under a common rescaling of
//! both densities, so it is computed once per noise shape and shared by every
//! SNR of a sweep.

mod bounds;
mod density;
mod quadrature;

pub use bounds::{
    capacity_bounds_sweep, capacity_bounds_sweep_with, capacity_lower, equivalent_variance, kl_gap,
    kl_gap_with_variance, write_bounds_csv, CapacityBoundsResult, VarianceMode,
};
pub use density::{normal_cdf, semantic_noise_pdf, NoiseDensity};
pub use quadrature::{simpson, simpson_refine, QuadratureConfig};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CapacityError {
    #[error("quadrature did not settle: last doubling changed the estimate by {change:e} (tolerance {tolerance:e}) at {points} points")]
    GridTooCoarse {
        change: f64,
        tolerance: f64,
        points: usize,
    },
    #[error("integration range [{lo}, {hi}] does not cover the required [{need_lo}, {need_hi}]")]
    GridDoesNotCover {
        lo: f64,
        hi: f64,
        need_lo: f64,
        need_hi: f64,
    },
    #[error("invalid quadrature settings: {0}")]
    InvalidQuadrature(&'static str),
    #[error("equivalent noise variance must be positive, got {0}")]
    InvalidVariance(f64),
    #[error("SNR grid is empty")]
    EmptyGrid,
}
