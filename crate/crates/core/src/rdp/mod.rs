//! Rate-distortion-perception solver.
//!
//! Minimises `I(X; X̂)` subject to a mean-square distortion budget and a KL
//! perception budget by alternating between the optimal conditional
//! `q(x̂|x)` for a fixed output marginal and the optimal marginal
//! `r(x̂) = sum_x p(x) q(x̂|x)` for a fixed conditional. The Lagrange
//! multipliers `alpha` (distortion) and `mu` (perception) select the operating
//! point; [`sweep`] traces the surface over a grid of them.
//!
//! For `mu > 0` the conditional update treats `r` as independent of `q`, so
//! the iteration is a heuristic fixed-point scheme rather than a guaranteed
//! descent. Moderate `mu` converges in practice; large `mu` can drive a
//! marginal entry to zero, which surfaces as [`RdpError::ZeroMarginal`] or
//! [`RdpError::NumericOverflow`].

mod solver;
mod sweep;

pub use solver::{
    fixed_point_residual, solve, solve_with_state, update_conditional, update_marginal,
};
pub use sweep::{sweep, write_sweep_csv};

use thiserror::Error;

use crate::info::{ConditionalDistribution, DiscreteDistribution, InfoError};

/// Marginal entries at or below this value are treated as zero.
pub const MARGINAL_FLOOR: f64 = 1e-300;

/// Largest exponent (natural-log scale) the conditional update accepts after
/// the per-row max shift.
pub const MAX_EXPONENT: f64 = 700.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RdpError {
    #[error("multiplier {name} must be finite and non-negative, got {value}")]
    InvalidMultiplier { name: &'static str, value: f64 },
    #[error("source must have full support, p({index}) = 0")]
    SourceNotFullSupport { index: usize },
    #[error("reconstruction alphabet must be non-empty, finite and strictly increasing")]
    InvalidReconstructionAlphabet,
    #[error("marginal has {got} entries, reconstruction alphabet has {expected}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("output marginal r({index}) = {value} is not strictly positive")]
    ZeroMarginal { index: usize, value: f64 },
    #[error("conditional update exponent overflowed for source symbol {index}")]
    NumericOverflow { index: usize },
    #[error("solver config invalid: {0}")]
    InvalidConfig(&'static str),
    #[error("sweep grid is empty")]
    EmptyGrid,
    #[error(transparent)]
    Info(#[from] InfoError),
}

/// A rate-distortion-perception instance: source `p(x)`, the reconstruction
/// alphabet, and the two Lagrange multipliers.
#[derive(Debug, Clone, PartialEq)]
pub struct RdpProblem {
    source: DiscreteDistribution,
    reconstruction: Vec<f64>,
    alpha: f64,
    mu: f64,
}

impl RdpProblem {
    pub fn new(
        source: DiscreteDistribution,
        reconstruction: Vec<f64>,
        alpha: f64,
        mu: f64,
    ) -> Result<Self, RdpError> {
        check_multiplier("alpha", alpha)?;
        check_multiplier("mu", mu)?;
        if let Some(index) = source.probs().iter().position(|&p| p <= 0.0) {
            return Err(RdpError::SourceNotFullSupport { index });
        }
        let increasing = reconstruction.windows(2).all(|w| w[0] < w[1]);
        if reconstruction.is_empty() || !increasing || reconstruction.iter().any(|x| !x.is_finite())
        {
            return Err(RdpError::InvalidReconstructionAlphabet);
        }
        Ok(Self {
            source,
            reconstruction,
            alpha,
            mu,
        })
    }

    /// Reconstruction alphabet equal to the source alphabet.
    pub fn with_source_alphabet(
        source: DiscreteDistribution,
        alpha: f64,
        mu: f64,
    ) -> Result<Self, RdpError> {
        let recon = source.alphabet().to_vec();
        Self::new(source, recon, alpha, mu)
    }

    /// Same source and alphabet with different multipliers.
    pub fn with_multipliers(&self, alpha: f64, mu: f64) -> Result<Self, RdpError> {
        check_multiplier("alpha", alpha)?;
        check_multiplier("mu", mu)?;
        Ok(Self {
            alpha,
            mu,
            ..self.clone()
        })
    }

    pub fn source(&self) -> &DiscreteDistribution {
        &self.source
    }

    pub fn reconstruction(&self) -> &[f64] {
        &self.reconstruction
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
}

fn check_multiplier(name: &'static str, value: f64) -> Result<(), RdpError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(RdpError::InvalidMultiplier { name, value })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Stop once the sup-norm change of the marginal falls below this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 10_000,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<(), RdpError> {
        if self.max_iterations == 0 {
            return Err(RdpError::InvalidConfig("max_iterations must be at least 1"));
        }
        if !(self.tolerance > 0.0) {
            return Err(RdpError::InvalidConfig("tolerance must be positive"));
        }
        Ok(())
    }
}

/// Current iterate of the alternating minimisation.
#[derive(Debug, Clone, PartialEq)]
pub struct RdpState {
    pub conditional: ConditionalDistribution,
    pub marginal: DiscreteDistribution,
    pub iteration: usize,
}

/// One operating point on the rate-distortion-perception surface.
///
/// `perception` is `D(p || r)` in bits with source and reconstruction
/// symbols matched by value. It is infinite when a source symbol is missing
/// from the reconstruction alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct RdpPoint {
    pub rate: f64,
    pub distortion: f64,
    pub perception: f64,
    pub alpha: f64,
    pub mu: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Set by [`sweep`] when the point could not be solved.
    pub failure: Option<RdpError>,
}

impl RdpPoint {
    pub(crate) fn failed(alpha: f64, mu: f64, err: RdpError) -> Self {
        Self {
            rate: f64::NAN,
            distortion: f64::NAN,
            perception: f64::NAN,
            alpha,
            mu,
            iterations: 0,
            converged: false,
            failure: Some(err),
        }
    }
}
