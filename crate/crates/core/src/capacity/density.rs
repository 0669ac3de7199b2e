use std::f64::consts::FRAC_1_SQRT_2;

use super::{simpson, CapacityError};
use crate::channel::SemanticNoiseModel;

/// Standard normal CDF, `0.5 erfc(-z / sqrt 2)`.
///
/// `erfc` is the musl/FreeBSD implementation from `libm`, accurate to about
/// one ulp over the whole real line.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// `Phi(u) - Phi(v)` for `u >= v`, evaluated in the form with the least
/// cancellation for where `u` and `v` fall.
fn cdf_difference(u: f64, v: f64) -> f64 {
    if v >= 0.0 {
        // Right tail: Q(v) - Q(u).
        0.5 * (libm::erfc(v * FRAC_1_SQRT_2) - libm::erfc(u * FRAC_1_SQRT_2))
    } else if u <= 0.0 {
        0.5 * (libm::erfc(-u * FRAC_1_SQRT_2) - libm::erfc(-v * FRAC_1_SQRT_2))
    } else {
        0.5 * (libm::erf(u * FRAC_1_SQRT_2) - libm::erf(v * FRAC_1_SQRT_2))
    }
}

/// Density of `U(a, b) + N(0, sigma_p2)`:
/// `(Phi((x - a) / sigma_p) - Phi((x - b) / sigma_p)) / (b - a)`.
pub fn semantic_noise_pdf(model: &SemanticNoiseModel, x: f64) -> f64 {
    let s = model.sigma_p();
    let u = (x - model.a()) / s;
    let v = (x - model.b()) / s;
    (cdf_difference(u, v) / (model.b() - model.a())).max(0.0)
}

/// The semantic noise density on a fixed evaluation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseDensity {
    pub model: SemanticNoiseModel,
    pub lo: f64,
    pub hi: f64,
    /// Odd number of grid points (an even number of Simpson intervals).
    pub points: usize,
}

impl NoiseDensity {
    /// `[a - 8 sigma_p - sigma_s, b + 8 sigma_p + sigma_s]` with `2^16 + 1` points.
    pub fn default_for(model: SemanticNoiseModel) -> Self {
        let (lo, hi) = default_span(&model);
        Self {
            model,
            lo,
            hi,
            points: (1 << 16) + 1,
        }
    }

    pub fn new(
        model: SemanticNoiseModel,
        lo: f64,
        hi: f64,
        points: usize,
    ) -> Result<Self, CapacityError> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(CapacityError::InvalidQuadrature(
                "range must be finite with lo < hi",
            ));
        }
        if points < 3 || points.is_multiple_of(2) {
            return Err(CapacityError::InvalidQuadrature(
                "point count must be odd and at least 3",
            ));
        }
        Ok(Self {
            model,
            lo,
            hi,
            points,
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        semantic_noise_pdf(&self.model, x)
    }

    /// Simpson estimate of the probability mass on the grid.
    pub fn total_mass(&self) -> f64 {
        simpson(|x| self.eval(x), self.lo, self.hi, self.points - 1)
    }
}

/// Minimal span the KL integral needs.
pub(crate) fn default_span(model: &SemanticNoiseModel) -> (f64, f64) {
    let pad = 8.0 * model.sigma_p() + model.variance().sqrt();
    (model.a() - pad, model.b() + pad)
}
