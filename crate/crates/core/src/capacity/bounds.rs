use std::f64::consts::{LN_2, PI};
use std::io::Write;

use serde::Serialize;

use super::density::{default_span, semantic_noise_pdf};
use super::{simpson_refine, CapacityError, QuadratureConfig};
use crate::channel::{sample_noise, SemanticNoiseModel};

/// Where the equivalent Gaussian's variance comes from.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum VarianceMode {
    /// `sigma_p2 + (b - a)^2 / 12`.
    #[default]
    Analytic,
    /// Unbiased sample variance of seeded composite noise draws.
    Sampled { samples: usize, seed: u64 },
}

pub fn equivalent_variance(model: &SemanticNoiseModel, mode: VarianceMode) -> f64 {
    match mode {
        VarianceMode::Analytic => model.variance(),
        VarianceMode::Sampled { samples, seed } => {
            let xs = sample_noise(model, samples.max(2), seed);
            let n = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / n;
            xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
        }
    }
}

/// `D(p_ns || N(0, sigma_s^2))` in bits, with the analytic variance.
pub fn kl_gap(
    model: &SemanticNoiseModel,
    quadrature: &QuadratureConfig,
) -> Result<f64, CapacityError> {
    kl_gap_with_variance(model, model.variance(), quadrature)
}

/// `integral p_ns(x) log2(p_ns(x) / g(x)) dx` with `g = N(0, variance)`,
/// integrated by doubling Simpson.
pub fn kl_gap_with_variance(
    model: &SemanticNoiseModel,
    variance: f64,
    quadrature: &QuadratureConfig,
) -> Result<f64, CapacityError> {
    if !(variance > 0.0) || !variance.is_finite() {
        return Err(CapacityError::InvalidVariance(variance));
    }
    let (need_lo, need_hi) = default_span(model);
    let (lo, hi) = quadrature.span.unwrap_or((need_lo, need_hi));
    if lo > need_lo || hi < need_hi {
        return Err(CapacityError::GridDoesNotCover {
            lo,
            hi,
            need_lo,
            need_hi,
        });
    }

    let log_norm = -0.5 * (2.0 * PI * variance).ln();
    let integrand = |x: f64| {
        let p = semantic_noise_pdf(model, x);
        if p > 0.0 {
            let log_g = log_norm - x * x / (2.0 * variance);
            p * (p.ln() - log_g)
        } else {
            0.0
        }
    };
    // The integrand is in nats; scale the tolerance to match.
    let (nats, _) = simpson_refine(
        integrand,
        lo,
        hi,
        quadrature.tolerance * LN_2,
        quadrature.initial_intervals,
        quadrature.max_points,
    )?;
    let bits = nats / LN_2;
    Ok(if (-1e-9..0.0).contains(&bits) {
        0.0
    } else {
        bits
    })
}

/// Equivalent-Gaussian capacity `1/2 log2(1 + 10^(snr_db / 10))`.
pub fn capacity_lower(snr_db: f64) -> f64 {
    let snr = 10f64.powf(snr_db / 10.0);
    0.5 * snr.ln_1p() / LN_2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityBoundsResult {
    pub snr_db: f64,
    #[serde(rename = "lower_bits")]
    pub lower: f64,
    #[serde(rename = "upper_bits")]
    pub upper: f64,
    #[serde(rename = "kl_gap_bits")]
    pub kl_gap: f64,
}

/// Lower and upper capacity bounds at every SNR of the grid, in grid order.
pub fn capacity_bounds_sweep(
    model: &SemanticNoiseModel,
    snr_db_grid: &[f64],
    quadrature: &QuadratureConfig,
) -> Result<Vec<CapacityBoundsResult>, CapacityError> {
    capacity_bounds_sweep_with(model, snr_db_grid, quadrature, VarianceMode::Analytic)
}

pub fn capacity_bounds_sweep_with(
    model: &SemanticNoiseModel,
    snr_db_grid: &[f64],
    quadrature: &QuadratureConfig,
    mode: VarianceMode,
) -> Result<Vec<CapacityBoundsResult>, CapacityError> {
    if snr_db_grid.is_empty() {
        return Err(CapacityError::EmptyGrid);
    }
    let gap = kl_gap_with_variance(model, equivalent_variance(model, mode), quadrature)?;
    Ok(snr_db_grid
        .iter()
        .map(|&snr_db| {
            let lower = capacity_lower(snr_db);
            CapacityBoundsResult {
                snr_db,
                lower,
                upper: lower + gap,
                kl_gap: gap,
            }
        })
        .collect())
}

/// Writes `snr_db,lower_bits,upper_bits,kl_gap_bits`.
pub fn write_bounds_csv<W: Write>(
    rows: &[CapacityBoundsResult],
    writer: W,
) -> Result<(), csv::Error> {
    let mut out = csv::Writer::from_writer(writer);
    for row in rows {
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}
