use std::collections::HashMap;

use super::ChannelError;
use crate::info::entropy_of;

/// Scalar quantizer onto `M` ordered reconstruction levels.
///
/// Inputs map to the nearest level; exact midpoints between two levels map
/// to the lower one. Inputs outside the configured range are clamped first.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantizer {
    levels: Vec<f64>,
    thresholds: Vec<f64>,
    min: f64,
    max: f64,
}

impl Quantizer {
    pub fn new(levels: Vec<f64>, min: f64, max: f64) -> Result<Self, ChannelError> {
        if !(min < max) || !min.is_finite() || !max.is_finite() {
            return Err(ChannelError::InvalidRange { min, max });
        }
        if levels.len() < 2 {
            return Err(ChannelError::TooFewLevels(levels.len()));
        }
        let ordered = levels.windows(2).all(|w| w[0] < w[1]);
        let inside = levels
            .iter()
            .all(|&c| c.is_finite() && c >= min && c <= max);
        if !ordered || !inside {
            return Err(ChannelError::InvalidLevels);
        }
        let thresholds = levels.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        Ok(Self {
            levels,
            thresholds,
            min,
            max,
        })
    }

    /// Midrise levels `c_m = min + (m - 1/2) (max - min) / M`, `m = 1..M`.
    pub fn midrise(m: usize, min: f64, max: f64) -> Result<Self, ChannelError> {
        let step = (max - min) / m as f64;
        let levels = (0..m).map(|i| min + (i as f64 + 0.5) * step).collect();
        Self::new(levels, min, max)
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.min, self.max)
    }

    /// Index of the level `x` maps to.
    pub fn level_index(&self, x: f64) -> usize {
        debug_assert!(x.is_finite());
        let x = x.clamp(self.min, self.max);
        self.thresholds.partition_point(|&t| t < x)
    }

    pub fn quantize_value(&self, x: f64) -> f64 {
        self.levels[self.level_index(x)]
    }

    pub fn quantize(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|&v| self.quantize_value(v)).collect()
    }

    /// Upper bound `dim * log2 M` on the entropy of a quantized vector.
    pub fn entropy_bound(&self, dim: usize) -> f64 {
        dim as f64 * (self.levels.len() as f64).log2()
    }
}

/// Plug-in entropy (bits) of the empirical distribution of `values`.
pub fn histogram_entropy(values: &[f64]) -> f64 {
    let mut counts: HashMap<u64, usize> = HashMap::new();
    for v in values {
        *counts.entry(v.to_bits()).or_default() += 1;
    }
    counts_entropy(counts.into_values(), values.len())
}

/// Plug-in entropy (bits) of the empirical distribution of vectors.
pub fn joint_histogram_entropy(rows: &[Vec<f64>]) -> f64 {
    let mut counts: HashMap<Vec<u64>, usize> = HashMap::new();
    for row in rows {
        *counts
            .entry(row.iter().map(|v| v.to_bits()).collect())
            .or_default() += 1;
    }
    counts_entropy(counts.into_values(), rows.len())
}

fn counts_entropy(counts: impl Iterator<Item = usize>, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let probs: Vec<f64> = counts.map(|c| c as f64 / total as f64).collect();
    entropy_of(&probs)
}
