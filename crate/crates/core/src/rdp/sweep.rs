use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::{solve, RdpError, RdpPoint, RdpProblem, SolverConfig};

/// Solves `template` at every `(alpha, mu)` pair of the grid product.
///
/// The result is sorted by `(alpha, mu)`. Points that fail to solve are kept
/// with [`RdpPoint::failure`] set; only empty grids are an error.
pub fn sweep(
    template: &RdpProblem,
    alpha_grid: &[f64],
    mu_grid: &[f64],
    config: &SolverConfig,
) -> Result<Vec<RdpPoint>, RdpError> {
    if alpha_grid.is_empty() || mu_grid.is_empty() {
        return Err(RdpError::EmptyGrid);
    }
    let mut pairs: Vec<(f64, f64)> = alpha_grid
        .iter()
        .flat_map(|&a| mu_grid.iter().map(move |&m| (a, m)))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));

    let points = pairs
        .par_iter()
        .map(|&(alpha, mu)| {
            template
                .with_multipliers(alpha, mu)
                .and_then(|p| solve(&p, config))
                .unwrap_or_else(|err| RdpPoint::failed(alpha, mu, err))
        })
        .collect();
    Ok(points)
}

#[derive(Serialize)]
struct SweepRow {
    alpha: f64,
    mu: f64,
    rate_bits: f64,
    distortion: f64,
    perception_bits: f64,
    iterations: usize,
    converged: bool,
}

/// Writes `alpha,mu,rate_bits,distortion,perception_bits,iterations,converged`.
pub fn write_sweep_csv<W: Write>(points: &[RdpPoint], writer: W) -> Result<(), csv::Error> {
    let mut out = csv::Writer::from_writer(writer);
    for p in points {
        out.serialize(SweepRow {
            alpha: p.alpha,
            mu: p.mu,
            rate_bits: p.rate,
            distortion: p.distortion,
            perception_bits: p.perception,
            iterations: p.iterations,
            converged: p.converged,
        })?;
    }
    out.flush()?;
    Ok(())
}
