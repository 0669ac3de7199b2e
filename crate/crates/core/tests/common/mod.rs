//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls the code under test for the quantity being checked:
//! the binary closed form, the brute-force grid and the Monte-Carlo
//! estimators are written from the definitions.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal, Uniform};
use rayon::prelude::*;

pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
}

/// Rate-distortion function of the uniform binary source under Hamming
/// distortion.
pub fn binary_rd(d: f64) -> f64 {
    if d >= 0.5 {
        0.0
    } else {
        1.0 - binary_entropy(d)
    }
}

/// Rate, distortion and perception of a 2x2 channel on `{0, 1}` with
/// `s = q(1|0)` and `t = q(0|1)`.
pub fn binary_stats(p0: f64, s: f64, t: f64) -> (f64, f64, f64) {
    let p = [p0, 1.0 - p0];
    let q = [[1.0 - s, s], [t, 1.0 - t]];
    let r = [
        p[0] * q[0][0] + p[1] * q[1][0],
        p[0] * q[0][1] + p[1] * q[1][1],
    ];
    let mut rate = 0.0;
    for x in 0..2 {
        for y in 0..2 {
            let j = p[x] * q[x][y];
            if j > 0.0 {
                rate += j * (q[x][y] / r[y]).log2();
            }
        }
    }
    let distortion = p[0] * s + p[1] * t;
    let perception = (0..2)
        .map(|i| {
            if r[i] > 0.0 {
                p[i] * (p[i] / r[i]).log2()
            } else {
                f64::INFINITY
            }
        })
        .sum();
    (rate.max(0.0), distortion, perception)
}

/// Smallest rate over an `n x n` grid of 2x2 conditionals subject to
/// `D <= d_max` and `P <= p_max`, both with `1e-12` slack for rounding.
pub fn brute_force_binary(p0: f64, d_max: f64, p_max: f64, n: usize) -> f64 {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let s = i as f64 / (n - 1) as f64;
            let mut best = f64::INFINITY;
            for k in 0..n {
                let t = k as f64 / (n - 1) as f64;
                let (r, d, p) = binary_stats(p0, s, t);
                if d <= d_max + 1e-12 && p <= p_max + 1e-12 && r < best {
                    best = r;
                }
            }
            best
        })
        .reduce(|| f64::INFINITY, f64::min)
}

/// Density of `U(a, b) + N(0, s2)` by direct numerical convolution with a
/// midpoint rule over the uniform support.
pub fn convolved_density(a: f64, b: f64, s2: f64, x: f64) -> f64 {
    let n = 40_000;
    let h = (b - a) / n as f64;
    let norm = 1.0 / (2.0 * std::f64::consts::PI * s2).sqrt();
    (0..n)
        .map(|i| {
            let u = a + (i as f64 + 0.5) * h;
            norm * (-(x - u) * (x - u) / (2.0 * s2)).exp()
        })
        .sum::<f64>()
        / n as f64
}

/// Composite `U(a, b) + N(0, s2)` draws from a generator unrelated to the
/// crate's own streams.
pub fn reference_noise(a: f64, b: f64, s2: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = Uniform::new(a, b).unwrap();
    let g = Normal::new(0.0, s2.sqrt()).unwrap();
    (0..n)
        .map(|_| u.sample(&mut rng) + g.sample(&mut rng))
        .collect()
}

/// Mean and standard error of the values.
pub fn mean_se(values: impl ParallelIterator<Item = f64>, n: usize) -> (f64, f64) {
    let (s, s2) = values
        .map(|v| (v, v * v))
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let nf = n as f64;
    let mean = s / nf;
    let var = (s2 / nf - mean * mean) * nf / (nf - 1.0);
    (mean, (var / nf).sqrt())
}

/// Monte-Carlo estimate of `KL(U(a,b) + N(0,s2) || N(0, s2 + (b-a)^2/12))` in
/// bits, with its standard error. Samples are drawn in parallel chunks, each
/// with its own seeded generator.
pub fn monte_carlo_kl_gap(a: f64, b: f64, s2: f64, n: usize, seed: u64) -> (f64, f64) {
    const CHUNK: usize = 100_000;
    let var = s2 + (b - a) * (b - a) / 12.0;
    let sp = s2.sqrt();
    let log_ratio = |x: f64| {
        let p = (libm::erf((x - a) / (sp * std::f64::consts::SQRT_2))
            - libm::erf((x - b) / (sp * std::f64::consts::SQRT_2)))
            / (2.0 * (b - a));
        let g = (-x * x / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt();
        (p / g).log2()
    };
    let chunks = n.div_ceil(CHUNK);
    let values = (0..chunks).into_par_iter().flat_map_iter(|c| {
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed ^ (c as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let len = CHUNK.min(n - c * CHUNK);
        (0..len)
            .map(move |_| {
                let u: f64 = rng.random_range(a..b);
                let z: f64 = StandardNormal.sample(&mut rng);
                u + sp * z
            })
            .map(log_ratio)
    });
    mean_se(values, n)
}

/// Sample variance and the standard error of that estimate.
pub fn variance_with_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    (m2 * n / (n - 1.0), ((m4 - m2 * m2) / n).sqrt())
}

/// Uniform feature vectors with unit mean power.
pub fn unit_power_features(len: usize, rng: &mut impl Rng) -> Vec<f32> {
    let bound = 3f64.sqrt();
    (0..len)
        .map(|_| rng.random_range(-bound..bound) as f32)
        .collect()
}
