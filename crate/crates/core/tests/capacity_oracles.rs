mod common;

use common::{convolved_density, monte_carlo_kl_gap, reference_noise};
use semcom::capacity::{
    capacity_bounds_sweep, capacity_bounds_sweep_with, capacity_lower, kl_gap, semantic_noise_pdf,
    simpson, NoiseDensity, QuadratureConfig, VarianceMode,
};
use semcom::channel::SemanticNoiseModel;

fn model(a: f64, b: f64, s2: f64) -> SemanticNoiseModel {
    SemanticNoiseModel::new(a, b, s2).unwrap()
}

// Reference values from adaptive quadrature of the same integral in an
// unrelated numerical environment.
const GAP_WIDE: f64 = 0.145_632_679_040_886_8;
const GAP_NARROW: f64 = 0.027_787_816_194_316_5;

#[test]
fn gap_matches_independent_quadrature() {
    let q = QuadratureConfig::default();
    assert!((kl_gap(&model(-1.0, 1.0, 0.01), &q).unwrap() - GAP_WIDE).abs() < 1e-8);
    assert!((kl_gap(&model(-0.3, 0.3, 0.01), &q).unwrap() - GAP_NARROW).abs() < 1e-8);
}

#[test]
fn gap_agrees_with_monte_carlo() {
    for (a, b, s2) in [(-1.0, 1.0, 0.01), (-0.3, 0.3, 0.01), (0.0, 2.0, 0.5)] {
        let gap = kl_gap(&model(a, b, s2), &QuadratureConfig::default()).unwrap();
        let (mc, se) = monte_carlo_kl_gap(a, b, s2, 2_000_000, 99);
        assert!(
            (gap - mc).abs() < 3.0 * se,
            "({a},{b},{s2}) quad {gap} mc {mc} se {se}"
        );
    }
}

#[test]
fn gap_decreases_along_physical_noise_ladder() {
    let q = QuadratureConfig::default();
    let gaps: Vec<f64> = [0.01, 0.05, 0.1, 0.5, 1.0]
        .iter()
        .map(|&s2| kl_gap(&model(-1.0, 1.0, s2), &q).unwrap())
        .collect();
    for w in gaps.windows(2) {
        assert!(w[1] <= w[0], "{gaps:?}");
    }
}

#[test]
fn gap_vanishes_for_narrow_uniform() {
    let gap = kl_gap(&model(-1e-6, 1e-6, 0.01), &QuadratureConfig::default()).unwrap();
    assert!(gap < 1e-6);
}

#[test]
fn gap_is_scale_invariant() {
    let q = QuadratureConfig::default();
    let m = model(-0.7, 0.4, 0.03);
    let base = kl_gap(&m, &q).unwrap();
    for f in [0.01, 3.0, 250.0] {
        let scaled = kl_gap(&m.scaled(f).unwrap(), &q).unwrap();
        assert!(
            (scaled - base).abs() < 1e-8,
            "factor {f}: {scaled} vs {base}"
        );
    }
}

#[test]
fn pdf_matches_direct_convolution() {
    for (a, b, s2) in [(-1.0, 1.0, 0.01), (0.2, 0.5, 0.3), (-2.0, 3.0, 1.0)] {
        let m = model(a, b, s2);
        for i in 0..=40 {
            let x = a - 1.0 + (b - a + 2.0) * i as f64 / 40.0;
            let want = convolved_density(a, b, s2, x);
            let got = semantic_noise_pdf(&m, x);
            assert!(
                (got - want).abs() < 1e-6 * want.max(1e-3),
                "x={x}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn pdf_matches_histogram() {
    let (a, b, s2) = (-1.0, 1.0, 0.04);
    let m = model(a, b, s2);
    let n = 1_000_000;
    let xs = reference_noise(a, b, s2, n, 5);
    let (lo, hi) = (-1.8, 1.8);
    let bins = 200;
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in &xs {
        if x >= lo && x < hi {
            counts[((x - lo) / width) as usize] += 1;
        }
    }
    for (k, &c) in counts.iter().enumerate() {
        let left = lo + k as f64 * width;
        let prob = simpson(|x| semantic_noise_pdf(&m, x), left, left + width, 16);
        let expected = n as f64 * prob;
        let se = (expected * (1.0 - prob)).sqrt().max(1.0);
        assert!(
            (c as f64 - expected).abs() < 5.0 * se,
            "bin {k}: {c} vs {expected}"
        );
    }
}

#[test]
fn density_mass_for_random_models() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let a = rng.random_range(-2.0..1.0);
        let b = a + rng.random_range(1e-3..3.0);
        let s2 = rng.random_range(1e-3..2.0);
        let d = NoiseDensity::default_for(model(a, b, s2));
        assert!((d.total_mass() - 1.0).abs() < 1e-6, "({a},{b},{s2})");
    }
}

#[test]
fn sweep_has_constant_gap_and_exact_lower_bound() {
    let grid: Vec<f64> = (0..=20).map(f64::from).collect();
    let rows = capacity_bounds_sweep(&model(-1.0, 1.0, 0.01), &grid, &QuadratureConfig::default())
        .unwrap();
    for (row, &snr) in rows.iter().zip(&grid) {
        let exact = 0.5 * (1.0 + 10f64.powf(snr / 10.0)).log2();
        assert!((row.lower - exact).abs() < 1e-14);
        assert!((row.upper - row.lower - row.kl_gap).abs() < 1e-9);
        assert!((row.kl_gap - GAP_WIDE).abs() < 1e-8);
    }
    for w in rows.windows(2) {
        assert!(w[1].upper >= w[0].upper);
    }
}

#[test]
fn sampled_variance_mode_is_close_to_analytic() {
    let m = model(-1.0, 1.0, 0.01);
    let grid = [0.0, 10.0];
    let q = QuadratureConfig::default();
    let analytic = capacity_bounds_sweep(&m, &grid, &q).unwrap();
    let sampled = capacity_bounds_sweep_with(
        &m,
        &grid,
        &q,
        VarianceMode::Sampled {
            samples: 1_000_000,
            seed: 3,
        },
    )
    .unwrap();
    assert!((analytic[0].kl_gap - sampled[0].kl_gap).abs() < 1e-3);
    assert!(sampled[0].kl_gap >= 0.0);
}

#[test]
fn lower_bound_reference_points() {
    assert!((capacity_lower(10.0 * 3f64.log10()) - 1.0).abs() < 1e-12);
    assert!(capacity_lower(-400.0) < 1e-30);
    assert!((capacity_lower(20.0) - 3.329_105_741_375_897_3).abs() < 1e-12);
}
