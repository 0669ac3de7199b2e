use super::CapacityError;

/// Composite Simpson rule with `intervals` (even, >= 2) equal sub-intervals.
pub fn simpson<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, intervals: usize) -> f64 {
    assert!(
        intervals >= 2 && intervals.is_multiple_of(2),
        "Simpson needs an even interval count"
    );
    let h = (hi - lo) / intervals as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..intervals {
        let v = f(lo + i as f64 * h);
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    h / 3.0 * (f(lo) + f(hi) + 4.0 * odd + 2.0 * even)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Doubling stops once successive estimates differ by less than this.
    pub tolerance: f64,
    /// Hard cap on the number of grid points.
    pub max_points: usize,
    /// Intervals used by the first estimate (even).
    pub initial_intervals: usize,
    /// Integration range; `None` picks the minimal covering span.
    pub span: Option<(f64, f64)>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-9,
            max_points: 1 << 22,
            initial_intervals: 1024,
            span: None,
        }
    }
}

/// Simpson integration with interval doubling until two successive estimates
/// agree within `tolerance`. Function values are reused across refinements.
///
/// Returns the final estimate and the number of grid points it used.
pub fn simpson_refine<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    tolerance: f64,
    initial_intervals: usize,
    max_points: usize,
) -> Result<(f64, usize), CapacityError> {
    if initial_intervals < 2 || initial_intervals % 2 == 1 {
        return Err(CapacityError::InvalidQuadrature(
            "initial interval count must be even and >= 2",
        ));
    }
    if !(tolerance > 0.0) {
        return Err(CapacityError::InvalidQuadrature(
            "tolerance must be positive",
        ));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(CapacityError::InvalidQuadrature(
            "range must be finite with lo < hi",
        ));
    }

    let mut n = initial_intervals;
    let mut h = (hi - lo) / n as f64;
    let ends = f(lo) + f(hi);
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..n {
        let v = f(lo + i as f64 * h);
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    let mut estimate = h / 3.0 * (ends + 4.0 * odd + 2.0 * even);

    loop {
        if 2 * n + 1 > max_points {
            break;
        }
        // Old nodes all become even nodes of the refined grid.
        even += odd;
        n *= 2;
        h *= 0.5;
        odd = (0..n / 2).map(|k| f(lo + (2 * k + 1) as f64 * h)).sum();
        let refined = h / 3.0 * (ends + 4.0 * odd + 2.0 * even);
        let change = (refined - estimate).abs();
        estimate = refined;
        if change < tolerance {
            return Ok((estimate, n + 1));
        }
        if 2 * n + 1 > max_points {
            return Err(CapacityError::GridTooCoarse {
                change,
                tolerance,
                points: n + 1,
            });
        }
    }
    Err(CapacityError::GridTooCoarse {
        change: f64::INFINITY,
        tolerance,
        points: n + 1,
    })
}
