//! Binomial confidence intervals.

/// Normal quantile for a two-sided 95% interval.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval `(low, high)` for `successes` out of `trials` at
/// normal quantile `z`. Returns `(0, 1)` when there are no trials.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let (center, half) = wilson_center_half(successes, trials, z);
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Half-width of the Wilson interval at `z`.
pub fn wilson_half_width(successes: u64, trials: u64, z: f64) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    wilson_center_half(successes, trials, z).1
}

fn wilson_center_half(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (center, half)
}

/// True if `value` lies inside the Wilson interval at `z`.
pub fn within_wilson(successes: u64, trials: u64, value: f64, z: f64) -> bool {
    let (lo, hi) = wilson_interval(successes, trials, z);
    // tolerate rounding at the interval edges
    value >= lo - 1e-12 && value <= hi + 1e-12
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_interval() {
        // 10/100 at 95%: (0.0552, 0.1744)
        let (lo, hi) = wilson_interval(10, 100, Z95);
        assert!((lo - 0.0552).abs() < 1e-4, "{lo}");
        assert!((hi - 0.1744).abs() < 1e-4, "{hi}");
    }

    #[test]
    fn edge_cases() {
        let (lo, hi) = wilson_interval(0, 50, Z95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.1);
        let (lo, hi) = wilson_interval(50, 50, Z95);
        assert!(lo > 0.9);
        assert_eq!(hi, 1.0);
        assert_eq!(wilson_interval(0, 0, Z95), (0.0, 1.0));
        assert!(within_wilson(0, 1000, 0.001, 3.0));
        assert!(!within_wilson(500, 1000, 0.4, 3.0));
    }
}
