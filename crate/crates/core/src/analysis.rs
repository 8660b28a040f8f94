//! Closed-form performance formulas for the clique network.
//!
//! All functions are pure. Powers of the form `(1 − x)^M` go through
//! `exp(M · ln(1 − x))` with `ln_1p` so that tiny `x` and huge `M` stay accurate.

use crate::error::{Error, Result};

/// Parameters of the code formed by `c`-cliques.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CliqueCodeParams {
    pub c: usize,
    /// Minimum number of differing edges between two cliques, `2(c−1)`.
    pub d_min: usize,
    /// Edges needed to pin a clique over its edge count: `⌊(c+1)/2⌋ / (c(c−1)/2)`.
    pub rate: f64,
    /// `rate · d_min`.
    pub merit: f64,
}

pub fn clique_code_params(c: usize) -> Result<CliqueCodeParams> {
    if c < 2 {
        return Err(Error::Domain(format!("clique order must be >= 2, got {c}")));
    }
    let d_min = 2 * (c - 1);
    let specifying = c.div_ceil(2);
    let total = c * (c - 1) / 2;
    Ok(CliqueCodeParams {
        c,
        d_min,
        rate: specifying as f64 / total as f64,
        merit: (specifying * d_min) as f64 / total as f64,
    })
}

/// `(1 − x)^m` for `x ∈ [0, 1]`.
fn pow_complement(x: f64, m: f64) -> f64 {
    if m == 0.0 {
        return 1.0;
    }
    if x >= 1.0 {
        return 0.0;
    }
    (m * (-x).ln_1p()).exp()
}

/// `1 − (1 − x)^m` without cancellation for tiny `x·m`.
fn one_minus_pow_complement(x: f64, m: f64) -> f64 {
    if m == 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    -(m * (-x).ln_1p()).exp_m1()
}

/// Expected density after `m` uniform random messages: `1 − (1 − 1/l²)^m`.
pub fn expected_density(m: f64, l: f64) -> f64 {
    one_minus_pow_complement(1.0 / (l * l), m)
}

/// Small-load approximation of the density, `m / l²`.
pub fn expected_density_approx(m: f64, l: f64) -> f64 {
    m / (l * l)
}

/// Upper bound on the number of ordered `k`-bit messages:
/// `(c−1)n² / (2c² log2(n/c))`.
pub fn max_ordered_messages(n: usize, c: usize) -> Result<f64> {
    if c < 2 || !n.is_multiple_of(c) {
        return Err(Error::Domain(format!("n={n} must be a multiple of c={c} >= 2")));
    }
    let l = n / c;
    if l < 2 || !l.is_power_of_two() {
        return Err(Error::Domain(format!("n/c = {l} must be a power of two >= 2")));
    }
    let (n, c) = (n as f64, c as f64);
    Ok((c - 1.0) * n * n / (2.0 * c * c * (l as f64).log2()))
}

/// Memory of a clustered network in bits, one per possible connection: `(c−1)n²/(2c)`.
pub fn clique_memory_bits(n: usize, c: usize) -> Result<f64> {
    if c < 2 || !n.is_multiple_of(c) {
        return Err(Error::Domain(format!("n={n} must be a multiple of c={c} >= 2")));
    }
    let (n, c) = (n as f64, c as f64);
    Ok((c - 1.0) * n * n / (2.0 * c))
}

/// Probability that a random message is accepted at density `d`: `d^{c(c−1)/2}`.
pub fn accept_prob(d: f64, c: usize) -> f64 {
    d.powi((c * (c - 1) / 2) as i32)
}

/// Expected size of the accepted set `2^k · d^{c(c−1)/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcceptedSetSize {
    pub value: f64,
    pub log2: f64,
}

pub fn accepted_set_size(k: usize, d: f64, c: usize) -> AcceptedSetSize {
    let log2 = k as f64 + (c * (c - 1) / 2) as f64 * d.log2();
    AcceptedSetSize {
        value: log2.exp2(),
        log2,
    }
}

/// Ratio of unlearnt accepted messages to learnt ones, `(2^k·p − M)/M`,
/// clamped at zero.
pub fn spurious_ratio(k: usize, accept_probability: f64, m: f64) -> f64 {
    if m <= 0.0 || accept_probability <= 0.0 {
        return 0.0;
    }
    let accepted = (k as f64).exp2() * accept_probability;
    ((accepted - m) / m).max(0.0)
}

fn check_erased(c: usize, c_e: usize) -> Result<()> {
    if c_e < 1 || c_e >= c {
        return Err(Error::Domain(format!(
            "erased clusters must satisfy 1 <= c_e < c, got c_e={c_e}, c={c}"
        )));
    }
    Ok(())
}

/// Single-iteration retrieval error with `c_e` erased clusters:
/// `1 − (1 − d^{c−c_e})^{(l−1)c_e}` with `d` the expected density after `m` messages.
pub fn retrieval_error(m: f64, l: usize, c: usize, c_e: usize) -> Result<f64> {
    check_erased(c, c_e)?;
    let d = expected_density(m, l as f64);
    Ok(retrieval_error_at_density(d, l, c, c_e))
}

/// [`retrieval_error`] at a given density rather than a message count.
pub fn retrieval_error_at_density(d: f64, l: usize, c: usize, c_e: usize) -> f64 {
    let spurious = d.powi((c - c_e) as i32);
    one_minus_pow_complement(spurious, ((l - 1) * c_e) as f64)
}

/// Low-load approximation `l · c_e · (m/l²)^{c−c_e}`.
pub fn retrieval_error_approx(m: f64, l: usize, c: usize, c_e: usize) -> Result<f64> {
    check_erased(c, c_e)?;
    let l = l as f64;
    Ok(l * c_e as f64 * (m / (l * l)).powi((c - c_e) as i32))
}

/// Probability that one erased cluster elects the right fanal, `(1 − d^{c−1})^{l−1}`.
pub fn p_retrieve(d: f64, l: usize, c: usize) -> f64 {
    pow_complement(d.powi(c as i32 - 1), (l - 1) as f64)
}

/// Probability that provided clusters stay unambiguous:
/// `((1 − d^{c−2})^{l−1})^{c−1}` without memory effect, 1 otherwise.
pub fn p_remain(d: f64, l: usize, c: usize, gamma: u32) -> f64 {
    if gamma > 0 {
        return 1.0;
    }
    pow_complement(d.powi(c as i32 - 2), ((l - 1) * (c - 1)) as f64)
}

/// Optimal cluster count for a target error `p0` with half the clusters
/// erased: `ln(n / (2 p0))`, rounded to nearest and at least 2.
pub fn c_opt(n: usize, p0: f64) -> Result<usize> {
    let raw = c_opt_unrounded(n, p0)?;
    Ok((raw.round() as usize).max(2))
}

pub fn c_opt_unrounded(n: usize, p0: f64) -> Result<f64> {
    if n < 4 {
        return Err(Error::Domain(format!("n must be >= 4, got {n}")));
    }
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(Error::Domain(format!("P0 must be in (0,1), got {p0}")));
    }
    Ok((n as f64 / (2.0 * p0)).ln())
}

/// Learnt information over memory used. May exceed 1.
pub fn network_efficiency(capacity_bits: f64, memory_bits: f64) -> Result<f64> {
    if memory_bits.is_nan() || memory_bits <= 0.0 {
        return Err(Error::Domain("memory must be positive".into()));
    }
    Ok(capacity_bits / memory_bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn clique_code() {
        let p = clique_code_params(4).unwrap();
        assert_eq!(p.d_min, 6);
        assert!((p.rate - 1.0 / 3.0).abs() < 1e-15);
        assert!((p.merit - 2.0).abs() < 1e-15);
        let p = clique_code_params(2).unwrap();
        assert_eq!((p.d_min, p.rate, p.merit), (2, 1.0, 2.0));
        assert_eq!(clique_code_params(8).unwrap().d_min, 14);
        for c in (2..40).step_by(2) {
            let p = clique_code_params(c).unwrap();
            assert_eq!(p.merit, 2.0, "c={c}");
            assert!((p.rate - 1.0 / (c as f64 - 1.0)).abs() < 1e-15);
        }
        // odd c: 3 -> 2/3 rate, merit 8/3
        let p = clique_code_params(3).unwrap();
        assert!((p.rate - 2.0 / 3.0).abs() < 1e-15);
        assert!(clique_code_params(1).is_err());
    }

    #[test]
    fn density_values() {
        assert_eq!(expected_density(0.0, 512.0), 0.0);
        let d = expected_density(10_000.0, 512.0);
        assert!((d - 0.0374).abs() < 5e-5, "{d}");
        assert!((expected_density_approx(10_000.0, 512.0) - 0.0381).abs() < 1e-4);
        for l in [16.0, 64.0, 256.0] {
            let mut m = 1.0;
            while m <= l * l / 50.0 {
                assert!(close(expected_density_approx(m, l), expected_density(m, l), 0.05));
                m *= 2.0;
            }
        }
    }

    #[test]
    fn ordered_message_bound() {
        let b = max_ordered_messages(2048, 4).unwrap();
        assert!((b - 3.0 * 2048.0f64.powi(2) / (32.0 * 9.0)).abs() < 1e-9);
        assert!((b - 43690.67).abs() < 0.01);
        let b2 = max_ordered_messages(8192, 4).unwrap();
        assert!(close(b2, 5.7e5, 0.01), "{b2}");
        assert!(max_ordered_messages(2048, 3).is_err());
        assert!(max_ordered_messages(24, 4).is_err());
        assert_eq!(clique_memory_bits(2048, 8).unwrap(), 1_835_008.0);
    }

    #[test]
    fn acceptance_formulas() {
        assert_eq!(accept_prob(0.0, 4), 0.0);
        assert_eq!(accept_prob(1.0, 4), 1.0);
        assert_eq!(accept_prob(0.5, 4), 0.015625);
        let s = accepted_set_size(36, 0.5, 4);
        assert_eq!(s.log2, 30.0);
        assert_eq!(s.value, 2f64.powi(30));
        assert_eq!(accepted_set_size(36, 0.0, 4).value, 0.0);
        assert_eq!(spurious_ratio(20, 0.0, 100.0), 0.0);
        assert!((spurious_ratio(10, 0.5, 256.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn retrieval_formulas() {
        assert_eq!(retrieval_error(0.0, 512, 4, 1).unwrap(), 0.0);
        let pe = retrieval_error(10_000.0, 512, 4, 1).unwrap();
        assert!((pe - 0.026).abs() < 0.001, "{pe}");
        assert!(retrieval_error(10.0, 64, 4, 0).is_err());
        assert!(retrieval_error(10.0, 64, 4, 4).is_err());

        // c_e = 1 matches 1 - P_retrieve at the expected density
        for &(m, l, c) in &[(100.0, 64, 4), (5000.0, 128, 6), (20000.0, 256, 8)] {
            let d = expected_density(m, l as f64);
            let a = retrieval_error(m, l, c, 1).unwrap();
            let b = 1.0 - p_retrieve(d, l, c);
            assert!((a - b).abs() < 1e-12);
        }

        // approximation within 10% for light loads
        for &(l, c, c_e) in &[(256usize, 4usize, 1usize), (512, 8, 4), (256, 8, 2)] {
            let mut m = 1.0;
            while m <= (l * l) as f64 / 100.0 {
                let exact = retrieval_error(m, l, c, c_e).unwrap();
                let approx = retrieval_error_approx(m, l, c, c_e).unwrap();
                assert!(close(approx, exact, 0.1), "l={l} c={c} m={m}: {approx} vs {exact}");
                m *= 2.0;
            }
        }
    }

    #[test]
    fn remain_probability() {
        assert_eq!(p_remain(0.3, 64, 4, 1), 1.0);
        assert_eq!(p_remain(0.0, 64, 4, 0), 1.0);
        assert!((p_remain(0.5, 2, 3, 0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn optimal_clusters() {
        assert_eq!(c_opt(2048, 0.25).unwrap(), 8);
        assert!((c_opt_unrounded(2048, 0.25).unwrap() - 4096f64.ln()).abs() < 1e-12);
        let mut prev = usize::MAX;
        for p0 in [0.001, 0.01, 0.05, 0.1, 0.25, 0.5, 0.9] {
            let c = c_opt(2048, p0).unwrap();
            assert!(c <= prev);
            prev = c;
        }
        assert_eq!(c_opt(4, 0.9).unwrap(), 2);
        assert!(c_opt(2, 0.1).is_err());
        assert!(c_opt(2048, 1.0).is_err());
    }

    #[test]
    fn efficiency_examples() {
        // percentages to within a point
        let e = network_efficiency(2.2e6, 1.6e6).unwrap();
        assert!((e - 1.37).abs() <= 0.01, "{e}");
        let e = network_efficiency(9.6e5, 1.8e6).unwrap();
        assert!((e - 0.52).abs() <= 0.015, "{e}");
        assert_eq!(network_efficiency(5.0, 5.0).unwrap(), 1.0);
        assert!(network_efficiency(1.0, 0.0).is_err());
    }
}
