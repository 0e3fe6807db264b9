//! Exact estimands for the shot-based estimators.
//!
//! Each estimator in the entanglement module is a statistic of the
//! classical register; evaluating the same statistic under the exact
//! register distribution (gate channels and readout bias folded in)
//! gives the value the sampled estimate converges to. Reports carry
//! these alongside the samples so deviations are attributable to shot
//! noise alone.

use num_complex::Complex64;

/// Expectation of a per-outcome statistic under an exact register
/// distribution indexed by packed cbit mask.
pub fn expectation_estimand(
    distribution: &[f64],
    statistic: impl Fn(u64) -> Complex64,
) -> Complex64 {
    distribution
        .iter()
        .enumerate()
        .map(|(y, p)| statistic(y as u64) * p)
        .sum()
}

/// Exact expectation of the two-copy purity estimator: the product of
/// pair signs over the first `l_a` pairs, where pair `i` occupies cbits
/// `2i` and `2i+1` and contributes -1 on outcome (1,1).
pub fn purity_estimand(distribution: &[f64], l_a: usize) -> f64 {
    expectation_estimand(distribution, |y| {
        let mut hits = 0u32;
        for i in 0..l_a {
            if (y >> (2 * i)) & 3 == 3 {
                hits += 1;
            }
        }
        Complex64::new(if hits.is_multiple_of(2) { 1.0 } else { -1.0 }, 0.0)
    })
    .re
}

/// Exact expectation of the parity-weighted purity estimator: the
/// product of per-pair decode values over the first `l_a` pairs.
pub fn weighted_estimand(
    distribution: &[f64],
    l_a: usize,
    decode: &[Complex64; 4],
) -> Complex64 {
    expectation_estimand(distribution, |y| {
        let mut value = Complex64::new(1.0, 0.0);
        for i in 0..l_a {
            value *= decode[((y >> (2 * i)) & 3) as usize];
        }
        value
    })
}

/// Exact expectation of the subsystem-parity estimator: the sign of the
/// bit-parity over the first `l_a` cbits.
pub fn parity_estimand(distribution: &[f64], l_a: usize) -> f64 {
    let mask = if l_a >= 64 { u64::MAX } else { (1u64 << l_a) - 1 };
    expectation_estimand(distribution, |y| {
        let ones = (y & mask).count_ones();
        Complex64::new(if ones % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
    })
    .re
}
