//! Serial and approximate entropy tests. Both count overlapping patterns over
//! the sequence extended cyclically by its own first bits.

use super::special::igamc;
use super::{check_len, TestOutcome};
use crate::error::{Error, Result};

/// Counts of every `m`-bit pattern starting at each of the `n` positions of the
/// cyclically extended sequence.
fn cyclic_pattern_counts(bits: &[u8], m: usize) -> Vec<u64> {
    let mut counts = vec![0u64; 1 << m];
    if m == 0 {
        counts[0] = bits.len() as u64;
        return counts;
    }
    let n = bits.len();
    let mask = (1usize << m) - 1;
    let mut acc = 0usize;
    for i in 0..n + m - 1 {
        acc = ((acc << 1) | usize::from(bits[i % n])) & mask;
        if i + 1 >= m {
            counts[acc] += 1;
        }
    }
    counts
}

fn psi_squared(bits: &[u8], m: usize) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let n = bits.len() as f64;
    let sum: f64 = cyclic_pattern_counts(bits, m)
        .iter()
        .map(|&c| (c as f64).powi(2))
        .sum();
    2f64.powi(m as i32) / n * sum - n
}

/// Serial test; returns the first- and second-difference P-values.
pub fn serial(bits: &[u8], m: usize) -> Result<TestOutcome> {
    if !(2..=24).contains(&m) {
        return Err(Error::param("serial.m", "must lie in 2..=24"));
    }
    check_len(bits, m)?;
    let psi_m = psi_squared(bits, m);
    let psi_m1 = psi_squared(bits, m - 1);
    let psi_m2 = psi_squared(bits, m - 2);
    let del1 = psi_m - psi_m1;
    let del2 = psi_m - 2.0 * psi_m1 + psi_m2;
    let p1 = igamc(2f64.powi(m as i32 - 2), del1.max(0.0) / 2.0)?;
    let p2 = igamc(2f64.powi(m as i32 - 3), del2.max(0.0) / 2.0)?;
    Ok(TestOutcome::many(vec![p1, p2]))
}

fn phi(bits: &[u8], m: usize) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let n = bits.len() as f64;
    cyclic_pattern_counts(bits, m)
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            p * p.ln()
        })
        .sum()
}

pub fn approximate_entropy(bits: &[u8], m: usize) -> Result<TestOutcome> {
    if !(1..=24).contains(&m) {
        return Err(Error::param("approximate_entropy.m", "must lie in 1..=24"));
    }
    check_len(bits, m + 1)?;
    let n = bits.len() as f64;
    let ap_en = phi(bits, m) - phi(bits, m + 1);
    let chi2 = 2.0 * n * (std::f64::consts::LN_2 - ap_en);
    Ok(TestOutcome::single(igamc(
        2f64.powi(m as i32 - 1),
        chi2.max(0.0) / 2.0,
    )?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nist::tests::{bits, PI_100};

    #[test]
    fn serial_examples() {
        let p = serial(&bits("0011011101"), 3).unwrap().pvalues;
        assert!((p[0] - 0.808_792).abs() < 1e-6, "{p:?}");
        assert!((p[1] - 0.670_320).abs() < 1e-6, "{p:?}");
    }

    #[test]
    fn approximate_entropy_examples() {
        let p = approximate_entropy(&bits("0100110101"), 3).unwrap().pvalues[0];
        assert!((p - 0.261_961).abs() < 1e-6, "{p}");
        let p = approximate_entropy(&bits(PI_100), 2).unwrap().pvalues[0];
        assert!((p - 0.235_301).abs() < 1e-6, "{p}");
    }

    #[test]
    fn pattern_counts_cover_every_position() {
        let b = bits("0011011101");
        for m in 0..5 {
            assert_eq!(cyclic_pattern_counts(&b, m).iter().sum::<u64>(), 10);
        }
    }
}
