//! Binary matrix rank and linear complexity tests.

use super::linear::{berlekamp_massey, gf2_rank, rank_probability};
use super::special::igamc;
use super::{check_len, TestOutcome};
use crate::error::{Error, Result};

/// Rank test over disjoint 32x32 matrices filled row by row.
pub fn rank(bits: &[u8]) -> Result<TestOutcome> {
    const SIDE: usize = 32;
    const CELLS: usize = SIDE * SIDE;
    check_len(bits, 38 * CELLS)?;
    let matrices = bits.len() / CELLS;
    let mut full = 0usize;
    let mut deficient = 0usize;
    for chunk in bits.chunks_exact(CELLS) {
        let rows: [u32; SIDE] = std::array::from_fn(|r| {
            chunk[r * SIDE..(r + 1) * SIDE]
                .iter()
                .fold(0u32, |acc, &b| (acc << 1) | u32::from(b))
        });
        match gf2_rank(rows) {
            32 => full += 1,
            31 => deficient += 1,
            _ => {}
        }
    }
    let rest = matrices - full - deficient;
    let p32 = rank_probability(32, SIDE, SIDE);
    let p31 = rank_probability(31, SIDE, SIDE);
    let p30 = 1.0 - p32 - p31;
    let n = matrices as f64;
    let chi2 = (full as f64 - p32 * n).powi(2) / (p32 * n)
        + (deficient as f64 - p31 * n).powi(2) / (p31 * n)
        + (rest as f64 - p30 * n).powi(2) / (p30 * n);
    Ok(TestOutcome::single(igamc(1.0, chi2 / 2.0)?))
}

const LC_PI: [f64; 7] = [
    1.0 / 96.0,
    1.0 / 32.0,
    1.0 / 8.0,
    1.0 / 2.0,
    1.0 / 4.0,
    1.0 / 16.0,
    1.0 / 48.0,
];

pub fn linear_complexity(bits: &[u8], block_len: usize) -> Result<TestOutcome> {
    if block_len < 2 {
        return Err(Error::param("linear_complexity.block_len", "must be at least 2"));
    }
    check_len(bits, block_len)?;
    let m = block_len as f64;
    let sign = if block_len % 2 == 0 { 1.0 } else { -1.0 };
    let mu = m / 2.0 + (9.0 - sign) / 36.0 - (m / 3.0 + 2.0 / 9.0) / 2f64.powf(m);
    let mut nu = [0usize; 7];
    for block in bits.chunks_exact(block_len) {
        let l = berlekamp_massey(block) as f64;
        let t = sign * (l - mu) + 2.0 / 9.0;
        let class = if t <= -2.5 {
            0
        } else if t <= -1.5 {
            1
        } else if t <= -0.5 {
            2
        } else if t <= 0.5 {
            3
        } else if t <= 1.5 {
            4
        } else if t <= 2.5 {
            5
        } else {
            6
        };
        nu[class] += 1;
    }
    let n = (bits.len() / block_len) as f64;
    let chi2: f64 = nu
        .iter()
        .zip(&LC_PI)
        .map(|(&v, &p)| (v as f64 - n * p).powi(2) / (n * p))
        .sum();
    Ok(TestOutcome::single(igamc(3.0, chi2 / 2.0)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim_rng;
    use rand::Rng;

    #[test]
    fn class_probabilities_sum_to_one() {
        assert!((LC_PI.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rank_needs_enough_matrices() {
        assert!(rank(&vec![0u8; 1024 * 37]).is_err());
        // all-zero matrices have rank 0
        assert!(rank(&vec![0u8; 1024 * 38]).unwrap().pvalues[0] < 1e-10);
    }

    #[test]
    fn random_input_is_not_rejected_outright() {
        let mut rng = sim_rng(31);
        let s: Vec<u8> = (0..200_000).map(|_| rng.random::<bool>() as u8).collect();
        assert!(rank(&s).unwrap().pvalues[0] > 1e-4);
        assert!(linear_complexity(&s, 500).unwrap().pvalues[0] > 1e-4);
        // a short-period sequence has tiny linear complexity in every block
        let periodic: Vec<u8> = (0..200_000).map(|i| (i % 7 < 3) as u8).collect();
        assert!(linear_complexity(&periodic, 500).unwrap().pvalues[0] < 1e-10);
    }
}
