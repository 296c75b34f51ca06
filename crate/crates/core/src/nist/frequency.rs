//! Frequency, block frequency, cumulative sums, runs and longest-run tests.

use super::special::{erfc, igamc, normal_cdf};
use super::{check_len, TestOutcome};
use crate::error::{Error, Result};
use std::f64::consts::SQRT_2;

pub fn frequency(bits: &[u8]) -> Result<TestOutcome> {
    check_len(bits, 1)?;
    let n = bits.len() as f64;
    let sum: i64 = bits.iter().map(|&b| 2 * i64::from(b) - 1).sum();
    let s_obs = (sum as f64).abs() / n.sqrt();
    Ok(TestOutcome::single(erfc(s_obs / SQRT_2)))
}

pub fn block_frequency(bits: &[u8], block_len: usize) -> Result<TestOutcome> {
    if block_len == 0 {
        return Err(Error::param("block_frequency.block_len", "must be at least 1"));
    }
    check_len(bits, block_len)?;
    let blocks = bits.len() / block_len;
    let chi2: f64 = bits
        .chunks_exact(block_len)
        .map(|block| {
            let pi = block.iter().map(|&b| f64::from(b)).sum::<f64>() / block_len as f64;
            (pi - 0.5).powi(2)
        })
        .sum::<f64>()
        * 4.0
        * block_len as f64;
    Ok(TestOutcome::single(igamc(blocks as f64 / 2.0, chi2 / 2.0)?))
}

/// Forward and backward cumulative sums, in that order.
pub fn cumulative_sums(bits: &[u8]) -> Result<TestOutcome> {
    check_len(bits, 1)?;
    let max_excursion = |iter: &mut dyn Iterator<Item = &u8>| {
        let mut s = 0i64;
        let mut z = 0i64;
        for &b in iter {
            s += 2 * i64::from(b) - 1;
            z = z.max(s.abs());
        }
        z
    };
    let n = bits.len() as i64;
    let forward = max_excursion(&mut bits.iter());
    let backward = max_excursion(&mut bits.iter().rev());
    Ok(TestOutcome::many(vec![
        cusum_pvalue(n, forward),
        cusum_pvalue(n, backward),
    ]))
}

fn cusum_pvalue(n: i64, z: i64) -> f64 {
    if z == 0 {
        // only possible for n = 0; treat as no excursion at all
        return 1.0;
    }
    let sqrt_n = (n as f64).sqrt();
    let zf = z as f64;
    // integer bounds use truncating division to match the reference code
    let mut sum1 = 0.0;
    let mut k = (-n / z + 1) / 4;
    while k <= (n / z - 1) / 4 {
        let kf = k as f64;
        sum1 += normal_cdf((4.0 * kf + 1.0) * zf / sqrt_n);
        sum1 -= normal_cdf((4.0 * kf - 1.0) * zf / sqrt_n);
        k += 1;
    }
    let mut sum2 = 0.0;
    let mut k = (-n / z - 3) / 4;
    while k <= (n / z - 1) / 4 {
        let kf = k as f64;
        sum2 += normal_cdf((4.0 * kf + 3.0) * zf / sqrt_n);
        sum2 -= normal_cdf((4.0 * kf + 1.0) * zf / sqrt_n);
        k += 1;
    }
    (1.0 - sum1 + sum2).clamp(0.0, 1.0)
}

pub fn runs(bits: &[u8]) -> Result<TestOutcome> {
    check_len(bits, 2)?;
    let n = bits.len() as f64;
    let pi = bits.iter().map(|&b| f64::from(b)).sum::<f64>() / n;
    // frequency prerequisite failed: the runs statistic is meaningless
    if (pi - 0.5).abs() >= 2.0 / n.sqrt() {
        return Ok(TestOutcome::single(0.0));
    }
    let v_obs = 1 + bits.windows(2).filter(|w| w[0] != w[1]).count();
    let num = (v_obs as f64 - 2.0 * n * pi * (1.0 - pi)).abs();
    let den = 2.0 * (2.0 * n).sqrt() * pi * (1.0 - pi);
    Ok(TestOutcome::single(erfc(num / den)))
}

/// Category boundaries and probabilities for the supported block lengths.
fn longest_run_table(block_len: usize) -> Option<(usize, &'static [f64])> {
    match block_len {
        8 => Some((1, &[0.2148, 0.3672, 0.2305, 0.1875])),
        128 => Some((4, &[0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124])),
        10_000 => Some((10, &[0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727])),
        _ => None,
    }
}

/// Longest run of ones in blocks of 8, 128 or 10000 bits.
pub fn longest_run(bits: &[u8], block_len: usize) -> Result<TestOutcome> {
    let (lowest, pi) = longest_run_table(block_len).ok_or_else(|| {
        Error::param("longest_run.block_len", "must be one of 8, 128, 10000")
    })?;
    check_len(bits, block_len)?;
    let k = pi.len() - 1;
    let mut nu = vec![0usize; pi.len()];
    let blocks = bits.len() / block_len;
    for block in bits.chunks_exact(block_len) {
        let mut run = 0usize;
        let mut longest = 0usize;
        for &b in block {
            if b == 1 {
                run += 1;
                longest = longest.max(run);
            } else {
                run = 0;
            }
        }
        let class = longest.saturating_sub(lowest).min(k);
        nu[class] += 1;
    }
    let n = blocks as f64;
    let chi2: f64 = nu
        .iter()
        .zip(pi)
        .map(|(&v, &p)| (v as f64 - n * p).powi(2) / (n * p))
        .sum();
    Ok(TestOutcome::single(igamc(k as f64 / 2.0, chi2 / 2.0)?))
}
