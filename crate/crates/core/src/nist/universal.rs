//! Maurer's universal statistical test.

use super::special::erfc;
use super::TestOutcome;
use crate::error::{Error, Result};

/// Expected value and variance of the statistic for L = 6..=16.
const REFERENCE: [(f64, f64); 11] = [
    (5.217_705_2, 2.954),
    (6.196_250_7, 3.125),
    (7.183_665_6, 3.238),
    (8.176_424_8, 3.311),
    (9.172_324_3, 3.356),
    (10.170_032, 3.384),
    (11.168_765, 3.401),
    (12.168_070, 3.410),
    (13.167_693, 3.416),
    (14.167_488, 3.419),
    (15.167_379, 3.421),
];

/// Mean log2 distance between repeated `block_len`-bit blocks over the test
/// segment, after `init_blocks` initialisation blocks. Also returns the number
/// of test blocks.
pub fn maurer_statistic(bits: &[u8], block_len: usize, init_blocks: usize) -> Result<(f64, usize)> {
    if block_len == 0 || block_len > 24 {
        return Err(Error::param("universal.block_len", "must lie in 1..=24"));
    }
    let total = bits.len() / block_len;
    if total <= init_blocks {
        return Err(Error::TooShort {
            needed: (init_blocks + 1) * block_len,
            got: bits.len(),
        });
    }
    let test_blocks = total - init_blocks;
    let mut last_seen = vec![0usize; 1 << block_len];
    let value = |i: usize| {
        bits[(i - 1) * block_len..i * block_len]
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | usize::from(b))
    };
    for i in 1..=init_blocks {
        last_seen[value(i)] = i;
    }
    let mut sum = 0.0;
    for i in init_blocks + 1..=total {
        let v = value(i);
        sum += ((i - last_seen[v]) as f64).log2();
        last_seen[v] = i;
    }
    Ok((sum / test_blocks as f64, test_blocks))
}

pub fn universal(bits: &[u8], block_len: usize, init_blocks: usize) -> Result<TestOutcome> {
    if !(6..=16).contains(&block_len) {
        return Err(Error::param("universal.block_len", "must lie in 6..=16"));
    }
    let (fn_stat, k) = maurer_statistic(bits, block_len, init_blocks)?;
    let (expected, variance) = REFERENCE[block_len - 6];
    let l = block_len as f64;
    let kf = k as f64;
    let c = 0.7 - 0.8 / l + (4.0 + 32.0 / l) * kf.powf(-3.0 / l) / 15.0;
    let sigma = c * (variance / kf).sqrt();
    let p = erfc(((fn_stat - expected) / (std::f64::consts::SQRT_2 * sigma)).abs());
    Ok(TestOutcome::single(p))
}
