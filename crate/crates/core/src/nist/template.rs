//! Template matching tests.

use super::special::igamc;
use super::{check_len, TestOutcome};
use crate::error::{Error, Result};

/// All aperiodic `m`-bit templates in increasing numeric order, MSB first.
///
/// A template is aperiodic when no proper prefix equals the suffix of the same
/// length, so occurrences can never overlap.
pub fn aperiodic_templates(m: usize) -> Vec<u32> {
    assert!((1..=24).contains(&m), "template length out of range");
    (0u32..1 << m)
        .filter(|&t| {
            (1..m).all(|shift| {
                let overlap = m - shift;
                let mask = (1u32 << overlap) - 1;
                // prefix of length `overlap` vs suffix of length `overlap`
                (t >> shift) & mask != t & mask
            })
        })
        .collect()
}

/// Values of the `m`-bit window starting at every position (MSB first).
fn window_values(bits: &[u8], m: usize) -> Vec<u32> {
    let mask = (1u32 << m) - 1;
    let mut out = Vec::with_capacity(bits.len().saturating_sub(m - 1));
    let mut acc = 0u32;
    for (i, &b) in bits.iter().enumerate() {
        acc = ((acc << 1) | u32::from(b)) & mask;
        if i + 1 >= m {
            out.push(acc);
        }
    }
    out
}

/// Non-overlapping template matching: one P-value per aperiodic template, with
/// the sequence cut into `n / block_len` blocks.
pub fn non_overlapping_template(bits: &[u8], m: usize, block_len: usize) -> Result<TestOutcome> {
    if !(2..=21).contains(&m) {
        return Err(Error::param("non_overlapping.m", "must lie in 2..=21"));
    }
    if block_len <= m {
        return Err(Error::param("non_overlapping.block_len", "must exceed m"));
    }
    check_len(bits, block_len)?;
    let blocks = bits.len() / block_len;
    let templates = aperiodic_templates(m);
    let two_m = 2f64.powi(m as i32);
    let mu = (block_len - m + 1) as f64 / two_m;
    let var = block_len as f64 * (1.0 / two_m - (2.0 * m as f64 - 1.0) / (two_m * two_m));

    let windows: Vec<Vec<u32>> = (0..blocks)
        .map(|k| window_values(&bits[k * block_len..(k + 1) * block_len], m))
        .collect();

    let mut pvalues = Vec::with_capacity(templates.len());
    for &template in &templates {
        let mut chi2 = 0.0;
        for block in &windows {
            let mut hits = 0usize;
            let mut i = 0;
            while i < block.len() {
                if block[i] == template {
                    hits += 1;
                    i += m;
                } else {
                    i += 1;
                }
            }
            chi2 += (hits as f64 - mu).powi(2) / var;
        }
        pvalues.push(igamc(blocks as f64 / 2.0, chi2 / 2.0)?);
    }
    Ok(TestOutcome::many(pvalues))
}

/// Exact distribution of the number of overlapping all-ones `m`-runs inside a
/// random block of `block_len` bits, with the last class collecting `>= classes-1`.
pub fn overlapping_class_probabilities(m: usize, block_len: usize, classes: usize) -> Vec<f64> {
    // state: (trailing ones capped at m, hits capped at classes-1)
    let cap = classes - 1;
    let mut dist = vec![vec![0.0f64; classes]; m + 1];
    dist[0][0] = 1.0;
    for _ in 0..block_len {
        let mut next = vec![vec![0.0f64; classes]; m + 1];
        for (run, row) in dist.iter().enumerate() {
            for (hits, &p) in row.iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                let half = 0.5 * p;
                next[0][hits] += half;
                let run1 = (run + 1).min(m);
                let hits1 = if run1 == m { (hits + 1).min(cap) } else { hits };
                next[run1][hits1] += half;
            }
        }
        dist = next;
    }
    (0..classes).map(|h| dist.iter().map(|row| row[h]).sum()).collect()
}

/// Overlapping template matching with the all-ones template.
pub fn overlapping_template(bits: &[u8], m: usize, block_len: usize) -> Result<TestOutcome> {
    const CLASSES: usize = 6;
    if !(2..=21).contains(&m) {
        return Err(Error::param("overlapping.m", "must lie in 2..=21"));
    }
    if block_len <= m {
        return Err(Error::param("overlapping.block_len", "must exceed m"));
    }
    check_len(bits, block_len)?;
    let blocks = bits.len() / block_len;
    let pi = overlapping_class_probabilities(m, block_len, CLASSES);
    let all_ones = (1u32 << m) - 1;
    let mut nu = [0usize; CLASSES];
    for k in 0..blocks {
        let hits = window_values(&bits[k * block_len..(k + 1) * block_len], m)
            .into_iter()
            .filter(|&w| w == all_ones)
            .count();
        nu[hits.min(CLASSES - 1)] += 1;
    }
    let n = blocks as f64;
    let chi2: f64 = nu
        .iter()
        .zip(&pi)
        .map(|(&v, &p)| (v as f64 - n * p).powi(2) / (n * p))
        .sum();
    Ok(TestOutcome::single(igamc((CLASSES - 1) as f64 / 2.0, chi2 / 2.0)?))
}
