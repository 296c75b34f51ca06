//! Random excursions and random excursions variant tests.
//!
//! Both look at the +/-1 random walk split into cycles that start and end at
//! zero. Sequences with too few cycles are reported as not applicable.

use super::special::{erfc, igamc};
use super::TestOutcome;
use crate::error::Result;

/// Minimum cycle count for the excursion tests to apply.
pub fn min_cycles(n: usize) -> f64 {
    (0.005 * (n as f64).sqrt()).max(500.0)
}

fn walk(bits: &[u8]) -> Vec<i64> {
    let mut s = 0i64;
    bits.iter()
        .map(|&b| {
            s += 2 * i64::from(b) - 1;
            s
        })
        .collect()
}

fn cycle_count(walk: &[i64]) -> usize {
    let zeros = walk.iter().filter(|&&s| s == 0).count();
    zeros + usize::from(walk.last().is_some_and(|&s| s != 0))
}

/// Class probabilities of 0, 1, 2, 3, 4 and >= 5 visits to state `x` in one cycle.
fn visit_probabilities(x: i64) -> [f64; 6] {
    let ax = x.unsigned_abs() as f64;
    let stay = 1.0 - 1.0 / (2.0 * ax);
    let mut pi = [0.0; 6];
    pi[0] = stay;
    for (k, p) in pi.iter_mut().enumerate().take(5).skip(1) {
        *p = 1.0 / (4.0 * ax * ax) * stay.powi(k as i32 - 1);
    }
    pi[5] = 1.0 / (2.0 * ax) * stay.powi(4);
    pi
}

/// Cycle count and the eight P-values for states -4..-1, 1..4, with no
/// applicability check.
pub fn excursion_statistics(bits: &[u8]) -> Result<(usize, Vec<f64>)> {
    const STATES: [i64; 8] = [-4, -3, -2, -1, 1, 2, 3, 4];
    let s = walk(bits);
    let j = cycle_count(&s);
    // nu[state][k]: cycles visiting the state exactly k times (k = 5 means >= 5)
    let mut nu = [[0usize; 6]; 8];
    let mut visits = [0usize; 8];
    let mut close_cycle = |visits: &mut [usize; 8]| {
        for (row, v) in nu.iter_mut().zip(visits.iter_mut()) {
            row[(*v).min(5)] += 1;
            *v = 0;
        }
    };
    for &x in &s {
        if x == 0 {
            close_cycle(&mut visits);
        } else if (-4..=4).contains(&x) {
            let idx = if x < 0 { (x + 4) as usize } else { (x + 3) as usize };
            visits[idx] += 1;
        }
    }
    if s.last().is_some_and(|&x| x != 0) {
        close_cycle(&mut visits);
    }
    let jf = j as f64;
    let mut pvalues = Vec::with_capacity(8);
    for (row, &x) in nu.iter().zip(&STATES) {
        let pi = visit_probabilities(x);
        let chi2: f64 = row
            .iter()
            .zip(&pi)
            .map(|(&v, &p)| (v as f64 - jf * p).powi(2) / (jf * p))
            .sum();
        pvalues.push(igamc(2.5, chi2 / 2.0)?);
    }
    Ok((j, pvalues))
}

/// Cycle count and the eighteen P-values for states -9..-1, 1..9, with no
/// applicability check.
pub fn excursion_variant_statistics(bits: &[u8]) -> (usize, Vec<f64>) {
    let s = walk(bits);
    let j = cycle_count(&s);
    let mut xi = [0usize; 19];
    for &x in &s {
        if (-9..=9).contains(&x) {
            xi[(x + 9) as usize] += 1;
        }
    }
    let jf = j as f64;
    let pvalues = (-9i64..=9)
        .filter(|&x| x != 0)
        .map(|x| {
            let count = xi[(x + 9) as usize] as f64;
            let den = (2.0 * jf * (4.0 * x.abs() as f64 - 2.0)).sqrt();
            if den == 0.0 {
                0.0
            } else {
                erfc((count - jf).abs() / den)
            }
        })
        .collect();
    (j, pvalues)
}

pub fn random_excursions(bits: &[u8]) -> Result<TestOutcome> {
    let (j, pvalues) = excursion_statistics(bits)?;
    if (j as f64) < min_cycles(bits.len()) {
        return Ok(TestOutcome::not_applicable(8));
    }
    Ok(TestOutcome::many(pvalues))
}

pub fn random_excursions_variant(bits: &[u8]) -> Result<TestOutcome> {
    let (j, pvalues) = excursion_variant_statistics(bits);
    if (j as f64) < min_cycles(bits.len()) {
        return Ok(TestOutcome::not_applicable(18));
    }
    Ok(TestOutcome::many(pvalues))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nist::tests::bits;

    #[test]
    fn toy_walk() {
        let b = bits("0110110101");
        let (j, p) = excursion_statistics(&b).unwrap();
        assert_eq!(j, 3);
        // state +1 is the fifth entry
        // visit classes for +1 are [1, 1, 0, 1, 0, 0], giving chi^2 = 13/3
        assert!((p[4] - igamc(2.5, 13.0 / 6.0).unwrap()).abs() < 1e-12, "{}", p[4]);
        // the published value rests on four-digit class probabilities
        assert!((p[4] - 0.502_529).abs() < 1e-4, "{}", p[4]);
        let (j, p) = excursion_variant_statistics(&b);
        assert_eq!(j, 3);
        // state +1 is the tenth entry
        assert!((p[9] - 0.683_091).abs() < 1e-6, "{}", p[9]);
        assert!(!random_excursions(&b).unwrap().applicable);
    }

    #[test]
    fn probabilities_sum_to_one() {
        for x in [-4, -1, 1, 3] {
            assert!((visit_probabilities(x).iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        let p = visit_probabilities(2);
        assert!((p[5] - 0.079_101_562_5).abs() < 1e-12);
    }
}
