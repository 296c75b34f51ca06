//! Discrete Fourier transform (spectral) test.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::special::erfc;
use super::{check_len, TestOutcome};
use crate::error::Result;

/// Moduli `|S_j|` of the DFT of the +/-1 sequence for `j < n / 2`.
pub fn half_spectrum(bits: &[u8]) -> Vec<f64> {
    let mut buf: Vec<Complex<f64>> = bits
        .iter()
        .map(|&b| Complex::new(2.0 * f64::from(b) - 1.0, 0.0))
        .collect();
    let fft = FftPlanner::new().plan_fft_forward(buf.len());
    fft.process(&mut buf);
    buf.truncate(bits.len() / 2);
    buf.iter().map(|c| c.norm()).collect()
}

pub fn spectral(bits: &[u8]) -> Result<TestOutcome> {
    check_len(bits, 2)?;
    let n = bits.len() as f64;
    let threshold = ((1.0f64 / 0.05).ln() * n).sqrt();
    let peaks = half_spectrum(bits);
    let expected = 0.95 * n / 2.0;
    let observed = peaks.iter().filter(|&&m| m < threshold).count() as f64;
    let d = (observed - expected) / (n * 0.95 * 0.05 / 4.0).sqrt();
    Ok(TestOutcome::single(erfc(d.abs() / std::f64::consts::SQRT_2)))
}
