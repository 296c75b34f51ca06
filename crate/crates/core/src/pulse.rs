//! Pulsed-current bit acquisition.
//!
//! Each pulse period is an off phase at zero current (which returns the device to
//! L) followed by an on phase at the pulse amplitude. The branch read at the
//! sample instant gives the bit: L is 0, H is 1.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bitstream::BitStream;
use crate::device::{drift_step, sensed_voltage, step_device, DeviceParams, DeviceState};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PulseConfig {
    /// Pulse current (mA).
    pub amplitude: f64,
    /// Pulse width (ms).
    pub width: f64,
    /// Fraction of the period spent at `amplitude`.
    pub duty_cycle: f64,
    /// Fraction of the width at which the voltage is read.
    pub sample_offset: f64,
    /// Integration step inside a pulse (ms). Defaults to `width / 100`.
    pub substep: Option<f64>,
}

impl Default for PulseConfig {
    fn default() -> Self {
        Self {
            amplitude: 1.50,
            width: 1.0,
            duty_cycle: 0.5,
            sample_offset: 1.0,
            substep: None,
        }
    }
}

impl PulseConfig {
    pub fn with_amplitude(amplitude: f64) -> Self {
        Self {
            amplitude,
            ..Self::default()
        }
    }

    pub fn substep(&self) -> f64 {
        self.substep.unwrap_or(self.width / 100.0)
    }

    /// Duration of the zero-current phase preceding each pulse (ms).
    pub fn off_time(&self) -> f64 {
        self.width * (1.0 - self.duty_cycle) / self.duty_cycle
    }

    pub fn period(&self) -> f64 {
        self.width / self.duty_cycle
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(Error::param("pulse.amplitude", "must be positive"));
        }
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::param("pulse.width", "must be positive"));
        }
        if !(self.duty_cycle > 0.0 && self.duty_cycle < 1.0) {
            return Err(Error::param("pulse.duty_cycle", "must lie in (0, 1)"));
        }
        if !(self.sample_offset > 0.0 && self.sample_offset <= 1.0) {
            return Err(Error::param("pulse.sample_offset", "must lie in (0, 1]"));
        }
        let sub = self.substep();
        if !(sub > 0.0 && sub <= self.width) {
            return Err(Error::param("pulse.substep", "must lie in (0, width]"));
        }
        Ok(())
    }
}

/// Drive one pulse period and return the sampled bit.
///
/// The hazard is constant while the amplitude is held and H is absorbing there,
/// so holding the amplitude for the whole sampling interval in one step gives
/// exactly the same outcome distribution as integrating substep by substep.
pub fn run_pulse<R: Rng + ?Sized>(
    state: DeviceState,
    params: &DeviceParams,
    cfg: &PulseConfig,
    rng: &mut R,
) -> (DeviceState, bool) {
    let mut state = step_device(state, params, 0.0, cfg.off_time(), rng);
    let sample_at = cfg.width * cfg.sample_offset;
    state = step_device(state, params, cfg.amplitude, sample_at, rng);
    let bit = state.branch.bit();
    let rest = cfg.width - sample_at;
    if rest > 0.0 {
        state = step_device(state, params, cfg.amplitude, rest, rng);
    }
    let state = drift_step(state, params, cfg.period(), rng);
    (state, bit)
}

/// Acquire `count` bits from successive pulses.
pub fn acquire_bits<R: Rng + ?Sized>(
    state: DeviceState,
    params: &DeviceParams,
    cfg: &PulseConfig,
    count: usize,
    rng: &mut R,
) -> Result<(BitStream, DeviceState)> {
    if count == 0 {
        return Err(Error::domain("bit count must be at least 1"));
    }
    let mut bits = BitStream::with_capacity(count);
    let mut state = state;
    for _ in 0..count {
        let (next, bit) = run_pulse(state, params, cfg, rng);
        state = next;
        bits.push(bit);
    }
    Ok((bits, state))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PulseTrace {
    /// `(time ms, voltage V)`, strictly increasing in time.
    pub samples: Vec<(f64, f64)>,
    /// Bit read at the sample instant of each pulse.
    pub bits: Vec<bool>,
}

/// Time-resolved voltage across `n_pulses` periods, sampled every substep.
pub fn trace_pulses<R: Rng + ?Sized>(
    state: DeviceState,
    params: &DeviceParams,
    cfg: &PulseConfig,
    n_pulses: usize,
    rng: &mut R,
) -> Result<(PulseTrace, DeviceState)> {
    if n_pulses == 0 {
        return Err(Error::domain("n_pulses must be at least 1"));
    }
    cfg.validate()?;
    let sub = cfg.substep();
    let mut state = state;
    let mut t = 0.0;
    let mut samples = Vec::new();
    let mut bits = Vec::with_capacity(n_pulses);

    // phase ends are accumulated as integers of substeps plus a remainder so the
    // time axis does not pick up rounding drift
    let hold = |state: &mut DeviceState,
                    t: &mut f64,
                    samples: &mut Vec<(f64, f64)>,
                    current: f64,
                    duration: f64,
                    rng: &mut R| {
        let full = (duration / sub).floor() as usize;
        let rem = duration - full as f64 * sub;
        let mut steps: Vec<f64> = vec![sub; full];
        if rem > sub * 1e-9 {
            steps.push(rem);
        }
        for dt in steps {
            *state = step_device(*state, params, current, dt, rng);
            *t += dt;
            samples.push((*t, sensed_voltage(params, state.branch, current)));
        }
    };

    let sample_at = cfg.width * cfg.sample_offset;
    for _ in 0..n_pulses {
        hold(&mut state, &mut t, &mut samples, 0.0, cfg.off_time(), rng);
        hold(&mut state, &mut t, &mut samples, cfg.amplitude, sample_at, rng);
        bits.push(state.branch.bit());
        let rest = cfg.width - sample_at;
        if rest > 0.0 {
            hold(&mut state, &mut t, &mut samples, cfg.amplitude, rest, rng);
        }
        state = drift_step(state, params, cfg.period(), rng);
    }
    Ok((PulseTrace { samples, bits }, state))
}

/// Distribution of the ones-fraction over disjoint windows of a bit stream.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HFractionHistogram {
    pub window: usize,
    /// `counts[k]` is the number of windows with exactly `k` ones, i.e. the bin
    /// at fraction `k / window`.
    pub counts: Vec<usize>,
    /// Ones-fraction of each window in stream order.
    pub fractions: Vec<f64>,
}

impl HFractionHistogram {
    pub fn windows(&self) -> usize {
        self.fractions.len()
    }

    pub fn mean(&self) -> f64 {
        self.fractions.iter().sum::<f64>() / self.fractions.len() as f64
    }

    /// Sample standard deviation of the window fractions.
    pub fn std_dev(&self) -> f64 {
        let n = self.fractions.len() as f64;
        if n < 2.0 {
            return 0.0;
        }
        let m = self.mean();
        (self.fractions.iter().map(|f| (f - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    }

    /// Standard error of [`Self::mean`].
    pub fn std_error(&self) -> f64 {
        self.std_dev() / (self.fractions.len() as f64).sqrt()
    }

    /// Non-empty bins as `(fraction, count)`.
    pub fn occupied_bins(&self) -> Vec<(f64, usize)> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(k, &c)| (k as f64 / self.window as f64, c))
            .collect()
    }
}

pub fn h_fraction_histogram(bits: &BitStream, window: usize) -> Result<HFractionHistogram> {
    if bits.is_empty() {
        return Err(Error::domain("empty bit stream"));
    }
    if window == 0 {
        return Err(Error::domain("window must be at least 1"));
    }
    if bits.len() < window {
        return Err(Error::TooShort {
            needed: window,
            got: bits.len(),
        });
    }
    let mut counts = vec![0; window + 1];
    let mut fractions = Vec::with_capacity(bits.len() / window);
    let mut ones = 0;
    for (i, bit) in bits.iter().enumerate().take(bits.len() / window * window) {
        ones += usize::from(bit);
        if (i + 1) % window == 0 {
            counts[ones] += 1;
            fractions.push(ones as f64 / window as f64);
            ones = 0;
        }
    }
    Ok(HFractionHistogram {
        window,
        counts,
        fractions,
    })
}
