//! Feedback on the pulse amplitude to hold the H fraction at a setpoint.
//!
//! The plant (amplitude to P(H)) is monotone and memoryless, so a single
//! accumulating term is enough: every window nudges the amplitude by
//! `gain * (setpoint - observed)` and clamps it to the allowed range.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bitstream::BitStream;
use crate::device::{DeviceParams, DeviceState};
use crate::error::{Error, Result};
use crate::pulse::{acquire_bits, PulseConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerState {
    /// Target fraction of H bits.
    pub setpoint: f64,
    /// Pulses per observation window.
    pub window: usize,
    /// Amplitude correction per unit ratio error (mA).
    pub gain: f64,
    /// Current amplitude command (mA).
    pub amplitude: f64,
    pub amp_min: f64,
    pub amp_max: f64,
}

impl Default for ControllerState {
    fn default() -> Self {
        Self::for_device(&DeviceParams::default(), &PulseConfig::default(), 0.5)
    }
}

impl ControllerState {
    /// Controller with the default gain and window, starting from the amplitude
    /// whose drift-free H probability equals `setpoint`.
    pub fn for_device(params: &DeviceParams, pulse: &PulseConfig, setpoint: f64) -> Self {
        Self {
            setpoint,
            window: 500,
            gain: 0.25 * (params.i_peak - params.i_valley),
            amplitude: calibrated_amplitude(params, pulse.width * pulse.sample_offset, setpoint),
            amp_min: params.i_valley,
            amp_max: params.i_peak + (params.i_peak - params.i_valley),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.setpoint > 0.0 && self.setpoint < 1.0) {
            return Err(Error::param("controller.setpoint", "must lie in (0, 1)"));
        }
        if self.window == 0 {
            return Err(Error::param("controller.window", "must be at least 1"));
        }
        // gain 0 is accepted and runs the loop open
        if !(self.gain >= 0.0 && self.gain.is_finite()) {
            return Err(Error::param("controller.gain", "must be non-negative"));
        }
        if !(self.amp_min < self.amp_max) {
            return Err(Error::param("controller.amp_max", "must exceed amp_min"));
        }
        if !(self.amplitude >= self.amp_min && self.amplitude <= self.amp_max) {
            return Err(Error::param("controller.amplitude", "must lie in [amp_min, amp_max]"));
        }
        Ok(())
    }
}

/// Amplitude at which a drift-free pulse held for `on_time` ms reads H with
/// probability `target`.
pub fn calibrated_amplitude(params: &DeviceParams, on_time: f64, target: f64) -> f64 {
    let rate = -(1.0 - target).ln() / on_time;
    params.i_peak + params.i_scale * (rate / params.lambda0).ln()
}

pub fn controller_update(ctrl: &ControllerState, observed_ratio: f64) -> Result<ControllerState> {
    if !(0.0..=1.0).contains(&observed_ratio) {
        return Err(Error::domain(format!(
            "observed ratio must lie in [0, 1], got {observed_ratio}"
        )));
    }
    let amplitude = (ctrl.amplitude + ctrl.gain * (ctrl.setpoint - observed_ratio))
        .clamp(ctrl.amp_min, ctrl.amp_max);
    Ok(ControllerState { amplitude, ..*ctrl })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedLoopRun {
    pub bits: BitStream,
    /// H fraction of each window.
    pub ratios: Vec<f64>,
    /// Amplitude applied during each window.
    pub amplitudes: Vec<f64>,
    pub state: DeviceState,
    pub controller: ControllerState,
}

impl ClosedLoopRun {
    pub fn mean_ratio(&self) -> f64 {
        self.ratios.iter().sum::<f64>() / self.ratios.len() as f64
    }
}

/// Alternate one window of acquisition with one controller update.
pub fn run_closed_loop<R: Rng + ?Sized>(
    state: DeviceState,
    params: &DeviceParams,
    cfg: &PulseConfig,
    ctrl: &ControllerState,
    n_windows: usize,
    rng: &mut R,
) -> Result<ClosedLoopRun> {
    if n_windows == 0 {
        return Err(Error::domain("n_windows must be at least 1"));
    }
    ctrl.validate()?;
    let mut state = state;
    let mut ctrl = *ctrl;
    let mut bits = BitStream::with_capacity(n_windows * ctrl.window);
    let mut ratios = Vec::with_capacity(n_windows);
    let mut amplitudes = Vec::with_capacity(n_windows);
    for _ in 0..n_windows {
        let pulse = PulseConfig {
            amplitude: ctrl.amplitude,
            ..*cfg
        };
        let (window, next) = acquire_bits(state, params, &pulse, ctrl.window, rng)?;
        state = next;
        let ratio = window.count_ones() as f64 / ctrl.window as f64;
        amplitudes.push(ctrl.amplitude);
        ratios.push(ratio);
        bits.append(&window);
        ctrl = controller_update(&ctrl, ratio)?;
    }
    Ok(ClosedLoopRun {
        bits,
        ratios,
        amplitudes,
        state,
        controller: ctrl,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim_rng;

    #[test]
    fn zero_error_keeps_amplitude() {
        let c = ControllerState::default();
        let next = controller_update(&c, c.setpoint).unwrap();
        assert_eq!(next.amplitude, c.amplitude);
    }

    #[test]
    fn update_sign_and_clamp() {
        let c = ControllerState::default();
        assert!(controller_update(&c, 0.7).unwrap().amplitude < c.amplitude);
        assert!(controller_update(&c, 0.3).unwrap().amplitude > c.amplitude);
        let floor = ControllerState {
            amplitude: c.amp_min,
            ..c
        };
        assert_eq!(controller_update(&floor, 1.0).unwrap().amplitude, c.amp_min);
        let mut x = c;
        for _ in 0..100 {
            x = controller_update(&x, 0.0).unwrap();
            assert!(x.amplitude <= x.amp_max);
        }
        assert_eq!(x.amplitude, x.amp_max);
        assert!(controller_update(&c, 1.1).is_err());
        assert!(controller_update(&c, -0.1).is_err());
    }

    #[test]
    fn calibration_inverts_closed_form() {
        let p = DeviceParams::default();
        let a = calibrated_amplitude(&p, 1.0, 0.5);
        assert!((p.switch_probability(a, 1.0) - 0.5).abs() < 1e-12);
        assert!(a > 1.50 && a < 1.53);
    }

    #[test]
    fn open_loop_holds_amplitude() {
        let p = DeviceParams::default();
        let cfg = PulseConfig::default();
        let ctrl = ControllerState {
            gain: 0.0,
            ..ControllerState::default()
        };
        let run = run_closed_loop(DeviceState::default(), &p, &cfg, &ctrl, 20, &mut sim_rng(4)).unwrap();
        assert!(run.amplitudes.iter().all(|&a| a == ctrl.amplitude));
        assert_eq!(run.bits.len(), 20 * ctrl.window);
    }

    #[test]
    fn drift_free_calibrated_loop_stays_on_setpoint() {
        let p = DeviceParams::default().without_drift();
        let cfg = PulseConfig::default();
        let ctrl = ControllerState::for_device(&p, &cfg, 0.5);
        let n = 100;
        let run = run_closed_loop(DeviceState::default(), &p, &cfg, &ctrl, n, &mut sim_rng(8)).unwrap();
        let band = 3.0 / (2.0 * ((ctrl.window * n) as f64).sqrt());
        assert!((run.mean_ratio() - 0.5).abs() < band, "{}", run.mean_ratio());
    }

    #[test]
    fn step_disturbance_is_rejected() {
        // drift frozen at +delta: the uncorrected amplitude reads far below setpoint
        let p = DeviceParams::default().without_drift();
        let cfg = PulseConfig::default();
        let ctrl = ControllerState::for_device(&p, &cfg, 0.5);
        let delta = 0.15;
        let state = DeviceState {
            drift: delta,
            ..DeviceState::default()
        };
        let run = run_closed_loop(state, &p, &cfg, &ctrl, 50, &mut sim_rng(12)).unwrap();
        let band = 2.0 / (ctrl.window as f64).sqrt();
        assert!((run.ratios[0] - 0.5).abs() > band);
        let settled = run.ratios.iter().position(|r| (r - 0.5).abs() < band).unwrap();
        assert!(settled < 50);
        // the amplitude converges toward the drift-compensated value
        let target = ctrl.amplitude + delta;
        let tail = &run.amplitudes[run.amplitudes.len() - 10..];
        let mean_tail = tail.iter().sum::<f64>() / tail.len() as f64;
        assert!((mean_tail - target).abs() < 0.05, "{mean_tail} vs {target}");
    }

    #[test]
    fn rejects_bad_settings() {
        let c = ControllerState {
            setpoint: 1.0,
            ..ControllerState::default()
        };
        assert!(c.validate().is_err());
        let c = ControllerState {
            window: 0,
            ..ControllerState::default()
        };
        assert!(c.validate().is_err());
    }
}
