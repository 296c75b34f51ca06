//! Browser bindings for the RTD simulator.
//!
//! Each exported function runs a small simulation and returns JSON for the page
//! in `www/` to plot. The same computations are exposed as plain Rust functions
//! so they can be tested natively.

use rtd_trng::{
    acquire_bits, h_fraction_histogram, iv_current, run_closed_loop, sim_rng, sweep_current,
    trace_pulses, ControllerState, DeviceParams, DeviceState, PulseConfig, Result,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Debug, Serialize)]
pub struct Hysteresis {
    /// Voltage-swept characteristic as `(V, mA)`.
    pub iv: Vec<(f64, f64)>,
    /// Last forward and reverse sweep as `(mA, V)`.
    pub forward: Vec<(f64, f64)>,
    pub reverse: Vec<(f64, f64)>,
    /// Switching current of every forward and reverse sweep.
    pub up: Vec<f64>,
    pub down: Vec<f64>,
    pub i_peak: f64,
    pub i_valley: f64,
}

pub fn hysteresis_data(repeats: usize, steps: usize, dt: f64, seed: u64) -> Result<Hysteresis> {
    let p = DeviceParams::default().without_drift();
    let top = 1.2 * p.i_peak;
    let iv = (0..=240)
        .map(|k| {
            let v = 1.2 * k as f64 / 240.0;
            iv_current(&p, v).map(|i| (v, i))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rng = sim_rng(seed);
    let (mut up, mut down) = (Vec::new(), Vec::new());
    let (mut forward, mut reverse) = (Vec::new(), Vec::new());
    for _ in 0..repeats.max(1) {
        let (f, s) = sweep_current(DeviceState::default(), &p, 0.0, top, steps, dt, &mut rng)?;
        let (r, _) = sweep_current(s, &p, top, 0.0, steps, dt, &mut rng)?;
        up.extend(f.switch_current);
        down.extend(r.switch_current);
        forward = f.points;
        reverse = r.points;
    }
    Ok(Hysteresis {
        iv,
        forward,
        reverse,
        up,
        down,
        i_peak: p.i_peak,
        i_valley: p.i_valley,
    })
}

#[derive(Debug, Serialize)]
pub struct PulseTrain {
    /// Voltage trace of the first few pulses as `(ms, V)`.
    pub trace: Vec<(f64, f64)>,
    pub trace_bits: Vec<bool>,
    /// Number of windows holding `k` ones, for `k` in `0..=window`.
    pub counts: Vec<usize>,
    pub window: usize,
    pub mean: f64,
    /// Drift-free H probability for comparison.
    pub expected: f64,
}

pub fn pulse_train_data(
    amplitude: f64,
    width: f64,
    pulses: usize,
    window: usize,
    seed: u64,
) -> Result<PulseTrain> {
    let p = DeviceParams::default().without_drift();
    let cfg = PulseConfig {
        amplitude,
        width,
        ..PulseConfig::default()
    };
    let mut rng = sim_rng(seed);
    let (trace, state) = trace_pulses(DeviceState::default(), &p, &cfg, 24, &mut rng)?;
    let (bits, _) = acquire_bits(state, &p, &cfg, pulses.max(window), &mut rng)?;
    let hist = h_fraction_histogram(&bits, window)?;
    Ok(PulseTrain {
        trace: trace.samples,
        trace_bits: trace.bits,
        counts: hist.counts.clone(),
        window,
        mean: hist.mean(),
        expected: p.switch_probability(amplitude, width * cfg.sample_offset),
    })
}

#[derive(Debug, Serialize)]
pub struct DriftControl {
    pub controlled: Vec<f64>,
    pub amplitudes: Vec<f64>,
    pub open: Vec<f64>,
    pub controlled_mean: f64,
    pub open_mean: f64,
}

pub fn drift_control_data(
    sigma: f64,
    tau: f64,
    initial_drift: f64,
    windows: usize,
    seed: u64,
) -> Result<DriftControl> {
    let p = DeviceParams {
        drift_sigma: sigma,
        drift_tau: tau,
        ..DeviceParams::default()
    };
    let start = DeviceState {
        drift: initial_drift,
        ..DeviceState::default()
    };
    let pulse = PulseConfig::default();
    let ctrl = ControllerState::for_device(&p, &pulse, 0.5);
    let open = ControllerState { gain: 0.0, ..ctrl };
    // same seed for both runs so they see the same drift path
    let closed = run_closed_loop(start, &p, &pulse, &ctrl, windows, &mut sim_rng(seed))?;
    let free = run_closed_loop(start, &p, &pulse, &open, windows, &mut sim_rng(seed))?;
    Ok(DriftControl {
        controlled_mean: closed.mean_ratio(),
        open_mean: free.mean_ratio(),
        controlled: closed.ratios,
        amplitudes: closed.amplitudes,
        open: free.ratios,
    })
}

fn to_json<T: Serialize>(r: Result<T>) -> std::result::Result<String, JsError> {
    let value = r.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn hysteresis(repeats: usize, steps: usize, dt: f64, seed: u64) -> std::result::Result<String, JsError> {
    to_json(hysteresis_data(repeats, steps, dt, seed))
}

#[wasm_bindgen]
pub fn pulse_train(
    amplitude: f64,
    width: f64,
    pulses: usize,
    window: usize,
    seed: u64,
) -> std::result::Result<String, JsError> {
    to_json(pulse_train_data(amplitude, width, pulses, window, seed))
}

#[wasm_bindgen]
pub fn drift_control(
    sigma: f64,
    tau: f64,
    initial_drift: f64,
    windows: usize,
    seed: u64,
) -> std::result::Result<String, JsError> {
    to_json(drift_control_data(sigma, tau, initial_drift, windows, seed))
}
