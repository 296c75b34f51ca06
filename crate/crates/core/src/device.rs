//! Phenomenological model of a resonant tunnelling diode under current bias.
//!
//! The static characteristic is N-shaped: a first positive-differential-resistance
//! branch (L) rising from the origin to the peak `(v_peak, i_peak)`, a falling
//! negative-differential-resistance segment down to the valley `(v_valley, i_valley)`,
//! and a second rising branch (H) with slope `g_high`.
//!
//! Under a current source the NDR segment is never occupied. Between the valley and
//! peak currents the device is bistable: H is held until the current drops below the
//! valley, while L escapes to H with an exponential hazard in current. A slow
//! mean-reverting offset (`drift`) shifts both switching thresholds.
//!
//! Units throughout: current in mA, voltage in V, time in ms, except `drift_tau`
//! which is in seconds.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Resistance branch the device occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    /// Low-resistance state, the first PDR region.
    L,
    /// High-resistance state, the second PDR region.
    H,
}

impl Branch {
    pub fn bit(self) -> bool {
        self == Branch::H
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeviceParams {
    /// Peak current (mA).
    pub i_peak: f64,
    /// Valley current (mA).
    pub i_valley: f64,
    /// End of the first PDR branch (V).
    pub v_peak: f64,
    /// Start of the second PDR branch (V).
    pub v_valley: f64,
    /// Slope of the second PDR branch (mA/V).
    pub g_high: f64,
    /// L→H switching rate at the peak current (1/ms).
    pub lambda0: f64,
    /// e-folding current of the switching hazard (mA).
    pub i_scale: f64,
    /// Stationary standard deviation of the threshold drift (mA).
    pub drift_sigma: f64,
    /// Correlation time of the threshold drift (s).
    pub drift_tau: f64,
}

impl Default for DeviceParams {
    fn default() -> Self {
        // g_high puts the H branch at 1.15 V for a 1.50 mA bias.
        Self {
            i_peak: 1.55,
            i_valley: 0.40,
            v_peak: 0.4,
            v_valley: 0.7,
            g_high: (1.50 - 0.40) / (1.15 - 0.7),
            lambda0: 1.0,
            i_scale: 0.1,
            drift_sigma: 0.01,
            drift_tau: 60.0,
        }
    }
}

impl DeviceParams {
    /// Same parameters with the drift process switched off.
    pub fn without_drift(mut self) -> Self {
        self.drift_sigma = 0.0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("i_peak", self.i_peak),
            ("i_valley", self.i_valley),
            ("v_peak", self.v_peak),
            ("v_valley", self.v_valley),
            ("g_high", self.g_high),
            ("lambda0", self.lambda0),
            ("i_scale", self.i_scale),
            ("drift_sigma", self.drift_sigma),
            ("drift_tau", self.drift_tau),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(Error::param(format!("device.{name}"), "must be finite"));
            }
        }
        if !(self.i_valley > 0.0) {
            return Err(Error::param("device.i_valley", "must be positive"));
        }
        if !(self.i_valley < self.i_peak) {
            return Err(Error::param("device.i_peak", "must exceed i_valley"));
        }
        if !(self.v_peak > 0.0) {
            return Err(Error::param("device.v_peak", "must be positive"));
        }
        if !(self.v_peak < self.v_valley) {
            return Err(Error::param("device.v_valley", "must exceed v_peak"));
        }
        for (name, value) in [
            ("lambda0", self.lambda0),
            ("i_scale", self.i_scale),
            ("g_high", self.g_high),
            ("drift_tau", self.drift_tau),
        ] {
            if !(value > 0.0) {
                return Err(Error::param(format!("device.{name}"), "must be positive"));
            }
        }
        if self.drift_sigma < 0.0 {
            return Err(Error::param("device.drift_sigma", "must be non-negative"));
        }
        Ok(())
    }

    /// Closed-form L→H probability for a constant current held for `dt` ms,
    /// starting in L with zero drift.
    pub fn switch_probability(&self, i: f64, dt: f64) -> f64 {
        let lambda = switching_hazard(self, &DeviceState::default(), i);
        if lambda.is_infinite() {
            1.0
        } else {
            -(-lambda * dt).exp_m1()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceState {
    pub branch: Branch,
    /// Offset applied to both switching thresholds (mA).
    pub drift: f64,
    /// Simulated time since reset (ms).
    pub clock: f64,
}

impl Default for DeviceState {
    fn default() -> Self {
        Self {
            branch: Branch::L,
            drift: 0.0,
            clock: 0.0,
        }
    }
}

impl DeviceState {
    pub fn with_branch(branch: Branch) -> Self {
        Self {
            branch,
            ..Self::default()
        }
    }
}

/// Static current at voltage `v` on the voltage-swept characteristic.
pub fn iv_current(params: &DeviceParams, v: f64) -> Result<f64> {
    if !(v >= 0.0) {
        return Err(Error::domain(format!("voltage must be non-negative, got {v}")));
    }
    let p = params;
    let i = if v <= p.v_peak {
        p.i_peak * v / p.v_peak
    } else if v <= p.v_valley {
        let t = (v - p.v_peak) / (p.v_valley - p.v_peak);
        p.i_peak + t * (p.i_valley - p.i_peak)
    } else {
        p.i_valley + p.g_high * (v - p.v_valley)
    };
    Ok(i)
}

/// Voltage of branch `branch` when carrying current `i`.
///
/// Fails with [`Error::BranchRange`] when the branch cannot carry `i`, which is
/// exactly the condition that forces a switch.
pub fn branch_voltage(params: &DeviceParams, branch: Branch, i: f64) -> Result<f64> {
    let p = params;
    match branch {
        Branch::L if (0.0..=p.i_peak).contains(&i) => Ok(p.v_peak * i / p.i_peak),
        Branch::H if i >= p.i_valley && i.is_finite() => {
            Ok(p.v_valley + (i - p.i_valley) / p.g_high)
        }
        _ => Err(Error::BranchRange { branch, current: i }),
    }
}

/// Branch voltage with the current clamped into the branch range.
///
/// Drift lets a branch persist slightly past its static endpoint; the sensed
/// voltage then saturates at the endpoint.
pub fn sensed_voltage(params: &DeviceParams, branch: Branch, i: f64) -> f64 {
    let clamped = match branch {
        Branch::L => i.clamp(0.0, params.i_peak),
        Branch::H => i.max(params.i_valley),
    };
    branch_voltage(params, branch, clamped).expect("clamped current lies in branch range")
}

/// Instantaneous L→H switching rate (1/ms) at current `i`.
///
/// Zero at or below the drifted valley, exponential in current up to the drifted
/// peak, infinite above it. A device already in H has no L→H rate.
pub fn switching_hazard(params: &DeviceParams, state: &DeviceState, i: f64) -> f64 {
    if state.branch == Branch::H {
        return 0.0;
    }
    let peak = params.i_peak + state.drift;
    let valley = params.i_valley + state.drift;
    if i <= valley {
        0.0
    } else if i <= peak {
        params.lambda0 * ((i - peak) / params.i_scale).exp()
    } else {
        f64::INFINITY
    }
}

/// Advance the device by `dt` ms at constant current `i`.
pub fn step_device<R: Rng + ?Sized>(
    state: DeviceState,
    params: &DeviceParams,
    i: f64,
    dt: f64,
    rng: &mut R,
) -> DeviceState {
    debug_assert!(dt > 0.0);
    let mut next = state;
    next.clock += dt;
    next.branch = match state.branch {
        Branch::H if i < params.i_valley + state.drift => Branch::L,
        Branch::H => Branch::H,
        Branch::L => {
            let lambda = switching_hazard(params, &state, i);
            if lambda == 0.0 {
                Branch::L
            } else if lambda.is_infinite() {
                Branch::H
            } else {
                let p = -(-lambda * dt).exp_m1();
                if rng.random::<f64>() < p {
                    Branch::H
                } else {
                    Branch::L
                }
            }
        }
    };
    next
}

/// Advance the drift offset by `dt` ms as an Ornstein-Uhlenbeck process with
/// stationary standard deviation `drift_sigma`.
pub fn drift_step<R: Rng + ?Sized>(
    state: DeviceState,
    params: &DeviceParams,
    dt: f64,
    rng: &mut R,
) -> DeviceState {
    if params.drift_sigma == 0.0 {
        return state;
    }
    let decay = (-(dt / 1000.0) / params.drift_tau).exp();
    let z: f64 = rng.sample(StandardNormal);
    let noise = params.drift_sigma * (1.0 - decay * decay).sqrt();
    DeviceState {
        drift: state.drift * decay + noise * z,
        ..state
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTrace {
    /// `(current mA, voltage V)` at each ramp point, after the device settles.
    pub points: Vec<(f64, f64)>,
    /// Current of the first branch change, if any.
    pub switch_current: Option<f64>,
    /// Total number of branch changes seen during the ramp.
    pub switches: usize,
}

/// Ramp the current linearly from `start` to `stop` over `steps` points, holding
/// each point for `dt_per_step` ms.
///
/// A switch forced by crossing a deterministic threshold (the drifted peak going
/// up, the drifted valley going down) is reported at that threshold; a stochastic
/// L→H escape is reported at the ramp point where it happened.
pub fn sweep_current<R: Rng + ?Sized>(
    state: DeviceState,
    params: &DeviceParams,
    start: f64,
    stop: f64,
    steps: usize,
    dt_per_step: f64,
    rng: &mut R,
) -> Result<(SweepTrace, DeviceState)> {
    if steps < 2 {
        return Err(Error::domain("a sweep needs at least 2 steps"));
    }
    if !(dt_per_step > 0.0) {
        return Err(Error::domain("dt_per_step must be positive"));
    }
    let mut state = state;
    let mut points = Vec::with_capacity(steps);
    let mut switch_current = None;
    let mut switches = 0;
    let span = stop - start;
    for k in 0..steps {
        let i = start + span * k as f64 / (steps - 1) as f64;
        let before = state;
        state = step_device(state, params, i, dt_per_step, rng);
        if state.branch != before.branch {
            switches += 1;
            if switch_current.is_none() {
                let at = match before.branch {
                    Branch::L if i > params.i_peak + before.drift => params.i_peak + before.drift,
                    Branch::H => params.i_valley + before.drift,
                    Branch::L => i,
                };
                switch_current = Some(at);
            }
        }
        points.push((i, sensed_voltage(params, state.branch, i)));
        state = drift_step(state, params, dt_per_step, rng);
    }
    Ok((
        SweepTrace {
            points,
            switch_current,
            switches,
        },
        state,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim_rng;
    use approx::assert_relative_eq;

    fn params() -> DeviceParams {
        DeviceParams::default().without_drift()
    }

    #[test]
    fn iv_curve_anchors() {
        let p = params();
        assert_eq!(iv_current(&p, 0.0).unwrap(), 0.0);
        assert_relative_eq!(iv_current(&p, p.v_peak).unwrap(), p.i_peak);
        assert_relative_eq!(iv_current(&p, p.v_valley).unwrap(), p.i_valley);
        let mid = 0.5 * (p.v_peak + p.v_valley);
        assert_relative_eq!(
            iv_current(&p, mid).unwrap(),
            0.5 * (p.i_peak + p.i_valley),
            epsilon = 1e-12
        );
        assert!(matches!(iv_current(&p, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn iv_curve_is_continuous() {
        let p = params();
        for v in [p.v_peak, p.v_valley] {
            let lo = iv_current(&p, v - 1e-9).unwrap();
            let hi = iv_current(&p, v + 1e-9).unwrap();
            assert!((lo - hi).abs() < 1e-6);
        }
    }

    #[test]
    fn default_h_branch_sits_at_working_voltage() {
        let p = params();
        assert_relative_eq!(branch_voltage(&p, Branch::H, 1.50).unwrap(), 1.15, epsilon = 1e-12);
    }

    #[test]
    fn branch_voltage_inverts_endpoints() {
        let p = params();
        assert_relative_eq!(branch_voltage(&p, Branch::L, p.i_peak).unwrap(), p.v_peak);
        assert_relative_eq!(branch_voltage(&p, Branch::H, p.i_valley).unwrap(), p.v_valley);
        assert_relative_eq!(
            branch_voltage(&p, Branch::L, p.i_peak / 2.0).unwrap(),
            p.v_peak / 2.0
        );
        assert!(matches!(
            branch_voltage(&p, Branch::L, p.i_peak + 0.01),
            Err(Error::BranchRange { branch: Branch::L, .. })
        ));
        assert!(matches!(
            branch_voltage(&p, Branch::H, p.i_valley - 0.01),
            Err(Error::BranchRange { branch: Branch::H, .. })
        ));
    }

    #[test]
    fn hazard_values() {
        let p = params();
        let s = DeviceState::default();
        assert_eq!(switching_hazard(&p, &s, p.i_valley), 0.0);
        assert_relative_eq!(switching_hazard(&p, &s, p.i_peak), p.lambda0);
        assert_relative_eq!(
            switching_hazard(&p, &s, p.i_peak - p.i_scale),
            p.lambda0 / std::f64::consts::E,
            epsilon = 1e-12
        );
        assert!(switching_hazard(&p, &s, p.i_peak + 1e-6).is_infinite());
    }

    #[test]
    fn hazard_is_monotone_in_current() {
        let p = params();
        let s = DeviceState::default();
        let mut last = 0.0;
        for k in 0..=400 {
            let i = 2.0 * k as f64 / 400.0;
            let h = switching_hazard(&p, &s, i);
            assert!(h >= last);
            last = h;
        }
    }

    #[test]
    fn deterministic_transitions() {
        let p = params();
        let mut rng = sim_rng(1);
        let h = DeviceState::with_branch(Branch::H);
        assert_eq!(step_device(h, &p, 0.0, 1.0, &mut rng).branch, Branch::L);
        let l = DeviceState::default();
        assert_eq!(step_device(l, &p, p.i_peak + 0.01, 1.0, &mut rng).branch, Branch::H);
        // hysteresis: H is held inside the bistable window
        assert_eq!(step_device(h, &p, 1.0, 1.0, &mut rng).branch, Branch::H);
        let stepped = step_device(l, &p, 1.0, 0.25, &mut rng);
        assert_eq!(stepped.clock, 0.25);
    }

    #[test]
    fn monte_carlo_switch_frequency() {
        let p = params();
        let mut rng = sim_rng(7);
        let (i, dt) = (1.45, 1.5);
        let trials = 100_000;
        let hits = (0..trials)
            .filter(|_| step_device(DeviceState::default(), &p, i, dt, &mut rng).branch == Branch::H)
            .count();
        let empirical = hits as f64 / trials as f64;
        let expected = p.switch_probability(i, dt);
        let se = (expected * (1.0 - expected) / trials as f64).sqrt();
        assert!((empirical - expected).abs() < 0.01);
        assert!((empirical - expected).abs() < 3.0 * se, "{empirical} vs {expected}");
    }

    #[test]
    fn drift_degenerate_and_mean_reverting() {
        let p = params();
        let mut rng = sim_rng(3);
        let s = drift_step(DeviceState::default(), &p, 1000.0, &mut rng);
        assert_eq!(s.drift, 0.0);

        let mut p = DeviceParams::default();
        p.drift_sigma = 0.05;
        let start = DeviceState {
            drift: 0.3,
            ..DeviceState::default()
        };
        // dt = 100 tau: the start value is forgotten
        let n = 20_000;
        let mean: f64 = (0..n)
            .map(|_| drift_step(start, &p, 100.0 * p.drift_tau * 1000.0, &mut rng).drift)
            .sum::<f64>()
            / n as f64;
        assert!(mean.abs() < 4.0 * p.drift_sigma / (n as f64).sqrt());
    }

    #[test]
    fn drift_stationary_deviation() {
        let mut p = DeviceParams::default();
        p.drift_sigma = 0.04;
        p.drift_tau = 0.01; // 10 ms
        let mut rng = sim_rng(11);
        let mut s = DeviceState::default();
        let n = 100_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            // 20 ms steps keep successive samples nearly independent
            s = drift_step(s, &p, 20.0, &mut rng);
            sum += s.drift;
            sum_sq += s.drift * s.drift;
        }
        let mean = sum / n as f64;
        let sd = (sum_sq / n as f64 - mean * mean).sqrt();
        assert!((sd / p.drift_sigma - 1.0).abs() < 0.05, "sd = {sd}");
    }

    #[test]
    fn sweeps_switch_once_in_window() {
        let p = params();
        let mut rng = sim_rng(5);
        for _ in 0..50 {
            let (fwd, end) =
                sweep_current(DeviceState::default(), &p, 0.0, 1.2 * p.i_peak, 201, 0.5, &mut rng)
                    .unwrap();
            assert_eq!(fwd.switches, 1);
            let sw = fwd.switch_current.unwrap();
            assert!(sw > p.i_valley && sw <= p.i_peak);
            assert_eq!(end.branch, Branch::H);

            let (rev, end) = sweep_current(end, &p, 1.2 * p.i_peak, 0.0, 201, 0.5, &mut rng).unwrap();
            assert_eq!(rev.switches, 1);
            assert_eq!(rev.switch_current, Some(p.i_valley));
            assert_eq!(end.branch, Branch::L);
        }
        assert!(sweep_current(DeviceState::default(), &p, 0.0, 1.0, 1, 0.5, &mut rng).is_err());
    }

    #[test]
    fn validate_rejects_inverted_window() {
        let mut p = DeviceParams::default();
        p.i_valley = 2.0;
        assert!(matches!(p.validate(), Err(Error::InvalidParam { .. })));
        assert!(DeviceParams::default().validate().is_ok());
    }
}
