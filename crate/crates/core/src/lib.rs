//! Simulation of a resonant-tunnelling-diode true random number generator.
//!
//! The pipeline mirrors the hardware: a stochastic device model ([`device`]) is
//! driven by current pulses ([`pulse`]) to produce raw bits, an optional feedback
//! loop ([`controller`]) holds the output ratio against slow drift, a seeded
//! two-universal hash ([`extractor`]) distils the raw stream, and the SP 800-22
//! battery ([`nist`]) checks the result. [`pipeline`] ties the stages to files and
//! the command line.

pub mod bitstream;
pub mod controller;
pub mod device;
pub mod error;
pub mod extractor;
pub mod nist;
pub mod pipeline;
pub mod pulse;

pub use bitstream::BitStream;
pub use controller::{controller_update, run_closed_loop, ClosedLoopRun, ControllerState};
pub use device::{
    branch_voltage, drift_step, iv_current, step_device, sweep_current, switching_hazard, Branch,
    DeviceParams, DeviceState, SweepTrace,
};
pub use error::{Error, Result};
pub use extractor::{
    choose_block_params, extract, min_entropy_estimate, seeded_hash_block, ExtractorConfig,
};
pub use pulse::{
    acquire_bits, h_fraction_histogram, run_pulse, trace_pulses, HFractionHistogram, PulseConfig,
    PulseTrace,
};

use rand::SeedableRng;

/// Deterministic generator used for every simulated random draw.
pub type SimRng = rand_chacha::ChaCha8Rng;

pub fn sim_rng(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}
