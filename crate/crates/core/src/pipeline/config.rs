//! Pipeline configuration file (TOML).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bitstream::BitStream;
use crate::controller::ControllerState;
use crate::device::DeviceParams;
use crate::error::{Error, Result};
use crate::nist::TestParams;
use crate::pulse::PulseConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtractorMode {
    /// Use the configured `n` and `l`.
    #[default]
    Fixed,
    /// Estimate the min-entropy of the input and size `l` from it.
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtractorSettings {
    pub mode: ExtractorMode,
    pub n: usize,
    pub l: usize,
    /// Security parameter exponent, epsilon = 2^-k.
    pub k: u32,
    /// Hex of the packed `n + l - 1` seed bits; derived from the input when absent.
    pub seed: Option<String>,
}

impl Default for ExtractorSettings {
    fn default() -> Self {
        ExtractorSettings {
            mode: ExtractorMode::Fixed,
            n: 1000,
            l: 330,
            k: 32,
            seed: None,
        }
    }
}

impl ExtractorSettings {
    /// Parses the configured seed for output length `l`.
    pub fn seed_bits(&self, l: usize) -> Result<Option<BitStream>> {
        let Some(hex) = &self.seed else {
            return Ok(None);
        };
        let want = self.n + l - 1;
        let bytes = decode_hex(hex.trim()).ok_or_else(|| {
            Error::param("extractor.seed", "must be an even-length hex string")
        })?;
        if bytes.len() != want.div_ceil(8) {
            return Err(Error::param(
                "extractor.seed",
                format!("needs {} hex digits for {want} bits", 2 * want.div_ceil(8)),
            ));
        }
        let mut bits = BitStream::from_packed(bytes.clone(), bytes.len() * 8)?;
        bits = bits.slice(0, want)?;
        Ok(Some(bits))
    }
}

fn decode_hex(s: &str) -> Option<Vec<u8>> {
    if s.len() % 2 != 0 {
        return None;
    }
    (0..s.len())
        .step_by(2)
        .map(|i| u8::from_str_radix(s.get(i..i + 2)?, 16).ok())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub sequences: usize,
    pub sequence_length: usize,
    pub params: TestParams,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            sequences: 30,
            sequence_length: 550_000,
            params: TestParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub repeats: usize,
    pub steps: usize,
    /// Hold time per ramp point (ms).
    pub dt: f64,
    /// Ramp end as a multiple of the peak current.
    pub overdrive: f64,
    pub bins: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            repeats: 100,
            steps: 201,
            dt: 0.5,
            overdrive: 1.2,
            bins: 25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub device: DeviceParams,
    pub pulse: PulseConfig,
    /// Closed-loop amplitude control; open loop when absent.
    pub controller: Option<ControllerState>,
    pub extractor: ExtractorSettings,
    pub suite: SuiteConfig,
    pub sweep: SweepConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 1,
            device: DeviceParams::default(),
            pulse: PulseConfig::default(),
            controller: None,
            extractor: ExtractorSettings::default(),
            suite: SuiteConfig::default(),
            sweep: SweepConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: PipelineConfig =
            toml::from_str(text).map_err(|e| Error::param("config", e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        // a malformed config is a usage error, not a data error
        Self::from_toml(&text).map_err(|e| match e {
            Error::InvalidParam { field, reason } if field == "config" => {
                Error::param(path.display().to_string(), reason)
            }
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.device.validate()?;
        self.pulse.validate()?;
        if let Some(c) = &self.controller {
            c.validate()?;
        }
        let x = &self.extractor;
        if x.n < 2 {
            return Err(Error::param("extractor.n", "must be at least 2"));
        }
        if x.mode == ExtractorMode::Fixed && (x.l == 0 || x.l >= x.n) {
            return Err(Error::param("extractor.l", "must satisfy 0 < l < n"));
        }
        if x.mode == ExtractorMode::Fixed {
            x.seed_bits(x.l)?;
        }
        if self.suite.sequences == 0 {
            return Err(Error::param("suite.sequences", "must be at least 1"));
        }
        if self.suite.sequence_length == 0 {
            return Err(Error::param("suite.sequence_length", "must be at least 1"));
        }
        self.suite.params.validate()?;
        let s = &self.sweep;
        if s.repeats == 0 || s.steps < 2 || s.bins == 0 {
            return Err(Error::param("sweep", "repeats and bins must be >= 1, steps >= 2"));
        }
        if !(s.dt > 0.0) || !(s.overdrive > 1.0) {
            return Err(Error::param("sweep", "dt must be positive and overdrive above 1"));
        }
        Ok(())
    }
}
