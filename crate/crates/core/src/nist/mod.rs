//! The fifteen-test SP 800-22 battery and the across-sequence analysis.
//!
//! Tests take unpacked `&[u8]` bits (0/1 per byte); [`run_test`] and
//! [`run_suite`] accept a [`BitStream`] and unpack once per sequence.

pub mod complexity;
pub mod excursions;
pub mod frequency;
pub mod linear;
pub mod report;
pub mod serial;
pub mod special;
pub mod spectral;
pub mod template;
pub mod universal;

use serde::{Deserialize, Serialize};

use crate::bitstream::BitStream;
use crate::error::{Error, Result};

pub use report::{analyze_suite, pass_threshold, ReportRow, SuiteReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TestId {
    Frequency,
    BlockFrequency,
    CumulativeSums,
    Runs,
    LongestRun,
    Rank,
    #[serde(rename = "FFT")]
    Fft,
    NonOverlappingTemplate,
    OverlappingTemplate,
    Universal,
    ApproximateEntropy,
    RandomExcursions,
    RandomExcursionsVariant,
    Serial,
    LinearComplexity,
}

impl TestId {
    /// Battery order, as in the report table.
    pub const ALL: [TestId; 15] = [
        TestId::Frequency,
        TestId::BlockFrequency,
        TestId::CumulativeSums,
        TestId::Runs,
        TestId::LongestRun,
        TestId::Rank,
        TestId::Fft,
        TestId::NonOverlappingTemplate,
        TestId::OverlappingTemplate,
        TestId::Universal,
        TestId::ApproximateEntropy,
        TestId::RandomExcursions,
        TestId::RandomExcursionsVariant,
        TestId::Serial,
        TestId::LinearComplexity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestId::Frequency => "Frequency",
            TestId::BlockFrequency => "BlockFrequency",
            TestId::CumulativeSums => "CumulativeSums",
            TestId::Runs => "Runs",
            TestId::LongestRun => "LongestRun",
            TestId::Rank => "Rank",
            TestId::Fft => "FFT",
            TestId::NonOverlappingTemplate => "NonOverlappingTemplate",
            TestId::OverlappingTemplate => "OverlappingTemplate",
            TestId::Universal => "Universal",
            TestId::ApproximateEntropy => "ApproximateEntropy",
            TestId::RandomExcursions => "RandomExcursions",
            TestId::RandomExcursionsVariant => "RandomExcursionsVariant",
            TestId::Serial => "Serial",
            TestId::LinearComplexity => "LinearComplexity",
        }
    }

    pub fn from_name(name: &str) -> Option<TestId> {
        TestId::ALL.into_iter().find(|t| t.name().eq_ignore_ascii_case(name))
    }
}

impl std::fmt::Display for TestId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-test parameters. Block counts are always `n / block length`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TestParams {
    pub block_frequency_m: usize,
    pub longest_run_m: usize,
    pub non_overlapping_m: usize,
    pub non_overlapping_block: usize,
    pub overlapping_m: usize,
    pub overlapping_block: usize,
    pub universal_l: usize,
    pub universal_q: usize,
    pub approx_entropy_m: usize,
    pub serial_m: usize,
    pub linear_complexity_m: usize,
    pub alpha: f64,
}

impl Default for TestParams {
    fn default() -> Self {
        TestParams {
            block_frequency_m: 128,
            longest_run_m: 10_000,
            non_overlapping_m: 9,
            non_overlapping_block: 125_000,
            overlapping_m: 9,
            overlapping_block: 1032,
            universal_l: 7,
            universal_q: 1280,
            approx_entropy_m: 10,
            serial_m: 16,
            linear_complexity_m: 500,
            alpha: 0.05,
        }
    }
}

impl TestParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::param("alpha", "must lie in (0, 1)"));
        }
        if ![8, 128, 10_000].contains(&self.longest_run_m) {
            return Err(Error::param("longest_run_m", "must be one of 8, 128, 10000"));
        }
        if !(2..=21).contains(&self.non_overlapping_m) || !(2..=21).contains(&self.overlapping_m) {
            return Err(Error::param("template m", "must lie in 2..=21"));
        }
        if !(2..=24).contains(&self.serial_m) || !(1..=24).contains(&self.approx_entropy_m) {
            return Err(Error::param("serial_m/approx_entropy_m", "must lie in 2..=24"));
        }
        if !(6..=16).contains(&self.universal_l) {
            return Err(Error::param("universal_l", "must lie in 6..=16"));
        }
        Ok(())
    }
}

/// Raw output of a single test on a single sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct TestOutcome {
    pub pvalues: Vec<f64>,
    pub applicable: bool,
}

impl TestOutcome {
    pub fn single(p: f64) -> Self {
        Self::many(vec![p])
    }

    pub fn many(pvalues: Vec<f64>) -> Self {
        debug_assert!(pvalues.iter().all(|p| (0.0..=1.0).contains(p)), "{pvalues:?}");
        TestOutcome {
            pvalues,
            applicable: true,
        }
    }

    /// Placeholder with `count` zero P-values that analysis skips.
    pub fn not_applicable(count: usize) -> Self {
        TestOutcome {
            pvalues: vec![0.0; count],
            applicable: false,
        }
    }
}

pub(crate) fn check_len(bits: &[u8], needed: usize) -> Result<()> {
    if bits.len() < needed {
        return Err(Error::TooShort {
            needed,
            got: bits.len(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub test: TestId,
    pub pvalues: Vec<f64>,
    pub applicable: bool,
}

/// Runs one test on unpacked bits.
pub fn run_test_bits(id: TestId, params: &TestParams, bits: &[u8]) -> Result<TestResult> {
    let p = params;
    let out = match id {
        TestId::Frequency => frequency::frequency(bits)?,
        TestId::BlockFrequency => frequency::block_frequency(bits, p.block_frequency_m)?,
        TestId::CumulativeSums => frequency::cumulative_sums(bits)?,
        TestId::Runs => frequency::runs(bits)?,
        TestId::LongestRun => frequency::longest_run(bits, p.longest_run_m)?,
        TestId::Rank => complexity::rank(bits)?,
        TestId::Fft => spectral::spectral(bits)?,
        TestId::NonOverlappingTemplate => {
            template::non_overlapping_template(bits, p.non_overlapping_m, p.non_overlapping_block)?
        }
        TestId::OverlappingTemplate => {
            template::overlapping_template(bits, p.overlapping_m, p.overlapping_block)?
        }
        TestId::Universal => universal::universal(bits, p.universal_l, p.universal_q)?,
        TestId::ApproximateEntropy => serial::approximate_entropy(bits, p.approx_entropy_m)?,
        TestId::RandomExcursions => excursions::random_excursions(bits)?,
        TestId::RandomExcursionsVariant => excursions::random_excursions_variant(bits)?,
        TestId::Serial => serial::serial(bits, p.serial_m)?,
        TestId::LinearComplexity => complexity::linear_complexity(bits, p.linear_complexity_m)?,
    };
    Ok(TestResult {
        test: id,
        pvalues: out.pvalues,
        applicable: out.applicable,
    })
}

pub fn run_test(id: TestId, params: &TestParams, bits: &BitStream) -> Result<TestResult> {
    run_test_bits(id, params, &bits.to_bits())
}

/// Runs the selected tests on one sequence, in the order given.
pub fn run_battery(tests: &[TestId], params: &TestParams, bits: &BitStream) -> Result<Vec<TestResult>> {
    let unpacked = bits.to_bits();
    tests
        .iter()
        .map(|&id| run_test_bits(id, params, &unpacked))
        .collect()
}

/// Runs the selected tests on every sequence; the outer vector follows `sequences`.
pub fn run_suite(
    tests: &[TestId],
    params: &TestParams,
    sequences: &[BitStream],
) -> Result<Vec<Vec<TestResult>>> {
    params.validate()?;
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        sequences
            .par_iter()
            .map(|s| run_battery(tests, params, s))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        sequences
            .iter()
            .map(|s| run_battery(tests, params, s))
            .collect()
    }
}
