//! File-based pipeline: generate → extract → test → report, plus sweep exports.
//!
//! Every artifact is written together with a `<file>.meta` sidecar holding the
//! parameters that produced it. Nothing time-of-day dependent is recorded, so
//! identical configs and seeds give byte-identical run directories.

mod config;
mod sidecar;
mod stages;

pub use config::{ExtractorMode, ExtractorSettings, PipelineConfig, SuiteConfig, SweepConfig};
pub use sidecar::Sidecar;
pub use stages::{
    cmd_extract, cmd_generate, cmd_report, cmd_sweep, cmd_test, ExtractSummary, GenerateSummary,
    SweepDirection, SweepSummary, TestSummary,
};

use crate::error::Error;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Process exit status for a failed stage.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io { .. } | Error::Format { .. } | Error::MissingArtifacts(_) => EXIT_IO,
        _ => EXIT_USAGE,
    }
}
