use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::bitstream::BitStream;
use crate::controller::run_closed_loop;
use crate::device::{sweep_current, Branch, DeviceParams, DeviceState};
use crate::error::{Error, Result};
use crate::extractor::{
    choose_block_params, derive_seed, extract, fingerprint, min_entropy_estimate, ExtractorConfig,
};
use crate::nist::{analyze_suite, run_suite, SuiteReport, TestId};
use crate::pulse::{acquire_bits, h_fraction_histogram, PulseConfig};
use crate::sim_rng;

use super::config::{ExtractorMode, PipelineConfig};
use super::sidecar::Sidecar;

fn put_device(meta: &mut Sidecar, p: &DeviceParams) {
    meta.set("device.i_peak", p.i_peak);
    meta.set("device.i_valley", p.i_valley);
    meta.set("device.v_peak", p.v_peak);
    meta.set("device.v_valley", p.v_valley);
    meta.set("device.g_high", p.g_high);
    meta.set("device.lambda0", p.lambda0);
    meta.set("device.i_scale", p.i_scale);
    meta.set("device.drift_sigma", p.drift_sigma);
    meta.set("device.drift_tau", p.drift_tau);
}

fn put_pulse(meta: &mut Sidecar, p: &PulseConfig) {
    meta.set("pulse.amplitude", p.amplitude);
    meta.set("pulse.width", p.width);
    meta.set("pulse.duty_cycle", p.duty_cycle);
    meta.set("pulse.sample_offset", p.sample_offset);
}

/// Input names are recorded without their directory so that run directories
/// stay byte-identical wherever they live; the digest pins the content.
fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerateSummary {
    pub path: PathBuf,
    pub bits: usize,
    pub ones: usize,
    /// Simulated device time at the end of acquisition (ms).
    pub clock_ms: f64,
}

/// Acquire `count` raw bits and write them to `out`.
pub fn cmd_generate(cfg: &PipelineConfig, count: usize, out: &Path) -> Result<GenerateSummary> {
    cfg.validate()?;
    if count == 0 {
        return Err(Error::param("count", "must be at least 1"));
    }
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        ensure_dir(dir)?;
    }
    let mut rng = sim_rng(cfg.seed);
    let start = DeviceState::default();
    let mut meta = Sidecar::new("generate");
    let (bits, end) = match &cfg.controller {
        None => {
            meta.set("controller", "off");
            acquire_bits(start, &cfg.device, &cfg.pulse, count, &mut rng)?
        }
        Some(ctrl) => {
            meta.set("controller", "on");
            let windows = count.div_ceil(ctrl.window);
            let run = run_closed_loop(start, &cfg.device, &cfg.pulse, ctrl, windows, &mut rng)?;
            meta.set("controller.setpoint", ctrl.setpoint);
            meta.set("controller.window", ctrl.window);
            meta.set("controller.gain", ctrl.gain);
            meta.set("controller.amplitude_start", ctrl.amplitude);
            meta.set("controller.amplitude_end", run.controller.amplitude);
            meta.set("controller.mean_ratio", run.mean_ratio());
            (run.bits.slice(0, count)?, run.state)
        }
    };
    meta.set("seed", cfg.seed);
    meta.set("bits", bits.len());
    meta.set("ones", bits.count_ones());
    meta.set("clock_start_ms", start.clock);
    meta.set("clock_end_ms", end.clock);
    meta.set("digest", fingerprint(&bits));
    put_device(&mut meta, &cfg.device);
    put_pulse(&mut meta, &cfg.pulse);
    bits.write_file(out)?;
    meta.write_for(out)?;
    Ok(GenerateSummary {
        path: out.to_path_buf(),
        bits: bits.len(),
        ones: bits.count_ones(),
        clock_ms: end.clock,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepDirection {
    Forward,
    Reverse,
}

impl SweepDirection {
    pub fn name(self) -> &'static str {
        match self {
            SweepDirection::Forward => "forward",
            SweepDirection::Reverse => "reverse",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub traces: PathBuf,
    pub histogram: PathBuf,
    /// Switch current of each sweep; `None` when the sweep never switched.
    pub switch_currents: Vec<Option<f64>>,
    /// `(low, high, count)` bins over the observed switch currents.
    pub bins: Vec<(f64, f64, usize)>,
}

/// Equal-width bins spanning the observed values.
pub fn histogram(values: &[f64], bins: usize) -> Vec<(f64, f64, usize)> {
    if values.is_empty() || bins == 0 {
        return Vec::new();
    }
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        return vec![(lo, hi, values.len())];
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        counts[(((v - lo) / width) as usize).min(bins - 1)] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(k, c)| (lo + k as f64 * width, lo + (k + 1) as f64 * width, c))
        .collect()
}

/// Repeated current ramps between zero and `overdrive * i_peak`, written as a
/// trace table and a switch-current histogram under `out_dir`.
pub fn cmd_sweep(
    cfg: &PipelineConfig,
    direction: SweepDirection,
    repeats: usize,
    out_dir: &Path,
) -> Result<SweepSummary> {
    cfg.validate()?;
    if repeats == 0 {
        return Err(Error::param("repeats", "must be at least 1"));
    }
    ensure_dir(out_dir)?;
    let p = &cfg.device;
    let s = &cfg.sweep;
    let top = s.overdrive * p.i_peak;
    let (from, to, branch) = match direction {
        SweepDirection::Forward => (0.0, top, Branch::L),
        SweepDirection::Reverse => (top, 0.0, Branch::H),
    };
    let mut rng = sim_rng(cfg.seed);
    let mut state = DeviceState::default();
    let mut traces = String::from("sweep\tcurrent_mA\tvoltage_V\n");
    let mut switch_currents = Vec::with_capacity(repeats);
    for r in 0..repeats {
        state.branch = branch;
        let (trace, next) = sweep_current(state, p, from, to, s.steps, s.dt, &mut rng)?;
        state = next;
        for (i, v) in &trace.points {
            writeln!(traces, "{r}\t{i}\t{v}").expect("string write");
        }
        switch_currents.push(trace.switch_current);
    }
    let observed: Vec<f64> = switch_currents.iter().flatten().copied().collect();
    let bins = histogram(&observed, s.bins);
    let mut hist = String::from("low_mA\thigh_mA\tcount\n");
    for (lo, hi, c) in &bins {
        writeln!(hist, "{lo}\t{hi}\t{c}").expect("string write");
    }
    let name = direction.name();
    let trace_path = out_dir.join(format!("sweep_{name}.tsv"));
    let hist_path = out_dir.join(format!("sweep_{name}_hist.tsv"));
    write_text(&trace_path, &traces)?;
    write_text(&hist_path, &hist)?;
    let mut meta = Sidecar::new("sweep");
    meta.set("direction", name);
    meta.set("repeats", repeats);
    meta.set("steps", s.steps);
    meta.set("dt_ms", s.dt);
    meta.set("start_mA", from);
    meta.set("stop_mA", to);
    meta.set("seed", cfg.seed);
    meta.set("switched", observed.len());
    put_device(&mut meta, p);
    meta.write_for(&trace_path)?;
    meta.set("stage", "sweep-histogram");
    meta.set("bins", bins.len());
    meta.write_for(&hist_path)?;
    Ok(SweepSummary {
        traces: trace_path,
        histogram: hist_path,
        switch_currents,
        bins,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractSummary {
    pub path: PathBuf,
    pub input_bits: usize,
    pub output_bits: usize,
    pub n: usize,
    pub l: usize,
    /// Estimated min-entropy per bit, in auto mode.
    pub h_min: Option<f64>,
    pub seed_fingerprint: String,
    pub seed_derived: bool,
}

/// Distil the bit stream in `input` into `out`.
pub fn cmd_extract(cfg: &PipelineConfig, input: &Path, out: &Path) -> Result<ExtractSummary> {
    cfg.validate()?;
    let raw = BitStream::read_file(input)?;
    let x = &cfg.extractor;
    if raw.len() < x.n {
        return Err(Error::TooShort {
            needed: x.n,
            got: raw.len(),
        });
    }
    let (l, h_min) = match x.mode {
        ExtractorMode::Fixed => (x.l, None),
        ExtractorMode::Auto => {
            let h = min_entropy_estimate(&raw)?;
            (choose_block_params(h, x.n, x.k)?, Some(h))
        }
    };
    let (seed, derived) = match x.seed_bits(l)? {
        Some(seed) => (seed, false),
        None => (derive_seed(&raw, x.n, l)?, true),
    };
    let ext = ExtractorConfig::new(x.n, l, seed, x.k)?;
    let distilled = extract(&raw, &ext)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        ensure_dir(dir)?;
    }
    distilled.write_file(out)?;
    let mut meta = Sidecar::new("extract");
    meta.set("mode", match x.mode {
        ExtractorMode::Fixed => "fixed",
        ExtractorMode::Auto => "auto",
    });
    meta.set("n", x.n);
    meta.set("l", l);
    meta.set("k", x.k);
    if let Some(h) = h_min {
        meta.set("h_min", h);
    }
    meta.set("seed_source", if derived { "derived" } else { "config" });
    meta.set("seed_fingerprint", ext.seed_fingerprint());
    meta.set("input", file_name(input));
    meta.set("input_bits", raw.len());
    meta.set("input_digest", fingerprint(&raw));
    meta.set("output_bits", distilled.len());
    meta.set("digest", fingerprint(&distilled));
    meta.write_for(out)?;
    Ok(ExtractSummary {
        path: out.to_path_buf(),
        input_bits: raw.len(),
        output_bits: distilled.len(),
        n: x.n,
        l,
        h_min,
        seed_fingerprint: ext.seed_fingerprint(),
        seed_derived: derived,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestSummary {
    pub tsv: PathBuf,
    pub json: PathBuf,
    pub report: SuiteReport,
}

impl TestSummary {
    pub fn passed(&self) -> bool {
        self.report.all_passed()
    }
}

/// Split `input` into the configured sequences, run the battery and write the
/// report as `report.tsv` and `report.json` under `out_dir`.
pub fn cmd_test(cfg: &PipelineConfig, input: &Path, out_dir: &Path) -> Result<TestSummary> {
    cfg.validate()?;
    let data = BitStream::read_file(input)?;
    let suite = &cfg.suite;
    let needed = suite.sequences * suite.sequence_length;
    if data.len() < needed {
        return Err(Error::TooShort {
            needed,
            got: data.len(),
        });
    }
    let sequences: Vec<BitStream> = (0..suite.sequences)
        .map(|k| data.slice(k * suite.sequence_length, suite.sequence_length))
        .collect::<Result<_>>()?;
    let results = run_suite(&TestId::ALL, &suite.params, &sequences)?;
    let report = analyze_suite(&results, suite.params.alpha);
    ensure_dir(out_dir)?;
    let tsv = out_dir.join("report.tsv");
    let json = out_dir.join("report.json");
    write_text(&tsv, &report.to_tsv())?;
    write_text(&json, &report.to_json())?;
    let mut meta = Sidecar::new("test");
    meta.set("input", file_name(input));
    meta.set("input_bits", data.len());
    meta.set("input_digest", fingerprint(&data));
    meta.set("sequences", suite.sequences);
    meta.set("sequence_length", suite.sequence_length);
    let p = &suite.params;
    meta.set("alpha", p.alpha);
    meta.set("block_frequency_m", p.block_frequency_m);
    meta.set("longest_run_m", p.longest_run_m);
    meta.set("non_overlapping_m", p.non_overlapping_m);
    meta.set("non_overlapping_block", p.non_overlapping_block);
    meta.set("overlapping_m", p.overlapping_m);
    meta.set("overlapping_block", p.overlapping_block);
    meta.set("universal_l", p.universal_l);
    meta.set("universal_q", p.universal_q);
    meta.set("approx_entropy_m", p.approx_entropy_m);
    meta.set("serial_m", p.serial_m);
    meta.set("linear_complexity_m", p.linear_complexity_m);
    meta.set("rows", report.rows.len());
    meta.set("failed_rows", report.failed_rows().count());
    meta.set("verdict", if report.all_passed() { "pass" } else { "fail" });
    meta.write_for(&tsv)?;
    Ok(TestSummary { tsv, json, report })
}

/// Pipeline artifacts found in a run directory, in file-name order.
struct RunArtifacts {
    generated: Vec<(PathBuf, Sidecar)>,
    extracted: Vec<(PathBuf, Sidecar)>,
    tested: Vec<(PathBuf, Sidecar)>,
}

fn scan(dir: &Path) -> Result<RunArtifacts> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut metas: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "meta"))
        .collect();
    metas.sort();
    let mut found = RunArtifacts {
        generated: Vec::new(),
        extracted: Vec::new(),
        tested: Vec::new(),
    };
    for meta_path in metas {
        let meta = Sidecar::read(&meta_path)?;
        let artifact = meta_path.with_extension("");
        if !artifact.exists() {
            continue;
        }
        match meta.get("stage") {
            Some("generate") => found.generated.push((artifact, meta)),
            Some("extract") => found.extracted.push((artifact, meta)),
            Some("test") => found.tested.push((artifact, meta)),
            _ => {}
        }
    }
    Ok(found)
}

fn render_fractions(out: &mut String, bits: &BitStream, window: usize) -> Result<()> {
    let hist = h_fraction_histogram(bits, window)?;
    writeln!(
        out,
        "  H fraction over {} windows of {window}: mean {:.4}, std {:.4}",
        hist.windows(),
        hist.mean(),
        hist.std_dev()
    )
    .expect("string write");
    // 2% bins across [0, 1]; `|` marks the 50/50 line
    let mut bins = [0usize; 50];
    for f in &hist.fractions {
        bins[((f * 50.0) as usize).min(49)] += 1;
    }
    let peak = *bins.iter().max().unwrap_or(&1).max(&1);
    let first = bins.iter().position(|&c| c > 0).unwrap_or(0).min(24);
    let last = bins.iter().rposition(|&c| c > 0).unwrap_or(49).max(25);
    for (k, &c) in bins.iter().enumerate().take(last + 1).skip(first) {
        let bar = "#".repeat((c * 40).div_ceil(peak));
        let mark = if k == 25 { "|" } else { " " };
        writeln!(out, "  {:>5.2} {mark} {bar:<40} {c}", k as f64 / 50.0).expect("string write");
    }
    Ok(())
}

/// Summarise a run directory into `summary.txt`, returning the text.
pub fn cmd_report(dir: &Path) -> Result<String> {
    if !dir.is_dir() {
        return Err(Error::MissingArtifacts(vec![format!(
            "run directory {}",
            dir.display()
        )]));
    }
    let run = scan(dir)?;
    let mut missing = Vec::new();
    if run.generated.is_empty() {
        missing.push("generated bit stream (generate)".to_string());
    }
    if run.extracted.is_empty() {
        missing.push("extracted bit stream (extract)".to_string());
    }
    if run.tested.is_empty() {
        missing.push("test report (test)".to_string());
    }
    if !missing.is_empty() {
        return Err(Error::MissingArtifacts(missing));
    }

    let mut out = String::from("RUN SUMMARY\n\n");
    out.push_str("[device and acquisition]\n");
    for (path, meta) in &run.generated {
        let name = path.file_name().map(|n| n.to_string_lossy()).unwrap_or_default();
        writeln!(
            out,
            "{name}: {} bits, amplitude {} mA, width {} ms, controller {}, seed {}",
            meta.get("bits").unwrap_or("?"),
            meta.get("pulse.amplitude").unwrap_or("?"),
            meta.get("pulse.width").unwrap_or("?"),
            meta.get("controller").unwrap_or("?"),
            meta.get("seed").unwrap_or("?"),
        )
        .expect("string write");
        writeln!(
            out,
            "  I_p {} mA, I_v {} mA, drift sigma {} mA, tau {} s",
            meta.get("device.i_peak").unwrap_or("?"),
            meta.get("device.i_valley").unwrap_or("?"),
            meta.get("device.drift_sigma").unwrap_or("?"),
            meta.get("device.drift_tau").unwrap_or("?"),
        )
        .expect("string write");
        let window = meta
            .get("controller.window")
            .and_then(|w| w.parse().ok())
            .unwrap_or(500);
        let bits = BitStream::read_file(path)?;
        if bits.len() >= window {
            render_fractions(&mut out, &bits, window)?;
        }
    }

    out.push_str("\n[extraction]\n");
    for (path, meta) in &run.extracted {
        let name = path.file_name().map(|n| n.to_string_lossy()).unwrap_or_default();
        let input: f64 = meta.get("input_bits").and_then(|v| v.parse().ok()).unwrap_or(0.0);
        let output: f64 = meta.get("output_bits").and_then(|v| v.parse().ok()).unwrap_or(0.0);
        writeln!(
            out,
            "{name}: {} -> {} bits (ratio {:.4}), n {}, l {}, k {}, seed {} ({})",
            input,
            output,
            if input > 0.0 { output / input } else { 0.0 },
            meta.get("n").unwrap_or("?"),
            meta.get("l").unwrap_or("?"),
            meta.get("k").unwrap_or("?"),
            meta.get("seed_fingerprint").unwrap_or("?"),
            meta.get("seed_source").unwrap_or("?"),
        )
        .expect("string write");
    }

    out.push_str("\n[statistical tests]\n");
    for (path, meta) in &run.tested {
        let name = path.file_name().map(|n| n.to_string_lossy()).unwrap_or_default();
        writeln!(
            out,
            "{name}: {} sequences of {} bits, {} rows, {} failed, verdict {}",
            meta.get("sequences").unwrap_or("?"),
            meta.get("sequence_length").unwrap_or("?"),
            meta.get("rows").unwrap_or("?"),
            meta.get("failed_rows").unwrap_or("?"),
            meta.get("verdict").unwrap_or("?"),
        )
        .expect("string write");
    }
    write_text(&dir.join("summary.txt"), &out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_bins() {
        assert!(histogram(&[], 5).is_empty());
        assert_eq!(histogram(&[0.4, 0.4, 0.4], 10), vec![(0.4, 0.4, 3)]);
        let h = histogram(&[0.0, 0.5, 1.0, 0.99], 2);
        assert_eq!(h.len(), 2);
        assert_eq!(h[0].2, 1);
        assert_eq!(h[1].2, 3);
    }

    #[test]
    fn exit_codes() {
        use super::super::{exit_code, EXIT_IO, EXIT_USAGE};
        assert_eq!(exit_code(&Error::param("x", "y")), EXIT_USAGE);
        assert_eq!(exit_code(&Error::MissingArtifacts(vec![])), EXIT_IO);
        let io = std::io::Error::other("boom");
        assert_eq!(exit_code(&Error::io("f", io)), EXIT_IO);
    }
}
