use std::fs;

use rand::Rng;
use rtd_trng::pipeline::{
    cmd_extract, cmd_generate, cmd_report, cmd_sweep, cmd_test, ExtractorMode, PipelineConfig,
    Sidecar, SweepDirection,
};
use rtd_trng::{sim_rng, BitStream, Error};

fn small_suite(cfg: &mut PipelineConfig, sequences: usize, length: usize) {
    cfg.suite.sequences = sequences;
    cfg.suite.sequence_length = length;
}

#[test]
fn generate_writes_exact_count_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("raw.bits");
    let s = cmd_generate(&PipelineConfig::default(), 8, &path).unwrap();
    assert_eq!(s.bits, 8);
    // 8-byte magic, 8-byte count, one payload byte
    assert_eq!(fs::read(&path).unwrap().len(), 17);
    let meta = Sidecar::read(&Sidecar::path_for(&path)).unwrap();
    assert_eq!(meta.get("stage"), Some("generate"));
    assert_eq!(meta.get("bits"), Some("8"));
    assert_eq!(meta.get("controller"), Some("off"));
    assert_eq!(meta.get("seed"), Some("1"));
    assert!(meta.get("device.i_peak").is_some());
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = PipelineConfig::default();
    cfg.controller = Some(Default::default());
    let a = dir.path().join("a.bits");
    let b = dir.path().join("b.bits");
    cmd_generate(&cfg, 20_000, &a).unwrap();
    cmd_generate(&cfg, 20_000, &b).unwrap();
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(
        fs::read(Sidecar::path_for(&a)).unwrap(),
        fs::read(Sidecar::path_for(&b)).unwrap()
    );
    cfg.seed = 2;
    cmd_generate(&cfg, 20_000, &b).unwrap();
    assert_ne!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn sweeps_record_one_switch_each() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = PipelineConfig::default();
    cfg.device.drift_sigma = 0.0;
    let one = cmd_sweep(&cfg, SweepDirection::Forward, 1, dir.path()).unwrap();
    assert_eq!(one.switch_currents.len(), 1);
    assert!(one.switch_currents[0].is_some());

    let fwd = cmd_sweep(&cfg, SweepDirection::Forward, 100, dir.path()).unwrap();
    assert_eq!(fwd.bins.iter().map(|b| b.2).sum::<usize>(), 100);
    let rev = cmd_sweep(&cfg, SweepDirection::Reverse, 100, dir.path()).unwrap();
    assert!(rev
        .switch_currents
        .iter()
        .all(|c| *c == Some(cfg.device.i_valley)));
    let table = fs::read_to_string(&rev.traces).unwrap();
    // header plus one line per ramp point
    assert_eq!(table.lines().count(), 1 + 100 * cfg.sweep.steps);
}

#[test]
fn extract_one_block_gives_l_bits() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("raw.bits");
    let mut rng = sim_rng(3);
    let bits: BitStream = (0..1000).map(|_| rng.random::<bool>()).collect();
    bits.write_file(&raw).unwrap();
    let out = dir.path().join("x.bits");
    let s = cmd_extract(&PipelineConfig::default(), &raw, &out).unwrap();
    assert_eq!(s.output_bits, 330);
    assert!(s.seed_derived);
    let meta = Sidecar::read(&Sidecar::path_for(&out)).unwrap();
    assert_eq!(meta.get("seed_source"), Some("derived"));
    assert_eq!(meta.get("l"), Some("330"));
    assert_eq!(meta.get("seed_fingerprint").map(str::len), Some(16));
}

#[test]
fn auto_mode_compresses_biased_input() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("raw.bits");
    let mut rng = sim_rng(4);
    let bits: BitStream = (0..200_000).map(|_| rng.random_bool(0.6)).collect();
    bits.write_file(&raw).unwrap();
    let mut cfg = PipelineConfig::default();
    cfg.extractor.mode = ExtractorMode::Auto;
    let s = cmd_extract(&cfg, &raw, &dir.path().join("x.bits")).unwrap();
    let h = s.h_min.unwrap();
    assert!((h - 0.737).abs() < 0.02, "{h}");
    assert!(s.l < s.n);
    assert_eq!(s.output_bits, 200 * s.l);

    // a constant stream carries no extractable entropy
    BitStream::from_bits(&[1; 5000]).write_file(&raw).unwrap();
    let err = cmd_extract(&cfg, &raw, &dir.path().join("y.bits")).unwrap_err();
    assert!(matches!(err, Error::InsufficientEntropy { .. }), "{err}");
}

#[test]
fn all_zero_input_fails_frequency() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("zeros.bits");
    BitStream::from_bits(&vec![0; 30 * 40_000]).write_file(&input).unwrap();
    let mut cfg = PipelineConfig::default();
    small_suite(&mut cfg, 30, 40_000);
    cfg.suite.params.longest_run_m = 128;
    cfg.suite.params.non_overlapping_block = 2000;
    cfg.suite.params.serial_m = 8;
    cfg.suite.params.approx_entropy_m = 6;
    cfg.suite.params.universal_l = 6;
    cfg.suite.params.universal_q = 640;
    let s = cmd_test(&cfg, &input, dir.path()).unwrap();
    assert!(!s.passed());
    let freq = &s.report.rows[0];
    assert_eq!(freq.test.name(), "Frequency");
    assert_eq!(freq.proportion(), "0/30");
    let tsv = fs::read_to_string(dir.path().join("report.tsv")).unwrap();
    assert!(tsv.contains("0/30\tFrequency"));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(json["rows"][0]["passing"], 0);
}

#[test]
fn test_rejects_short_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("short.bits");
    BitStream::from_bits(&[1, 0, 1]).write_file(&input).unwrap();
    let err = cmd_test(&PipelineConfig::default(), &input, dir.path()).unwrap_err();
    assert!(matches!(err, Error::TooShort { .. }));
}

#[test]
fn report_lists_missing_stages() {
    let dir = tempfile::tempdir().unwrap();
    match cmd_report(dir.path()).unwrap_err() {
        Error::MissingArtifacts(missing) => assert_eq!(missing.len(), 3),
        other => panic!("{other}"),
    }
    cmd_generate(&PipelineConfig::default(), 1000, &dir.path().join("raw.bits")).unwrap();
    match cmd_report(dir.path()).unwrap_err() {
        Error::MissingArtifacts(missing) => assert_eq!(missing.len(), 2),
        other => panic!("{other}"),
    }
}

#[test]
fn complete_small_run_and_two_amplitudes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut cfg = PipelineConfig::default();
    cfg.device.drift_sigma = 0.0;
    cfg.pulse.amplitude = 1.50;
    cmd_generate(&cfg, 100_000, &d.join("raw_150.bits")).unwrap();
    cfg.pulse.amplitude = 1.53;
    cmd_generate(&cfg, 400_000, &d.join("raw_153.bits")).unwrap();
    cmd_extract(&cfg, &d.join("raw_153.bits"), &d.join("extracted.bits")).unwrap();
    small_suite(&mut cfg, 3, 40_000);
    cfg.suite.params.longest_run_m = 128;
    cfg.suite.params.non_overlapping_block = 1000;
    cfg.suite.params.serial_m = 6;
    cfg.suite.params.approx_entropy_m = 4;
    cfg.suite.params.universal_l = 6;
    cfg.suite.params.universal_q = 640;
    cmd_test(&cfg, &d.join("extracted.bits"), d).unwrap();
    let summary = cmd_report(d).unwrap();
    for section in ["[device and acquisition]", "[extraction]", "[statistical tests]"] {
        assert!(summary.contains(section), "{summary}");
    }
    assert!(summary.contains("raw_150.bits") && summary.contains("raw_153.bits"));
    assert!(summary.contains("ratio 0.3300"));
    let means: Vec<f64> = summary
        .lines()
        .filter_map(|l| l.split("mean ").nth(1))
        .map(|m| m.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(means.len(), 2);
    assert!(means[0] < 0.5 && 0.5 < means[1], "{means:?}");
    assert_eq!(fs::read_to_string(d.join("summary.txt")).unwrap(), summary);
}
