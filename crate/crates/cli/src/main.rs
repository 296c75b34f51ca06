use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rtd_trng::pipeline::{
    cmd_extract, cmd_generate, cmd_report, cmd_sweep, cmd_test, exit_code, PipelineConfig,
    SweepDirection, EXIT_FAIL, EXIT_PASS,
};
use rtd_trng::Result;

#[derive(Parser)]
#[command(name = "rtd-trng", version, about = "Simulated RTD random number generator pipeline")]
struct Cli {
    /// Pipeline configuration (TOML). Built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the simulation seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Run directory for outputs.
    #[arg(long, global = true, default_value = "run")]
    out: PathBuf,
    /// Overrides the number of test sequences.
    #[arg(long, global = true)]
    sequences: Option<usize>,
    /// Overrides the length of each test sequence (bits).
    #[arg(long, global = true)]
    sequence_length: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    Forward,
    Reverse,
}

#[derive(Subcommand)]
enum Command {
    /// Acquire raw bits from the pulsed device.
    Generate {
        /// Number of bits.
        #[arg(long, default_value_t = 50_000_000)]
        count: usize,
        /// Pulse amplitude override (mA).
        #[arg(long)]
        amplitude: Option<f64>,
        /// Output file name inside the run directory.
        #[arg(long, default_value = "raw.bits")]
        name: String,
    },
    /// Ramp the bias current and record traces and switch currents.
    Sweep {
        #[arg(long, value_enum, default_value_t = Direction::Forward)]
        direction: Direction,
        /// Number of sweeps; defaults to the config value.
        #[arg(long)]
        repeats: Option<usize>,
    },
    /// Distil a raw bit file with the seeded hash.
    Extract {
        /// Input file; defaults to <out>/raw.bits.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Output file name inside the run directory.
        #[arg(long, default_value = "extracted.bits")]
        name: String,
    },
    /// Run the statistical test battery; exit status 1 when any row fails.
    Test {
        /// Input file; defaults to <out>/extracted.bits.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Summarise the run directory.
    Report,
}

fn load_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut cfg = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(n) = cli.sequences {
        cfg.suite.sequences = n;
    }
    if let Some(n) = cli.sequence_length {
        cfg.suite.sequence_length = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<i32> {
    let out: &Path = &cli.out;
    match &cli.command {
        Command::Generate {
            count,
            amplitude,
            name,
        } => {
            let mut cfg = load_config(cli)?;
            if let Some(a) = amplitude {
                cfg.pulse.amplitude = *a;
            }
            let s = cmd_generate(&cfg, *count, &out.join(name))?;
            println!(
                "wrote {} bits to {} (H fraction {:.4}, device clock {:.1} ms)",
                s.bits,
                s.path.display(),
                s.ones as f64 / s.bits as f64,
                s.clock_ms
            );
        }
        Command::Sweep { direction, repeats } => {
            let cfg = load_config(cli)?;
            let dir = match direction {
                Direction::Forward => SweepDirection::Forward,
                Direction::Reverse => SweepDirection::Reverse,
            };
            let s = cmd_sweep(&cfg, dir, repeats.unwrap_or(cfg.sweep.repeats), out)?;
            let switched = s.switch_currents.iter().flatten().count();
            println!(
                "{} sweeps, {switched} switched; traces in {}, histogram in {}",
                s.switch_currents.len(),
                s.traces.display(),
                s.histogram.display()
            );
        }
        Command::Extract { input, name } => {
            let cfg = load_config(cli)?;
            let input = input.clone().unwrap_or_else(|| out.join("raw.bits"));
            let s = cmd_extract(&cfg, &input, &out.join(name))?;
            println!(
                "extracted {} -> {} bits (n {}, l {}, seed {}{}) into {}",
                s.input_bits,
                s.output_bits,
                s.n,
                s.l,
                s.seed_fingerprint,
                if s.seed_derived { ", derived" } else { "" },
                s.path.display()
            );
        }
        Command::Test { input } => {
            let cfg = load_config(cli)?;
            let input = input.clone().unwrap_or_else(|| out.join("extracted.bits"));
            let s = cmd_test(&cfg, &input, out)?;
            print!("{}", s.report.to_tsv());
            if !s.passed() {
                return Ok(EXIT_FAIL);
            }
        }
        Command::Report => {
            print!("{}", cmd_report(out)?);
        }
    }
    Ok(EXIT_PASS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err) as u8)
        }
    }
}
