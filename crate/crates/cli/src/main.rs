use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use crgate::device::derived_couplings;
use crgate::dynamics::DriveSettings;
use crgate::pipeline::{run_pipeline, RunConfig, Stage, SUMMARY_FILE};
use crgate::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_STAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "crgate", version, about = "Cross-resonance gate calibration and benchmarking on a simulated two-transmon device")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the closed-form couplings of the configured device.
    Couplings {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Cancellation, echo and transient correction (default stages).
    Calibrate(RunArgs),
    /// Process tomography and randomized benchmarking of a calibrated drive.
    Benchmark {
        #[command(flatten)]
        args: RunArgs,
        /// Summary of an earlier `calibrate` run supplying the drive.
        /// Defaults to `<out>/summary.json` when the config has no `initial_drive`.
        #[arg(long)]
        from: Option<PathBuf>,
    },
    /// Full pipeline.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Run configuration (JSON). Reference-device defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated stage list, e.g. `cancel,echo,rb`.
    #[arg(long)]
    stages: Option<String>,
    /// Shots per expectation value.
    #[arg(long)]
    shots: Option<u32>,
}

fn load(path: Option<&Path>) -> Result<RunConfig, Error> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

impl RunArgs {
    fn resolve(&self, default_stages: Option<&[Stage]>) -> Result<RunConfig, Error> {
        let mut cfg = load(self.config.as_deref())?;
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(shots) = self.shots {
            cfg.shot_noise = Some(shots);
        }
        if let Some(list) = &self.stages {
            cfg.stages = Stage::parse_list(list)?;
        } else if let Some(stages) = default_stages {
            cfg.stages = stages.to_vec();
        }
        Ok(cfg)
    }
}

fn drive_from_summary(path: &Path) -> Result<DriveSettings, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::ConfigInvalid {
            field: "--from".into(),
            reason: format!("cannot read {}: {e}", path.display()),
        })?;
    let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::ConfigInvalid {
        field: "--from".into(),
        reason: e.to_string(),
    })?;
    serde_json::from_value(v["drive"].clone()).map_err(|e| Error::ConfigInvalid {
        field: "--from.drive".into(),
        reason: e.to_string(),
    })
}

fn couplings(config: Option<&Path>, json: bool) -> Result<(), Error> {
    let cfg = load(config)?;
    let k = derived_couplings(&cfg.device)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&k).expect("couplings serialise"));
    } else {
        println!("mu: {:.4} ({:.1}%)", k.mu, 100.0 * k.mu);
        println!("nu: {:.4} ({:.1}%)", k.nu, 100.0 * k.nu);
        println!("epsilon: {:.4e} Hz ({:.2} MHz)", k.epsilon, k.epsilon * 1e-6);
        println!("detuning: {:.4e} Hz", k.detuning);
    }
    Ok(())
}

fn pipeline(cfg: RunConfig) -> Result<(), Error> {
    cfg.validate()?;
    let summary = run_pipeline(&cfg)?;
    println!("artifacts: {}", cfg.output_dir.display());
    println!("converged: {}", summary.converged);
    println!("{}", summary.fidelity.to_text().trim_end());
    Ok(())
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Couplings { config, json } => couplings(config.as_deref(), json),
        Command::Calibrate(args) => {
            pipeline(args.resolve(Some(&[Stage::Cancel, Stage::Echo, Stage::Transients]))?)
        }
        Command::Benchmark { args, from } => {
            let mut cfg = args.resolve(Some(&[Stage::Echo, Stage::Qpt, Stage::Rb]))?;
            if cfg.initial_drive.is_none() || from.is_some() {
                let path = from.unwrap_or_else(|| cfg.output_dir.join(SUMMARY_FILE));
                cfg.initial_drive = Some(drive_from_summary(&path)?);
            }
            pipeline(cfg)
        }
        Command::Run(args) => pipeline(args.resolve(None)?),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::ConfigInvalid { .. } | Error::DegenerateDetuning { .. } => ExitCode::from(EXIT_CONFIG),
                _ => ExitCode::from(EXIT_STAGE),
            }
        }
    }
}
