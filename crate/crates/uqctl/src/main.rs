use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use quantile_model::Mode;
use uqctl::{
    cmd_calibrate, cmd_evaluate, cmd_generate, cmd_report, cmd_train, load_config, parse_mode,
    CliError, ExperimentConfig,
};

#[derive(Parser)]
#[command(name = "uqctl", about = "Calibrated pixelwise uncertainty for undersampled recons")]
struct Cli {
    /// Path to the experiment config (flat JSON; missing keys take defaults).
    #[arg(long, global = true, default_value = "experiment.json")]
    config: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the train/val/calib/test splits onto disk.
    Generate {
        /// Overwrite an existing dataset and downstream artifacts.
        #[arg(long)]
        force: bool,
    },
    /// Fit the interval model on the train split.
    Train {
        /// Restrict to one mode (qr or resm); default runs all configured.
        #[arg(long)]
        mode: Option<String>,
    },
    /// Select the interval scaling factor on the calibration split.
    Calibrate {
        #[arg(long)]
        mode: Option<String>,
    },
    /// Score the test split and write maps, metrics, and overlays.
    Evaluate {
        #[arg(long)]
        mode: Option<String>,
    },
    /// Aggregate per-case metrics into summary tables.
    Report,
}

fn modes_for(cfg: &ExperimentConfig, arg: &Option<String>) -> Result<Vec<Mode>, CliError> {
    match arg {
        Some(name) => Ok(vec![parse_mode(name)?]),
        None => Ok(cfg.modes.clone()),
    }
}

fn init_thread_pool() {
    if let Ok(raw) = std::env::var("UQCTL_THREADS") {
        if let Ok(n) = raw.parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = load_config(&cli.config)?;
    match &cli.command {
        Command::Generate { force } => cmd_generate(&cfg, *force),
        Command::Train { mode } => {
            for m in modes_for(&cfg, mode)? {
                cmd_train(&cfg, m)?;
            }
            Ok(())
        }
        Command::Calibrate { mode } => {
            for m in modes_for(&cfg, mode)? {
                cmd_calibrate(&cfg, m)?;
            }
            Ok(())
        }
        Command::Evaluate { mode } => {
            for m in modes_for(&cfg, mode)? {
                cmd_evaluate(&cfg, m)?;
            }
            Ok(())
        }
        Command::Report => cmd_report(&cfg),
    }
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("uqctl: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
