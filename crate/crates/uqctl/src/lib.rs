//! Pipeline driver for calibrated-uncertainty experiments: dataset
//! generation, quantile training, risk calibration, evaluation, reporting.

mod config;
mod dataset;
mod error;
mod manifest;
mod pgm;
mod pipeline;
mod seeds;

pub use config::{load_config, mode_name, parse_mode, ExperimentConfig};
pub use dataset::{generate_dataset, split_case_dirs};
pub use error::CliError;
pub use manifest::{RunManifest, StageRecord};
pub use pgm::export_pgm;
pub use pipeline::{cmd_calibrate, cmd_evaluate, cmd_generate, cmd_report, cmd_train, run_all};
pub use seeds::derive_seed;
