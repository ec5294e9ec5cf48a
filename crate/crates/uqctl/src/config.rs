use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use conformal_cal::LambdaGrid;
use quantile_model::Mode;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{io_data, CliError};

fn default_grid_size() -> usize {
    64
}
fn default_accelerations() -> Vec<u32> {
    vec![2, 4, 6, 8, 10]
}
fn default_acs_fractions() -> BTreeMap<String, f64> {
    [(2, 0.16), (4, 0.08), (6, 0.053), (8, 0.04), (10, 0.03)]
        .into_iter()
        .map(|(r, f)| (r.to_string(), f))
        .collect()
}
fn default_noise_std() -> f64 {
    0.02
}
fn default_train_size() -> usize {
    40
}
fn default_val_size() -> usize {
    10
}
fn default_calib_size() -> usize {
    60
}
fn default_test_size() -> usize {
    250
}
fn default_coverage_target() -> f64 {
    0.90
}
fn default_delta() -> f64 {
    0.1
}
fn default_lambda_lo() -> f64 {
    0.0
}
fn default_lambda_hi() -> f64 {
    5.0
}
fn default_lambda_step() -> f64 {
    0.01
}
fn default_steps() -> usize {
    400
}
fn default_learning_rate() -> f64 {
    3e-4
}
fn default_batch() -> usize {
    1
}
fn default_seed() -> u64 {
    7
}
fn default_modes() -> Vec<Mode> {
    vec![Mode::Qr, Mode::Resm]
}
fn default_out_dir() -> String {
    "runs/default".into()
}
fn default_phantom_jitter() -> f64 {
    0.03
}
fn default_lesion_probability() -> f64 {
    0.35
}
fn default_overlay_acceleration() -> u32 {
    4
}

/// Flat experiment description. Every field has a default, so `{}` is a
/// valid config; unknown keys are rejected to catch typos.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_grid_size")]
    pub grid_size: usize,
    #[serde(default = "default_accelerations")]
    pub accelerations: Vec<u32>,
    /// Keyed by acceleration rendered as a string (JSON object keys).
    #[serde(default = "default_acs_fractions")]
    pub acs_fractions: BTreeMap<String, f64>,
    #[serde(default = "default_noise_std")]
    pub noise_std: f64,
    #[serde(default = "default_train_size")]
    pub train_size: usize,
    #[serde(default = "default_val_size")]
    pub val_size: usize,
    #[serde(default = "default_calib_size")]
    pub calib_size: usize,
    #[serde(default = "default_test_size")]
    pub test_size: usize,
    #[serde(default = "default_coverage_target")]
    pub coverage_target: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_lambda_lo")]
    pub lambda_lo: f64,
    #[serde(default = "default_lambda_hi")]
    pub lambda_hi: f64,
    #[serde(default = "default_lambda_step")]
    pub lambda_step: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_learning_rate")]
    pub learning_rate: f64,
    #[serde(default = "default_batch")]
    pub batch: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_modes")]
    pub modes: Vec<Mode>,
    #[serde(default = "default_out_dir")]
    pub out_dir: String,
    /// Relative magnitude of per-case random perturbation of the phantom
    /// ellipses, giving each case its own anatomy.
    #[serde(default = "default_phantom_jitter")]
    pub phantom_jitter: f64,
    /// Probability that a calibration/test case carries an injected lesion.
    /// Training cases are always lesion-free.
    #[serde(default = "default_lesion_probability")]
    pub lesion_probability: f64,
    /// Acceleration whose maximum uncertainty width sets the overlay
    /// threshold for higher accelerations.
    #[serde(default = "default_overlay_acceleration")]
    pub overlay_acceleration: u32,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let err = |msg: String| Err(CliError::Config(msg));
        if self.grid_size < 16 || !self.grid_size.is_power_of_two() {
            return err(format!(
                "grid_size must be a power of two >= 16, got {}",
                self.grid_size
            ));
        }
        if self.accelerations.is_empty() {
            return err("accelerations must not be empty".into());
        }
        for &r in &self.accelerations {
            if r == 0 {
                return err("acceleration 0 is not meaningful".into());
            }
            match self.acs_fractions.get(&r.to_string()) {
                None => {
                    return err(format!("acceleration {r} has no acs_fractions entry"));
                }
                Some(&f) if !(f > 0.0 && f <= 1.0) => {
                    return err(format!("acs fraction for {r} must lie in (0, 1], got {f}"));
                }
                _ => {}
            }
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return err(format!("noise_std must be >= 0, got {}", self.noise_std));
        }
        for (name, v) in [
            ("train_size", self.train_size),
            ("calib_size", self.calib_size),
            ("test_size", self.test_size),
        ] {
            if v == 0 {
                return err(format!("{name} must be positive"));
            }
        }
        if !(self.coverage_target > 0.0 && self.coverage_target < 1.0) {
            return err(format!(
                "coverage_target must lie in (0, 1), got {}",
                self.coverage_target
            ));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return err(format!("delta must lie in (0, 1], got {}", self.delta));
        }
        if !(self.lambda_lo >= 0.0 && self.lambda_hi >= self.lambda_lo && self.lambda_step > 0.0) {
            return err(format!(
                "lambda grid must satisfy 0 <= lo <= hi and step > 0, got lo={}, hi={}, step={}",
                self.lambda_lo, self.lambda_hi, self.lambda_step
            ));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return err(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        if self.batch == 0 {
            return err("batch must be positive".into());
        }
        if self.modes.is_empty() {
            return err("modes must not be empty".into());
        }
        if !(0.0..=1.0).contains(&self.lesion_probability) {
            return err(format!(
                "lesion_probability must lie in [0, 1], got {}",
                self.lesion_probability
            ));
        }
        if !(self.phantom_jitter >= 0.0 && self.phantom_jitter <= 0.2) {
            return err(format!(
                "phantom_jitter must lie in [0, 0.2], got {}",
                self.phantom_jitter
            ));
        }
        Ok(())
    }

    pub fn alpha(&self) -> f64 {
        1.0 - self.coverage_target
    }

    pub fn lambda_grid(&self) -> LambdaGrid {
        LambdaGrid {
            lo: self.lambda_lo,
            hi: self.lambda_hi,
            step: self.lambda_step,
        }
    }

    pub fn acs_fraction_for(&self, acceleration: u32) -> f64 {
        self.acs_fractions[&acceleration.to_string()]
    }

    pub fn out_dir(&self) -> PathBuf {
        PathBuf::from(&self.out_dir)
    }

    pub fn dataset_dir(&self) -> PathBuf {
        self.out_dir().join("dataset")
    }

    pub fn mode_dir(&self, mode: Mode) -> PathBuf {
        self.out_dir().join(mode_name(mode))
    }

    /// Hash of the canonical JSON form (sorted keys), so key order in the
    /// user's file never changes the hash.
    pub fn hash(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        let canonical = serde_json::to_string(&value).expect("value serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        let digest = hasher.finalize();
        let mut out = String::with_capacity(64);
        for byte in digest {
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }
}

pub fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Qr => "qr",
        Mode::Resm => "resm",
    }
}

pub fn parse_mode(s: &str) -> Result<Mode, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "qr" => Ok(Mode::Qr),
        "resm" => Ok(Mode::Resm),
        other => Err(CliError::Config(format!(
            "unknown mode '{other}', expected qr or resm"
        ))),
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let body = std::fs::read_to_string(path).map_err(|e| io_data(path, e))?;
    let cfg: ExperimentConfig = serde_json::from_str(&body)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    cfg.validate()?;
    Ok(cfg)
}
