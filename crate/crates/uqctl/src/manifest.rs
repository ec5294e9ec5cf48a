use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{io_data, CliError};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageRecord {
    pub seed: u64,
    pub completed_unix_ms: u128,
    pub outputs: Vec<String>,
    /// Ordered file-access events; evaluate uses this to prove the
    /// uncertainty map is written before ground truth is read.
    #[serde(default)]
    pub access_log: Vec<String>,
}

/// Run ledger tying every stage's artifacts to the config that produced
/// them. Stages refuse to run on top of a dataset built from a different
/// config hash.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub toolkit_version: String,
    pub stages: BTreeMap<String, StageRecord>,
}

fn manifest_path(out_dir: &Path) -> PathBuf {
    out_dir.join("manifest.json")
}

impl RunManifest {
    pub fn new(config_hash: String) -> Self {
        Self {
            config_hash,
            toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
            stages: BTreeMap::new(),
        }
    }

    pub fn load(out_dir: &Path) -> Result<Self, CliError> {
        let path = manifest_path(out_dir);
        let body = std::fs::read_to_string(&path).map_err(|e| {
            CliError::Data(format!(
                "{}: {e} (run `uqctl generate` first)",
                path.display()
            ))
        })?;
        serde_json::from_str(&body).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
    }

    /// Loads the manifest and checks it was produced by this config.
    pub fn load_checked(out_dir: &Path, config_hash: &str) -> Result<Self, CliError> {
        let manifest = Self::load(out_dir)?;
        if manifest.config_hash != config_hash {
            return Err(CliError::Data(format!(
                "existing artifacts in {} were produced by config hash {}, current config hashes \
                 to {config_hash}; regenerate with --force or change out_dir",
                out_dir.display(),
                manifest.config_hash
            )));
        }
        Ok(manifest)
    }

    pub fn record_stage(
        &mut self,
        name: &str,
        seed: u64,
        outputs: Vec<String>,
        access_log: Vec<String>,
    ) {
        let completed_unix_ms = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis())
            .unwrap_or(0);
        self.stages.insert(
            name.to_string(),
            StageRecord {
                seed,
                completed_unix_ms,
                outputs,
                access_log,
            },
        );
    }

    pub fn save(&self, out_dir: &Path) -> Result<(), CliError> {
        std::fs::create_dir_all(out_dir).map_err(|e| io_data(out_dir, e))?;
        let path = manifest_path(out_dir);
        let body = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        std::fs::write(&path, body).map_err(|e| io_data(&path, e))
    }
}
