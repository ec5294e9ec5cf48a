use std::path::Path;

use grid_core::{load_image, save_image, Image};
use serde::{Deserialize, Serialize};

use crate::error::SimError;

/// Per-case acquisition parameters, stored as meta.json.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseMeta {
    pub acceleration: f64,
    pub acs_fraction: f64,
    pub noise_std: f64,
    pub seed: u64,
    #[serde(default)]
    pub lesioned: bool,
}

/// One dataset case as laid out on disk: y.t (ground truth), x.t (recon),
/// mask.t (1 x W keep flags), meta.json.
#[derive(Debug, Clone)]
pub struct CaseData {
    pub ground_truth: Image,
    pub recon: Image,
    pub mask_row: Image,
    pub meta: CaseMeta,
}

pub fn write_case(dir: &Path, case: &CaseData) -> Result<(), SimError> {
    std::fs::create_dir_all(dir).map_err(|source| SimError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    save_image(&dir.join("y.t"), &case.ground_truth)?;
    save_image(&dir.join("x.t"), &case.recon)?;
    save_image(&dir.join("mask.t"), &case.mask_row)?;
    let meta_path = dir.join("meta.json");
    let body = serde_json::to_string_pretty(&case.meta).map_err(|source| SimError::Meta {
        path: meta_path.clone(),
        source,
    })?;
    std::fs::write(&meta_path, body).map_err(|source| SimError::Io {
        path: meta_path,
        source,
    })
}

pub fn read_case(dir: &Path) -> Result<CaseData, SimError> {
    let meta_path = dir.join("meta.json");
    let body = std::fs::read_to_string(&meta_path).map_err(|source| SimError::Io {
        path: meta_path.clone(),
        source,
    })?;
    let meta: CaseMeta = serde_json::from_str(&body).map_err(|source| SimError::Meta {
        path: meta_path,
        source,
    })?;
    Ok(CaseData {
        ground_truth: load_image(&dir.join("y.t"))?,
        recon: load_image(&dir.join("x.t"))?,
        mask_row: load_image(&dir.join("mask.t"))?,
        meta,
    })
}
