use std::path::Path;

use grid_core::{load_image, save_image, Image};
use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::model::{ConvLayer, ConvModel, Mode};

/// Sidecar metadata stored as model.json next to the parameter tensors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub channel_plan: Vec<usize>,
    pub mode: Mode,
    pub seed: u64,
    pub steps: usize,
}

fn weights_name(layer: usize) -> String {
    format!("layer{layer}.weights.t")
}

fn bias_name(layer: usize) -> String {
    format!("layer{layer}.bias.t")
}

/// One tensor file per parameter tensor: weights as (out_ch, in_ch*9), bias
/// as (1, out_ch). Note the files are float32, so reloading rounds params.
pub fn save_checkpoint(
    dir: &Path,
    model: &ConvModel,
    seed: u64,
    steps: usize,
) -> Result<(), ModelError> {
    std::fs::create_dir_all(dir).map_err(|source| ModelError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    for (li, layer) in model.layers().iter().enumerate() {
        let w = Image::new(layer.out_ch, layer.in_ch * 9, layer.weights.clone())?;
        save_image(&dir.join(weights_name(li)), &w)?;
        let b = Image::new(1, layer.out_ch, layer.bias.clone())?;
        save_image(&dir.join(bias_name(li)), &b)?;
    }
    let meta = CheckpointMeta {
        channel_plan: model.channel_plan().to_vec(),
        mode: model.mode(),
        seed,
        steps,
    };
    let path = dir.join("model.json");
    let body = serde_json::to_string_pretty(&meta).map_err(|source| ModelError::Meta {
        path: path.clone(),
        source,
    })?;
    std::fs::write(&path, body).map_err(|source| ModelError::Io { path, source })
}

pub fn load_checkpoint(dir: &Path) -> Result<(ConvModel, CheckpointMeta), ModelError> {
    let meta_path = dir.join("model.json");
    let body = std::fs::read_to_string(&meta_path).map_err(|source| ModelError::Io {
        path: meta_path.clone(),
        source,
    })?;
    let meta: CheckpointMeta = serde_json::from_str(&body).map_err(|source| ModelError::Meta {
        path: meta_path,
        source,
    })?;
    let plan = &meta.channel_plan;
    if plan.len() < 2 {
        return Err(ModelError::Checkpoint {
            path: dir.to_path_buf(),
            reason: format!("channel plan {plan:?} is too short"),
        });
    }
    let mut layers = Vec::with_capacity(plan.len() - 1);
    for li in 0..plan.len() - 1 {
        let w = load_image(&dir.join(weights_name(li)))?;
        let b = load_image(&dir.join(bias_name(li)))?;
        let (in_ch, out_ch) = (plan[li], plan[li + 1]);
        if w.height() != out_ch || w.width() != in_ch * 9 || b.height() != 1 || b.width() != out_ch
        {
            return Err(ModelError::Checkpoint {
                path: dir.to_path_buf(),
                reason: format!(
                    "layer {li} tensors ({}x{}, {}x{}) do not match plan {plan:?}",
                    w.height(),
                    w.width(),
                    b.height(),
                    b.width()
                ),
            });
        }
        layers.push(ConvLayer {
            in_ch,
            out_ch,
            weights: w.into_data(),
            bias: b.into_data(),
        });
    }
    let model = ConvModel::from_layers(meta.mode, plan.clone(), layers)?;
    Ok((model, meta))
}
