use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("{0}")]
    Parameter(String),

    #[error("shape mismatch: {context} expected {expected_h}x{expected_w}, got {got_h}x{got_w}")]
    ShapeMismatch {
        context: &'static str,
        expected_h: usize,
        expected_w: usize,
        got_h: usize,
        got_w: usize,
    },

    #[error("non-finite activation in layer {layer}")]
    Numeric { layer: usize },

    #[error("training diverged (non-finite loss) at step {step}")]
    Diverged { step: usize },

    #[error(transparent)]
    Grid(#[from] grid_core::GridError),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: invalid checkpoint metadata: {source}")]
    Meta {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("checkpoint at {path} is inconsistent: {reason}")]
    Checkpoint { path: PathBuf, reason: String },
}
