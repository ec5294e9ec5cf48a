use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("{0}")]
    Parameter(String),

    #[error(
        "ACS block of {acs_lines} lines exceeds the kept-line budget of {budget} \
         (num_lines={num_lines}, acceleration={acceleration}, acs_fraction={acs_fraction})"
    )]
    AcsBudget {
        acs_lines: usize,
        budget: usize,
        num_lines: usize,
        acceleration: f64,
        acs_fraction: f64,
    },

    #[error("mask has {mask_lines} lines but k-space width is {kspace_width}")]
    DimensionMismatch {
        mask_lines: usize,
        kspace_width: usize,
    },

    #[error(transparent)]
    Grid(#[from] grid_core::GridError),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: invalid case metadata: {source}")]
    Meta {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}
