//! Reliability metrics for pixelwise uncertainty maps: does predicted
//! interval width track actual reconstruction error? Provides uncertainty and
//! error maps (raw and blurred), global and patch-level Pearson/Spearman
//! correlations, empirical interval coverage, single-scale SSIM, relative
//! interval width, and CSV serialization of per-case results.

mod corr;
mod error;
mod maps;
mod record;
mod ssim;

pub use corr::{
    pearson, region_correlations, spearman, RegionCorrelations, DEFAULT_REGION_GRID,
};
pub use error::MetricsError;
pub use maps::{
    build_eval_maps, coverage, mean_relative_width_pct, threshold_overlay_mask,
    uncertainty_width, EvalMaps,
};
pub use record::{metrics_csv, MetricsRecord, METRICS_CSV_HEADER};
pub use ssim::{ssim, ssim_default, DEFAULT_SSIM_K1, DEFAULT_SSIM_K2, DEFAULT_SSIM_WINDOW};
