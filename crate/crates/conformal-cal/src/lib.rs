//! Conformal calibration of pixelwise uncertainty intervals.
//!
//! A trained model emits raw quantile maps around each reconstruction; this
//! crate scales those offsets by a single factor lambda, chosen on held-out
//! data so that a Hoeffding-corrected bound on the pooled miscoverage risk
//! drops below a target level.

mod calibrate;
mod error;
mod interval;
mod risk;

pub use calibrate::{calibrate, CalibrationResult, LambdaGrid};
pub use error::CalError;
pub use interval::{interval, IntervalMaps};
pub use risk::{empirical_risk, hoeffding_upper, CalibrationCase};
