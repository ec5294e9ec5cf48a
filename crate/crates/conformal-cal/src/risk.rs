use grid_core::Image;
use quantile_model::QuantileFields;
use rayon::prelude::*;

use crate::error::CalError;
use crate::interval::scaled_bounds;

/// One held-out example: reconstruction, its predicted quantile fields, and
/// the ground-truth image the interval is judged against.
#[derive(Debug, Clone)]
pub struct CalibrationCase {
    pub x: Image,
    pub fields: QuantileFields,
    pub y: Image,
}

impl CalibrationCase {
    pub fn pixel_count(&self) -> usize {
        self.x.height() * self.x.width()
    }
}

pub(crate) fn validate_cases(cases: &[CalibrationCase]) -> Result<(), CalError> {
    if cases.is_empty() {
        return Err(CalError::EmptyCalibrationSet);
    }
    for (i, case) in cases.iter().enumerate() {
        let (h, w) = (case.x.height(), case.x.width());
        let fields = [
            (case.y.height(), case.y.width(), "y"),
            (case.fields.l_tilde.height(), case.fields.l_tilde.width(), "l_tilde"),
            (case.fields.u_tilde.height(), case.fields.u_tilde.width(), "u_tilde"),
        ];
        for (fh, fw, name) in fields {
            if fh != h || fw != w {
                return Err(CalError::CaseShape {
                    case: i,
                    context: name,
                    height: h,
                    width: w,
                });
            }
        }
    }
    Ok(())
}

/// Number of pixels whose truth lies strictly outside the scaled interval.
/// Boundary pixels (y exactly on a bound) count as covered.
pub(crate) fn outside_count(case: &CalibrationCase, lambda: f64) -> usize {
    let x = case.x.data();
    let l = case.fields.l_tilde.data();
    let u = case.fields.u_tilde.data();
    let y = case.y.data();
    let mut outside = 0usize;
    for i in 0..x.len() {
        let (lo, hi) = scaled_bounds(x[i], l[i], u[i], lambda);
        if y[i] < lo || y[i] > hi {
            outside += 1;
        }
    }
    outside
}

pub(crate) fn pooled_risk(cases: &[CalibrationCase], lambda: f64) -> f64 {
    // Per-case counts are integers, so the parallel sum is order-independent
    // and the result is deterministic regardless of thread count.
    let outside: usize = cases
        .par_iter()
        .map(|case| outside_count(case, lambda))
        .sum();
    let total: usize = cases.iter().map(CalibrationCase::pixel_count).sum();
    outside as f64 / total as f64
}

/// Fraction of pixels, pooled over all cases, not covered at scale `lambda`.
pub fn empirical_risk(cases: &[CalibrationCase], lambda: f64) -> Result<f64, CalError> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(CalError::Parameter(format!(
            "lambda must be finite and >= 0, got {lambda}"
        )));
    }
    validate_cases(cases)?;
    Ok(pooled_risk(cases, lambda))
}

/// One-sided Hoeffding upper confidence bound on the true miscoverage risk:
/// the empirical risk plus sqrt(ln(1/delta) / (2 n)), clipped to 1. Holds with
/// probability at least 1 - delta over the n pooled pixels. Requires n > 0 and
/// delta in (0, 1]; delta = 1 leaves the empirical risk unchanged.
pub fn hoeffding_upper(r_hat: f64, n_pixels: usize, delta: f64) -> f64 {
    debug_assert!(n_pixels > 0);
    debug_assert!(delta > 0.0 && delta <= 1.0);
    debug_assert!((0.0..=1.0).contains(&r_hat));
    let slack = ((1.0 / delta).ln() / (2.0 * n_pixels as f64)).sqrt();
    (r_hat + slack).min(1.0)
}
