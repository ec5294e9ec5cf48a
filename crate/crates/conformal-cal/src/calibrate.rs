use serde::{Deserialize, Serialize};

use crate::error::CalError;
use crate::risk::{hoeffding_upper, pooled_risk, validate_cases, CalibrationCase};

/// Inclusive scan range for the interval scaling factor.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LambdaGrid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Default for LambdaGrid {
    fn default() -> Self {
        Self { lo: 0.0, hi: 5.0, step: 0.01 }
    }
}

impl LambdaGrid {
    fn validate(&self) -> Result<(), CalError> {
        let ok = self.lo.is_finite()
            && self.hi.is_finite()
            && self.step.is_finite()
            && self.lo >= 0.0
            && self.hi >= self.lo
            && self.step > 0.0;
        if !ok {
            return Err(CalError::Parameter(format!(
                "lambda grid must satisfy 0 <= lo <= hi and step > 0, got lo={}, hi={}, step={}",
                self.lo, self.hi, self.step
            )));
        }
        Ok(())
    }

    fn point_count(&self) -> usize {
        // Points are lo + k * step; the epsilon keeps hi in the grid when
        // (hi - lo) / step is integral up to rounding.
        ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1
    }

    fn point(&self, k: usize) -> f64 {
        self.lo + k as f64 * self.step
    }
}

/// Outcome of the risk scan. `risk_curve` holds one `(lambda, r_hat, r_plus)`
/// triple per scanned grid point, ending at `lambda_star` when calibration
/// succeeds; the scan stops at the first qualifying point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub lambda_star: f64,
    pub alpha: f64,
    pub delta: f64,
    pub n_images: usize,
    pub n_pixels_total: usize,
    pub risk_curve: Vec<(f64, f64, f64)>,
}

/// Picks the smallest grid lambda whose Hoeffding-corrected risk bound is at
/// most `alpha`. The bound uses the pixel count pooled over all cases, so the
/// guarantee is marginal over pixels, not per image.
pub fn calibrate(
    cases: &[CalibrationCase],
    alpha: f64,
    delta: f64,
    grid: LambdaGrid,
) -> Result<CalibrationResult, CalError> {
    if !alpha.is_finite() || !(0.0..1.0).contains(&alpha) {
        return Err(CalError::Parameter(format!(
            "alpha must lie in [0, 1), got {alpha}"
        )));
    }
    if !delta.is_finite() || delta <= 0.0 || delta > 1.0 {
        return Err(CalError::Parameter(format!(
            "delta must lie in (0, 1], got {delta}"
        )));
    }
    grid.validate()?;
    validate_cases(cases)?;

    let n_pixels_total: usize = cases.iter().map(CalibrationCase::pixel_count).sum();
    let n_points = grid.point_count();
    let mut risk_curve = Vec::new();
    for k in 0..n_points {
        let lambda = grid.point(k);
        let r_hat = pooled_risk(cases, lambda);
        let r_plus = hoeffding_upper(r_hat, n_pixels_total, delta);
        risk_curve.push((lambda, r_hat, r_plus));
        if r_plus <= alpha {
            return Ok(CalibrationResult {
                lambda_star: lambda,
                alpha,
                delta,
                n_images: cases.len(),
                n_pixels_total,
                risk_curve,
            });
        }
    }
    let (_, _, r_plus_at_hi) = *risk_curve.last().expect("grid has at least one point");
    Err(CalError::Infeasible {
        lambda_lo: grid.lo,
        lambda_hi: grid.point(n_points - 1),
        r_plus_at_hi,
        alpha,
    })
}
