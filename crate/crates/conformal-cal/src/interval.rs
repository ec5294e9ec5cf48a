use grid_core::Image;
use quantile_model::QuantileFields;

use crate::error::CalError;

/// Calibrated interval maps for one image at a fixed scaling factor.
#[derive(Debug, Clone)]
pub struct IntervalMaps {
    pub l_b: Image,
    pub u_b: Image,
    pub lambda: f64,
}

/// Scales the raw quantile offsets away from the reconstruction by `lambda`.
/// The lower bound is floored at zero because magnitudes cannot be negative.
/// Every risk computation must go through this exact arithmetic so that
/// calibration and evaluation agree bit for bit on boundary pixels.
#[inline(always)]
pub(crate) fn scaled_bounds(x: f64, l_tilde: f64, u_tilde: f64, lambda: f64) -> (f64, f64) {
    let lo = (x - lambda * (x - l_tilde)).max(0.0);
    let hi = x + lambda * (u_tilde - x);
    (lo, hi)
}

pub fn interval(x: &Image, fields: &QuantileFields, lambda: f64) -> Result<IntervalMaps, CalError> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(CalError::Parameter(format!(
            "lambda must be finite and >= 0, got {lambda}"
        )));
    }
    let (h, w) = (x.height(), x.width());
    for (field, name) in [
        (&fields.l_tilde, "l_tilde"),
        (&fields.u_tilde, "u_tilde"),
    ] {
        if field.height() != h || field.width() != w {
            return Err(CalError::CaseShape {
                case: 0,
                context: name,
                height: h,
                width: w,
            });
        }
    }

    let mut l_b = Image::zeros(h, w);
    let mut u_b = Image::zeros(h, w);
    for r in 0..h {
        for c in 0..w {
            let (lo, hi) = scaled_bounds(
                x[(r, c)],
                fields.l_tilde[(r, c)],
                fields.u_tilde[(r, c)],
                lambda,
            );
            l_b[(r, c)] = lo;
            u_b[(r, c)] = hi;
        }
    }
    Ok(IntervalMaps { l_b, u_b, lambda })
}
