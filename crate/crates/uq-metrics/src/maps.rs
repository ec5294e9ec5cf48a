use conformal_cal::IntervalMaps;
use grid_core::{gaussian_blur, Image};

use crate::error::MetricsError;

/// Uncertainty width map and absolute error map for one case, stored raw and
/// Gaussian-blurred (the blurred pair feeds the correlation metrics).
#[derive(Debug, Clone)]
pub struct EvalMaps {
    pub q_map: Image,
    pub e_map: Image,
    pub q_blur: Image,
    pub e_blur: Image,
}

pub(crate) fn check_shape(
    context: &'static str,
    expected: &Image,
    actual: &Image,
) -> Result<(), MetricsError> {
    if expected.height() != actual.height() || expected.width() != actual.width() {
        return Err(MetricsError::Shape {
            context,
            height: expected.height(),
            width: expected.width(),
            actual_height: actual.height(),
            actual_width: actual.width(),
        });
    }
    Ok(())
}

/// Interval width per pixel. Takes only the calibrated bounds, so the width
/// map provably never depends on ground truth.
pub fn uncertainty_width(intervals: &IntervalMaps) -> Result<Image, MetricsError> {
    check_shape("u_b", &intervals.l_b, &intervals.u_b)?;
    let (h, w) = (intervals.l_b.height(), intervals.l_b.width());
    let mut q = Image::zeros(h, w);
    for r in 0..h {
        for c in 0..w {
            let width = intervals.u_b[(r, c)] - intervals.l_b[(r, c)];
            debug_assert!(width >= 0.0, "interval bounds out of order at ({r}, {c})");
            q[(r, c)] = width;
        }
    }
    Ok(q)
}

const CORRELATION_BLUR_SIGMA: f64 = 2.0;

pub fn build_eval_maps(
    x: &Image,
    y: &Image,
    intervals: &IntervalMaps,
) -> Result<EvalMaps, MetricsError> {
    check_shape("y", x, y)?;
    check_shape("l_b", x, &intervals.l_b)?;
    check_shape("u_b", x, &intervals.u_b)?;
    let q_map = uncertainty_width(intervals)?;
    let mut e_map = Image::zeros(x.height(), x.width());
    for r in 0..x.height() {
        for c in 0..x.width() {
            e_map[(r, c)] = (x[(r, c)] - y[(r, c)]).abs();
        }
    }
    let q_blur = gaussian_blur(&q_map, CORRELATION_BLUR_SIGMA)
        .expect("fixed positive sigma cannot fail");
    let e_blur = gaussian_blur(&e_map, CORRELATION_BLUR_SIGMA)
        .expect("fixed positive sigma cannot fail");
    Ok(EvalMaps { q_map, e_map, q_blur, e_blur })
}

/// Fraction of pixels whose truth falls inside the closed interval.
pub fn coverage(y: &Image, intervals: &IntervalMaps) -> Result<f64, MetricsError> {
    check_shape("l_b", y, &intervals.l_b)?;
    check_shape("u_b", y, &intervals.u_b)?;
    let (h, w) = (y.height(), y.width());
    let mut inside = 0usize;
    for r in 0..h {
        for c in 0..w {
            let v = y[(r, c)];
            if intervals.l_b[(r, c)] <= v && v <= intervals.u_b[(r, c)] {
                inside += 1;
            }
        }
    }
    Ok(inside as f64 / (h * w) as f64)
}

/// Mean interval width as a percentage of the brightest reconstructed pixel.
pub fn mean_relative_width_pct(q_map: &Image, x: &Image) -> Result<f64, MetricsError> {
    check_shape("x", q_map, x)?;
    let max_x = x.max_value();
    if max_x <= 0.0 {
        return Err(MetricsError::Degenerate(format!(
            "reconstruction maximum must be positive to normalize widths, got {max_x}"
        )));
    }
    Ok(100.0 * q_map.mean() / max_x)
}

/// Indicator map (1.0 where the width strictly exceeds the threshold) used
/// for anomaly-style overlay reporting. Expects a non-negative threshold.
pub fn threshold_overlay_mask(q_map: &Image, threshold: f64) -> Image {
    debug_assert!(threshold >= 0.0);
    q_map.map(|v| if v > threshold { 1.0 } else { 0.0 })
}
