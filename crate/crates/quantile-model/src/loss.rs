use grid_core::Image;

use crate::error::ModelError;
use crate::model::QuantileFields;

pub(crate) fn check_shapes(
    context: &'static str,
    a: &Image,
    b: &Image,
) -> Result<(), ModelError> {
    if a.height() != b.height() || a.width() != b.width() {
        return Err(ModelError::ShapeMismatch {
            context,
            expected_h: a.height(),
            expected_w: a.width(),
            got_h: b.height(),
            got_w: b.width(),
        });
    }
    Ok(())
}

/// Mean pinball (quantile) loss at the given level:
/// level*(y - q) above the estimate, (1 - level)*(q - y) at or below it.
pub fn pinball_loss(q_hat: &Image, y: &Image, level: f64) -> Result<f64, ModelError> {
    if !(level > 0.0 && level < 1.0) {
        return Err(ModelError::Parameter(format!(
            "quantile level must lie in (0, 1), got {level}"
        )));
    }
    check_shapes("pinball_loss", q_hat, y)?;
    let total: f64 = q_hat
        .data()
        .iter()
        .zip(y.data())
        .map(|(&q, &yv)| {
            if yv > q {
                level * (yv - q)
            } else {
                (1.0 - level) * (q - yv)
            }
        })
        .sum();
    Ok(total / q_hat.len() as f64)
}

/// Two-head training loss: pinball at alpha/2 on the lower quantile plus
/// pinball at 1 - alpha/2 on the upper, alpha = 1 - coverage_target.
pub fn qr_total_loss(
    fields: &QuantileFields,
    y: &Image,
    coverage_target: f64,
) -> Result<f64, ModelError> {
    if !(coverage_target > 0.0 && coverage_target < 1.0) {
        return Err(ModelError::Parameter(format!(
            "coverage_target must lie in (0, 1), got {coverage_target}"
        )));
    }
    let alpha = 1.0 - coverage_target;
    let lower = pinball_loss(&fields.l_tilde, y, alpha / 2.0)?;
    let upper = pinball_loss(&fields.u_tilde, y, 1.0 - alpha / 2.0)?;
    Ok(lower + upper)
}

/// Squared-error fit of the predicted residual magnitude against |x - y|.
pub fn resm_loss(residual_estimate: &Image, x: &Image, y: &Image) -> Result<f64, ModelError> {
    check_shapes("resm_loss", residual_estimate, x)?;
    check_shapes("resm_loss", residual_estimate, y)?;
    let total: f64 = residual_estimate
        .data()
        .iter()
        .zip(x.data().iter().zip(y.data()))
        .map(|(&r, (&xv, &yv))| {
            let d = r - (xv - yv).abs();
            d * d
        })
        .sum();
    Ok(total / residual_estimate.len() as f64)
}
