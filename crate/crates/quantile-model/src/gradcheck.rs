use grid_core::Image;

use crate::backward::{backward, loss_value, Gradients};
use crate::error::ModelError;
use crate::model::{forward_trace, ConvModel, Mode};
use crate::train::TrainConfig;

/// Worst analytic-vs-numeric disagreement over all parameters.
#[derive(Debug, Clone, Copy)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    /// Layer of the worst parameter.
    pub layer: usize,
    /// Flat index within that layer: weights first, then bias.
    pub param_index: usize,
}

/// Central finite differences of the training loss with respect to every
/// parameter: (L(p + eps) - L(p - eps)) / (2 eps).
pub fn finite_difference_gradients(
    model: &ConvModel,
    x: &Image,
    y: &Image,
    config: &TrainConfig,
    epsilon: f64,
) -> Result<Gradients, ModelError> {
    check_epsilon(epsilon)?;
    let mut probe = model.clone();
    let mut grads = Gradients::zeros_like(model);
    let num_layers = model.layers().len();
    for li in 0..num_layers {
        let n_weights = model.layers()[li].weights.len();
        let n_bias = model.layers()[li].bias.len();
        for idx in 0..n_weights + n_bias {
            let read = |m: &ConvModel| {
                if idx < n_weights {
                    m.layers()[li].weights[idx]
                } else {
                    m.layers()[li].bias[idx - n_weights]
                }
            };
            let write = |m: &mut ConvModel, v: f64| {
                if idx < n_weights {
                    m.layers_mut()[li].weights[idx] = v;
                } else {
                    m.layers_mut()[li].bias[idx - n_weights] = v;
                }
            };
            let original = read(&probe);
            write(&mut probe, original + epsilon);
            let plus = loss_value(&probe, x, y, config)?;
            write(&mut probe, original - epsilon);
            let minus = loss_value(&probe, x, y, config)?;
            write(&mut probe, original);
            let g = (plus - minus) / (2.0 * epsilon);
            if idx < n_weights {
                grads.layers[li].weights[idx] = g;
            } else {
                grads.layers[li].bias[idx - n_weights] = g;
            }
        }
    }
    Ok(grads)
}

/// Per-parameter relative error |a - n| / max(|a| + |n|, 1e-8), maximized
/// over the whole model.
pub fn compare_gradients(analytic: &Gradients, numeric: &Gradients) -> GradCheckReport {
    let mut report = GradCheckReport {
        max_rel_error: 0.0,
        layer: 0,
        param_index: 0,
    };
    for (li, (a, n)) in analytic.layers.iter().zip(&numeric.layers).enumerate() {
        let pairs = a
            .weights
            .iter()
            .zip(&n.weights)
            .chain(a.bias.iter().zip(&n.bias));
        for (idx, (&av, &nv)) in pairs.enumerate() {
            let rel = (av - nv).abs() / (av.abs() + nv.abs()).max(1e-8);
            if rel > report.max_rel_error {
                report = GradCheckReport {
                    max_rel_error: rel,
                    layer: li,
                    param_index: idx,
                };
            }
        }
    }
    report
}

/// Compares analytic gradients against central finite differences for every
/// parameter.
pub fn grad_check(
    model: &ConvModel,
    x: &Image,
    y: &Image,
    config: &TrainConfig,
    epsilon: f64,
) -> Result<GradCheckReport, ModelError> {
    check_epsilon(epsilon)?;
    let analytic = backward(model, x, y, config)?;
    let numeric = finite_difference_gradients(model, x, y, config, epsilon)?;
    Ok(compare_gradients(&analytic, &numeric))
}

/// Distance of this instance from the loss kinks that break finite
/// differences: pinball hinges (|y - l|, |y - u| at pixels where x > 0,
/// where the quantile actually moves with the parameters) and the leaky-ReLU
/// corner (|z| over hidden pre-activations). Callers wanting a clean
/// finite-difference comparison should resample until this is comfortably
/// larger than the perturbation's effect.
pub fn kink_margin(
    model: &ConvModel,
    x: &Image,
    y: &Image,
    config: &TrainConfig,
) -> Result<f64, ModelError> {
    let trace = forward_trace(model, x)?;
    let mut margin = f64::INFINITY;
    let hidden_layers = trace.pre_activations.len() - 1;
    for z in trace.pre_activations.iter().take(hidden_layers) {
        for &v in &z.data {
            margin = margin.min(v.abs());
        }
    }
    if model.mode() == Mode::Qr {
        let _ = config;
        let o_l = trace.head.plane(0);
        let o_u = trace.head.plane(1);
        for (i, (&xv, &yv)) in x.data().iter().zip(y.data()).enumerate() {
            if xv > 0.0 {
                let l = xv * (1.0 - o_l[i]);
                let u = xv * (1.0 + o_u[i]);
                margin = margin.min((yv - l).abs()).min((yv - u).abs());
            }
        }
    }
    Ok(margin)
}

fn check_epsilon(epsilon: f64) -> Result<(), ModelError> {
    if !(epsilon > 1e-6 && epsilon < 1e-2) {
        return Err(ModelError::Parameter(format!(
            "finite-difference epsilon must lie in (1e-6, 1e-2), got {epsilon}"
        )));
    }
    Ok(())
}
