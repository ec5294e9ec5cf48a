use grid_core::Image;

use crate::error::ModelError;
use crate::feature::{conv3x3_add, conv3x3_weight_grad, rotate180, FeatureMap};
use crate::loss::check_shapes;
use crate::model::{forward_trace, ConvModel, Mode, LEAKY_SLOPE};
use crate::train::TrainConfig;

/// Parameter gradients, shaped exactly like the model's layers.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub layers: Vec<LayerGrad>,
}

#[derive(Debug, Clone)]
pub struct LayerGrad {
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Gradients {
    pub fn zeros_like(model: &ConvModel) -> Self {
        Self {
            layers: model
                .layers()
                .iter()
                .map(|l| LayerGrad {
                    weights: vec![0.0; l.weights.len()],
                    bias: vec![0.0; l.bias.len()],
                })
                .collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Gradients) {
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            for (x, y) in a.weights.iter_mut().zip(&b.weights) {
                *x += y;
            }
            for (x, y) in a.bias.iter_mut().zip(&b.bias) {
                *x += y;
            }
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for layer in &mut self.layers {
            for x in &mut layer.weights {
                *x *= factor;
            }
            for x in &mut layer.bias {
                *x *= factor;
            }
        }
    }
}

/// Loss of the mode's objective, optionally filling d(loss)/d(head
/// pre-activation). One function so the forward-only and backward paths
/// accumulate the loss with identical float operations.
fn head_pass(
    mode: Mode,
    head: &FeatureMap,
    x: &Image,
    y: &Image,
    coverage_target: f64,
    mut dz: Option<&mut FeatureMap>,
) -> f64 {
    let (h, w) = (x.height(), x.width());
    let n = (h * w) as f64;
    let xs = x.data();
    let ys = y.data();
    let mut loss = 0.0;
    match mode {
        Mode::Qr => {
            let alpha = 1.0 - coverage_target;
            let (level_l, level_u) = (alpha / 2.0, 1.0 - alpha / 2.0);
            let o_l = head.plane(0);
            let o_u = head.plane(1);
            for i in 0..h * w {
                let (xv, yv) = (xs[i], ys[i]);
                let l = xv * (1.0 - o_l[i]);
                let u = xv * (1.0 + o_u[i]);
                // Pinball: slope -level above the estimate, 1-level at or
                // below it (ties take the lower branch).
                let (rho_l, g_l) = if yv > l {
                    (level_l * (yv - l), -level_l)
                } else {
                    ((1.0 - level_l) * (l - yv), 1.0 - level_l)
                };
                let (rho_u, g_u) = if yv > u {
                    (level_u * (yv - u), -level_u)
                } else {
                    ((1.0 - level_u) * (u - yv), 1.0 - level_u)
                };
                loss += (rho_l + rho_u) / n;
                if let Some(dz) = dz.as_deref_mut() {
                    // dl/do_l = -x, du/do_u = +x, sigmoid' = o(1-o).
                    let plane = h * w;
                    dz.data[i] = g_l / n * (-xv) * o_l[i] * (1.0 - o_l[i]);
                    dz.data[plane + i] = g_u / n * xv * o_u[i] * (1.0 - o_u[i]);
                }
            }
        }
        Mode::Resm => {
            let o = head.plane(0);
            for i in 0..h * w {
                let (xv, yv) = (xs[i], ys[i]);
                let r_hat = xv * o[i];
                let d = r_hat - (xv - yv).abs();
                loss += d * d / n;
                if let Some(dz) = dz.as_deref_mut() {
                    dz.data[i] = 2.0 * d / n * xv * o[i] * (1.0 - o[i]);
                }
            }
        }
    }
    loss
}

/// Loss plus the gradient of that loss for a single (x, y) pair.
pub(crate) fn forward_backward(
    model: &ConvModel,
    x: &Image,
    y: &Image,
    config: &TrainConfig,
) -> Result<(f64, Gradients), ModelError> {
    check_shapes("forward_backward", x, y)?;
    let trace = forward_trace(model, x)?;
    let (h, w) = (x.height(), x.width());
    let num_layers = model.layers().len();

    let mut dz = FeatureMap::zeros(trace.head.channels, h, w);
    let loss = head_pass(
        model.mode(),
        &trace.head,
        x,
        y,
        config.coverage_target,
        Some(&mut dz),
    );

    // Reverse pass through the convolution stack.
    let mut grads = Gradients::zeros_like(model);
    for li in (0..num_layers).rev() {
        let layer = &model.layers()[li];
        let a_in = &trace.activations[li];
        let grad = &mut grads.layers[li];
        for oc in 0..layer.out_ch {
            let dz_plane = dz.plane(oc);
            grad.bias[oc] += dz_plane.iter().sum::<f64>();
            for ic in 0..layer.in_ch {
                let base = (oc * layer.in_ch + ic) * 9;
                conv3x3_weight_grad(
                    a_in.plane(ic),
                    h,
                    w,
                    dz_plane,
                    &mut grad.weights[base..base + 9],
                );
            }
        }
        if li > 0 {
            let mut da = FeatureMap::zeros(layer.in_ch, h, w);
            for oc in 0..layer.out_ch {
                for ic in 0..layer.in_ch {
                    let rotated = rotate180(layer.kernel(oc, ic));
                    let plane_len = h * w;
                    let off = ic * plane_len;
                    conv3x3_add(
                        dz.plane(oc),
                        h,
                        w,
                        &rotated,
                        &mut da.data[off..off + plane_len],
                    );
                }
            }
            // Chain through leaky ReLU of the previous layer: slope on the
            // non-positive side (the kink itself takes the slope branch).
            let z_prev = &trace.pre_activations[li - 1];
            for (v, &z) in da.data.iter_mut().zip(&z_prev.data) {
                if z <= 0.0 {
                    *v *= LEAKY_SLOPE;
                }
            }
            dz = da;
        }
    }

    for (li, layer) in grads.layers.iter().enumerate() {
        if layer
            .weights
            .iter()
            .chain(&layer.bias)
            .any(|v| !v.is_finite())
        {
            return Err(ModelError::Numeric { layer: li });
        }
    }
    Ok((loss, grads))
}

/// Exact reverse-mode gradient of the mode's training loss.
pub fn backward(
    model: &ConvModel,
    x: &Image,
    y: &Image,
    config: &TrainConfig,
) -> Result<Gradients, ModelError> {
    Ok(forward_backward(model, x, y, config)?.1)
}

/// The training loss itself, accumulated in the same order as the backward
/// pass so finite differences of this function match analytic gradients.
pub fn loss_value(
    model: &ConvModel,
    x: &Image,
    y: &Image,
    config: &TrainConfig,
) -> Result<f64, ModelError> {
    check_shapes("loss_value", x, y)?;
    let trace = forward_trace(model, x)?;
    Ok(head_pass(
        model.mode(),
        &trace.head,
        x,
        y,
        config.coverage_target,
        None,
    ))
}
