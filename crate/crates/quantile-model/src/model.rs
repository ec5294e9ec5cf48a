use grid_core::{normalize_zero_mean_unit_std, Image};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::feature::{conv3x3_add, FeatureMap};

/// Hidden-layer leaky-ReLU negative slope.
pub const LEAKY_SLOPE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Two sigmoid heads: lower and upper quantile offsets.
    Qr,
    /// One sigmoid head: symmetric residual-magnitude offset.
    Resm,
}

impl Mode {
    pub fn head_channels(self) -> usize {
        match self {
            Mode::Qr => 2,
            Mode::Resm => 1,
        }
    }
}

/// One 3x3 convolution layer; weights are stored as out_ch blocks of
/// in_ch kernels, each 9 row-major taps.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvLayer {
    pub in_ch: usize,
    pub out_ch: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl ConvLayer {
    fn zeros(in_ch: usize, out_ch: usize) -> Self {
        Self {
            in_ch,
            out_ch,
            weights: vec![0.0; out_ch * in_ch * 9],
            bias: vec![0.0; out_ch],
        }
    }

    #[inline]
    pub(crate) fn kernel(&self, oc: usize, ic: usize) -> &[f64] {
        let base = (oc * self.in_ch + ic) * 9;
        &self.weights[base..base + 9]
    }
}

/// Shallow convolutional regressor: 3x3 convs with zero padding, leaky-ReLU
/// hidden activations, sigmoid heads scaled by the reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvModel {
    layers: Vec<ConvLayer>,
    plan: Vec<usize>,
    mode: Mode,
}

impl ConvModel {
    pub const DEFAULT_HIDDEN: [usize; 2] = [16, 16];

    /// Seeded uniform init, +-sqrt(1/fan_in) per layer, zero bias.
    pub fn init(mode: Mode, hidden: &[usize], seed: u64) -> Result<Self, ModelError> {
        let mut model = Self::zeros(mode, hidden)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for layer in &mut model.layers {
            let scale = (1.0 / (layer.in_ch as f64 * 9.0)).sqrt();
            for w in &mut layer.weights {
                *w = scale * (2.0 * rng.random::<f64>() - 1.0);
            }
        }
        Ok(model)
    }

    /// All-zero parameters; sigmoid heads then emit exactly 0.5.
    pub fn zeros(mode: Mode, hidden: &[usize]) -> Result<Self, ModelError> {
        if hidden.contains(&0) {
            return Err(ModelError::Parameter(
                "hidden channel counts must be positive".into(),
            ));
        }
        let mut plan = vec![1usize];
        plan.extend_from_slice(hidden);
        plan.push(mode.head_channels());
        let layers = plan
            .windows(2)
            .map(|pair| ConvLayer::zeros(pair[0], pair[1]))
            .collect();
        Ok(Self { layers, plan, mode })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn channel_plan(&self) -> &[usize] {
        &self.plan
    }

    pub fn layers(&self) -> &[ConvLayer] {
        &self.layers
    }

    pub(crate) fn layers_mut(&mut self) -> &mut [ConvLayer] {
        &mut self.layers
    }

    /// Rebuilds a model from raw layer tensors (checkpoint loading).
    pub(crate) fn from_layers(
        mode: Mode,
        plan: Vec<usize>,
        layers: Vec<ConvLayer>,
    ) -> Result<Self, ModelError> {
        if plan.len() < 2 || plan[0] != 1 || *plan.last().unwrap() != mode.head_channels() {
            return Err(ModelError::Parameter(format!(
                "channel plan {plan:?} does not fit mode"
            )));
        }
        if layers.len() + 1 != plan.len() {
            return Err(ModelError::Parameter("layer count does not match plan".into()));
        }
        for (i, layer) in layers.iter().enumerate() {
            let ok = layer.in_ch == plan[i]
                && layer.out_ch == plan[i + 1]
                && layer.weights.len() == layer.out_ch * layer.in_ch * 9
                && layer.bias.len() == layer.out_ch
                && layer.weights.iter().chain(&layer.bias).all(|v| v.is_finite());
            if !ok {
                return Err(ModelError::Parameter(format!("layer {i} is malformed")));
            }
        }
        Ok(Self { layers, plan, mode })
    }

    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.bias.len())
            .sum()
    }
}

/// Head outputs and the derived quantile maps for one input.
#[derive(Debug, Clone)]
pub struct QuantileFields {
    pub o_l: Image,
    pub o_u: Image,
    pub l_tilde: Image,
    pub u_tilde: Image,
}

pub(crate) struct ForwardTrace {
    /// a[0] is the normalized input; a[i] is the post-activation input to
    /// layer i.
    pub activations: Vec<FeatureMap>,
    /// Pre-activation z of every layer, including the head layer.
    pub pre_activations: Vec<FeatureMap>,
    /// Sigmoid of the head pre-activations.
    pub head: FeatureMap,
}

#[inline]
pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

pub(crate) fn forward_trace(model: &ConvModel, x: &Image) -> Result<ForwardTrace, ModelError> {
    if let Some(bad) = x.data().iter().find(|v| **v < 0.0) {
        return Err(ModelError::Parameter(format!(
            "input reconstruction must be non-negative, found {bad}"
        )));
    }
    let (h, w) = (x.height(), x.width());
    let normalized = normalize_zero_mean_unit_std(x);
    let mut a0 = FeatureMap::zeros(1, h, w);
    a0.plane_mut(0).copy_from_slice(normalized.data());

    let mut activations = vec![a0];
    let mut pre_activations = Vec::with_capacity(model.layers.len());
    let last = model.layers.len() - 1;

    for (li, layer) in model.layers.iter().enumerate() {
        let input = activations.last().unwrap();
        let mut z = FeatureMap::zeros(layer.out_ch, h, w);
        for oc in 0..layer.out_ch {
            z.plane_mut(oc).fill(layer.bias[oc]);
        }
        for oc in 0..layer.out_ch {
            // Split borrow: planes of z are disjoint.
            let plane_len = h * w;
            let (zdata, zoff) = (&mut z.data, oc * plane_len);
            for ic in 0..layer.in_ch {
                conv3x3_add(
                    input.plane(ic),
                    h,
                    w,
                    layer.kernel(oc, ic),
                    &mut zdata[zoff..zoff + plane_len],
                );
            }
        }
        if z.data.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::Numeric { layer: li });
        }
        if li < last {
            let mut a = z.clone();
            for v in &mut a.data {
                if *v < 0.0 {
                    *v *= LEAKY_SLOPE;
                }
            }
            pre_activations.push(z);
            activations.push(a);
        } else {
            let mut head = z.clone();
            for v in &mut head.data {
                *v = sigmoid(*v);
            }
            pre_activations.push(z);
            return Ok(ForwardTrace {
                activations,
                pre_activations,
                head,
            });
        }
    }
    unreachable!("model always has at least one layer")
}

/// Runs the network and scales the sigmoid heads into quantile maps:
/// l_tilde = x(1 - o_l), u_tilde = x(1 + o_u). In ResM mode the single head
/// serves as both offsets.
pub fn forward(model: &ConvModel, x: &Image) -> Result<QuantileFields, ModelError> {
    let trace = forward_trace(model, x)?;
    fields_from_head(model.mode, &trace.head, x)
}

pub(crate) fn fields_from_head(
    mode: Mode,
    head: &FeatureMap,
    x: &Image,
) -> Result<QuantileFields, ModelError> {
    let (h, w) = (x.height(), x.width());
    let make = |f: &dyn Fn(usize) -> f64| -> Image {
        Image::new(h, w, (0..h * w).map(f).collect()).expect("finite head outputs")
    };
    let (o_l, o_u) = match mode {
        Mode::Qr => {
            let ol = head.plane(0).to_vec();
            let ou = head.plane(1).to_vec();
            (
                Image::new(h, w, ol).expect("finite"),
                Image::new(h, w, ou).expect("finite"),
            )
        }
        Mode::Resm => {
            let o = head.plane(0).to_vec();
            (
                Image::new(h, w, o.clone()).expect("finite"),
                Image::new(h, w, o).expect("finite"),
            )
        }
    };
    let xs = x.data();
    let l_tilde = make(&|i| xs[i] * (1.0 - o_l.data()[i]));
    let u_tilde = make(&|i| xs[i] * (1.0 + o_u.data()[i]));
    Ok(QuantileFields {
        o_l,
        o_u,
        l_tilde,
        u_tilde,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_model_emits_half_offsets() {
        let model = ConvModel::zeros(Mode::Qr, &[4]).unwrap();
        let x = Image::new(2, 2, vec![0.0, 1.0, 2.0, 4.0]).unwrap();
        let f = forward(&model, &x).unwrap();
        for i in 0..4 {
            assert_eq!(f.o_l.data()[i], 0.5);
            assert_eq!(f.o_u.data()[i], 0.5);
            assert_eq!(f.l_tilde.data()[i], 0.5 * x.data()[i]);
            assert_eq!(f.u_tilde.data()[i], 1.5 * x.data()[i]);
        }
        // x = 0 pins both quantiles to zero.
        assert_eq!(f.l_tilde.data()[0], 0.0);
        assert_eq!(f.u_tilde.data()[0], 0.0);
    }

    #[test]
    fn random_model_respects_shape_and_open_interval() {
        let model = ConvModel::init(Mode::Qr, &ConvModel::DEFAULT_HIDDEN, 3).unwrap();
        let x = Image::new(
            16,
            16,
            (0..256).map(|i| (i as f64 * 0.13).sin().abs()).collect(),
        )
        .unwrap();
        let f = forward(&model, &x).unwrap();
        assert_eq!(f.o_l.height(), 16);
        assert_eq!(f.u_tilde.width(), 16);
        for i in 0..256 {
            assert!(f.o_l.data()[i] > 0.0 && f.o_l.data()[i] < 1.0);
            assert!(f.o_u.data()[i] > 0.0 && f.o_u.data()[i] < 1.0);
            assert!(f.l_tilde.data()[i] <= x.data()[i]);
            assert!(f.u_tilde.data()[i] >= x.data()[i]);
        }
    }

    #[test]
    fn negative_input_is_rejected() {
        let model = ConvModel::zeros(Mode::Qr, &[2]).unwrap();
        let x = Image::new(1, 2, vec![0.5, -0.1]).unwrap();
        assert!(matches!(
            forward(&model, &x),
            Err(ModelError::Parameter(_))
        ));
    }

    #[test]
    fn non_finite_parameters_name_the_layer() {
        let mut model = ConvModel::zeros(Mode::Qr, &[2, 2]).unwrap();
        model.layers_mut()[1].weights[0] = f64::INFINITY;
        // Zero activations times infinity stay zero... force a nonzero path.
        model.layers_mut()[0].bias[0] = 1.0;
        let x = Image::new(4, 4, vec![0.5; 16]).unwrap();
        match forward(&model, &x) {
            Err(ModelError::Numeric { layer }) => assert_eq!(layer, 1),
            other => panic!("expected numeric error, got {other:?}"),
        }
    }

    #[test]
    fn resm_mode_has_single_symmetric_head() {
        let model = ConvModel::init(Mode::Resm, &[4], 9).unwrap();
        let x = Image::new(4, 4, (0..16).map(|i| i as f64 / 8.0).collect()).unwrap();
        let f = forward(&model, &x).unwrap();
        assert_eq!(f.o_l, f.o_u);
    }
}
