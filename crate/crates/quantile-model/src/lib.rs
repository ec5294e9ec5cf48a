//! Trainable uncertainty module: a shallow 3x3 convolutional network whose
//! sigmoid heads, multiplied by the reconstruction, give pixelwise quantile
//! offsets. Trains with the pinball loss (QR mode) or a squared
//! residual-magnitude loss (ResM mode) under plain Adam, with reverse-mode
//! gradients verified against central finite differences.

mod backward;
mod checkpoint;
mod error;
mod feature;
mod gradcheck;
mod loss;
mod model;
mod train;

pub use backward::{backward, loss_value, Gradients, LayerGrad};
pub use checkpoint::{load_checkpoint, save_checkpoint, CheckpointMeta};
pub use error::ModelError;
pub use gradcheck::{
    compare_gradients, finite_difference_gradients, grad_check, kink_margin, GradCheckReport,
};
pub use loss::{pinball_loss, qr_total_loss, resm_loss};
pub use model::{forward, ConvLayer, ConvModel, Mode, QuantileFields, LEAKY_SLOPE};
pub use train::{train, TrainConfig, TrainOutcome};
