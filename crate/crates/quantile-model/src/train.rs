use grid_core::Image;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::backward::{forward_backward, loss_value, Gradients};
use crate::error::ModelError;
use crate::model::{ConvModel, Mode};

#[derive(Debug, Clone, Copy)]
pub struct TrainConfig {
    pub coverage_target: f64,
    pub learning_rate: f64,
    pub steps: usize,
    pub batch: usize,
    pub seed: u64,
    pub mode: Mode,
}

impl TrainConfig {
    pub fn new(mode: Mode, steps: usize, seed: u64) -> Self {
        Self {
            coverage_target: 0.90,
            learning_rate: 3e-4,
            steps,
            batch: 1,
            seed,
            mode,
        }
    }

    pub(crate) fn validate(&self) -> Result<(), ModelError> {
        if self.coverage_target.is_nan() || self.coverage_target <= 0.0 || self.coverage_target >= 1.0 {
            return Err(ModelError::Parameter(format!(
                "coverage_target must lie in (0, 1), got {}",
                self.coverage_target
            )));
        }
        if self.learning_rate.is_nan() || self.learning_rate <= 0.0 {
            return Err(ModelError::Parameter(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.batch == 0 {
            return Err(ModelError::Parameter("batch must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: ConvModel,
    /// Lowest validation loss seen; infinity when no validation pairs exist.
    pub best_val_loss: f64,
    pub best_val_step: usize,
    /// Mean training loss of the final optimizer step.
    pub final_train_loss: f64,
    /// Mean batch loss at every optimizer step, in step order.
    pub train_losses: Vec<f64>,
    /// (step, validation loss) at every evaluation point, step 0 included.
    pub val_losses: Vec<(usize, f64)>,
}

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

struct AdamState {
    m: Gradients,
    v: Gradients,
    t: u32,
    lr: f64,
}

impl AdamState {
    fn new(model: &ConvModel, lr: f64) -> Self {
        Self {
            m: Gradients::zeros_like(model),
            v: Gradients::zeros_like(model),
            t: 0,
            lr,
        }
    }

    fn update(&mut self, model: &mut ConvModel, grads: &Gradients) {
        self.t += 1;
        let bc1 = 1.0 - BETA1.powi(self.t as i32);
        let bc2 = 1.0 - BETA2.powi(self.t as i32);
        for (li, layer) in model.layers_mut().iter_mut().enumerate() {
            let (m, v, g) = (
                &mut self.m.layers[li],
                &mut self.v.layers[li],
                &grads.layers[li],
            );
            for (((p, m), v), &g) in layer
                .weights
                .iter_mut()
                .zip(m.weights.iter_mut())
                .zip(v.weights.iter_mut())
                .zip(&g.weights)
            {
                *m = BETA1 * *m + (1.0 - BETA1) * g;
                *v = BETA2 * *v + (1.0 - BETA2) * g * g;
                *p -= self.lr * (*m / bc1) / ((*v / bc2).sqrt() + ADAM_EPS);
            }
            for (((p, m), v), &g) in layer
                .bias
                .iter_mut()
                .zip(m.bias.iter_mut())
                .zip(v.bias.iter_mut())
                .zip(&g.bias)
            {
                *m = BETA1 * *m + (1.0 - BETA1) * g;
                *v = BETA2 * *v + (1.0 - BETA2) * g * g;
                *p -= self.lr * (*m / bc1) / ((*v / bc2).sqrt() + ADAM_EPS);
            }
        }
    }
}

/// Adam training with seeded shuffling. Validation loss is measured every
/// steps/20 updates (and at the end); the parameters with the lowest
/// validation loss are returned. With no validation pairs the final
/// parameters are returned. Deterministic given the seed.
pub fn train(
    model: ConvModel,
    train_pairs: &[(Image, Image)],
    val_pairs: &[(Image, Image)],
    config: &TrainConfig,
) -> Result<TrainOutcome, ModelError> {
    config.validate()?;
    if train_pairs.is_empty() {
        return Err(ModelError::Parameter("training set is empty".into()));
    }
    if model.mode() != config.mode {
        return Err(ModelError::Parameter(
            "model mode does not match config mode".into(),
        ));
    }
    let mut model = model;
    if config.steps == 0 {
        return Ok(TrainOutcome {
            model,
            best_val_loss: f64::INFINITY,
            best_val_step: 0,
            final_train_loss: f64::INFINITY,
            train_losses: Vec::new(),
            val_losses: Vec::new(),
        });
    }

    let val_loss = |m: &ConvModel| -> Result<f64, ModelError> {
        let mut total = 0.0;
        for (x, y) in val_pairs {
            total += loss_value(m, x, y, config)?;
        }
        Ok(total / val_pairs.len() as f64)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..train_pairs.len()).collect();
    let mut pos = order.len(); // forces a shuffle before the first step
    let mut adam = AdamState::new(&model, config.learning_rate);
    let val_every = (config.steps / 20).max(1);

    let mut best: Option<(f64, usize, ConvModel)> = if val_pairs.is_empty() {
        None
    } else {
        Some((val_loss(&model)?, 0, model.clone()))
    };
    let mut final_train_loss = f64::INFINITY;
    let mut train_losses = Vec::with_capacity(config.steps);
    let mut val_losses = Vec::new();
    if let Some((v0, _, _)) = &best {
        val_losses.push((0, *v0));
    }

    for step in 1..=config.steps {
        let mut grads = Gradients::zeros_like(&model);
        let mut batch_loss = 0.0;
        for _ in 0..config.batch {
            if pos >= order.len() {
                order.shuffle(&mut rng);
                pos = 0;
            }
            let (x, y) = &train_pairs[order[pos]];
            pos += 1;
            let (loss, g) = forward_backward(&model, x, y, config)?;
            if !loss.is_finite() {
                return Err(ModelError::Diverged { step });
            }
            batch_loss += loss;
            grads.add_assign(&g);
        }
        if config.batch > 1 {
            grads.scale(1.0 / config.batch as f64);
        }
        adam.update(&mut model, &grads);
        final_train_loss = batch_loss / config.batch as f64;
        train_losses.push(final_train_loss);

        if !val_pairs.is_empty() && (step % val_every == 0 || step == config.steps) {
            let v = val_loss(&model)?;
            if !v.is_finite() {
                return Err(ModelError::Diverged { step });
            }
            val_losses.push((step, v));
            if best.as_ref().is_none_or(|b| v < b.0) {
                best = Some((v, step, model.clone()));
            }
        }
    }

    Ok(match best {
        Some((loss, step, best_model)) => TrainOutcome {
            model: best_model,
            best_val_loss: loss,
            best_val_step: step,
            final_train_loss,
            train_losses,
            val_losses,
        },
        None => TrainOutcome {
            model,
            best_val_loss: f64::INFINITY,
            best_val_step: config.steps,
            final_train_loss,
            train_losses,
            val_losses,
        },
    })
}
