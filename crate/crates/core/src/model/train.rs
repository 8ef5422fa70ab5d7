use super::linear::{bce_logit_gradient, bce_loss, predict_slice, LinearModelParams};
use super::schedule::LrSchedule;
use super::{ModelError, NUM_PHASES};
use crate::phase::PhaseLabel;
use crate::preprocess::{FeatureConfig, FeatureVector};
use crate::rng::SeededRng;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub base_lr: f64,
    pub epochs: usize,
    /// `None` warms up for one epoch (capped below the total step count).
    pub warmup_steps: Option<usize>,
    pub batch_size: usize,
    pub seed: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            base_lr: 1e-2,
            epochs: 15,
            warmup_steps: None,
            batch_size: 64,
            seed: 0,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl TrainConfig {
    pub fn steps_per_epoch(&self, n_samples: usize) -> usize {
        n_samples.div_ceil(self.batch_size)
    }

    pub fn schedule(&self, n_samples: usize) -> Result<LrSchedule, ModelError> {
        if self.epochs == 0 {
            return Err(ModelError::InvalidConfig("epochs must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(ModelError::InvalidConfig("batch_size must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) || self.epsilon <= 0.0 {
            return Err(ModelError::InvalidConfig("Adam betas must lie in [0, 1) and epsilon > 0".into()));
        }
        let per_epoch = self.steps_per_epoch(n_samples);
        let total = per_epoch * self.epochs;
        let warmup = self
            .warmup_steps
            .unwrap_or_else(|| per_epoch.min(total.saturating_sub(1)));
        LrSchedule::new(self.base_lr, warmup, total)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub params: LinearModelParams,
    /// Mean training loss of each epoch, measured on each batch before its update.
    pub loss_trace: Vec<f64>,
    pub steps: usize,
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    t: i32,
}

impl Adam {
    fn new(n: usize, cfg: &TrainConfig) -> Self {
        Self {
            m: vec![0.0; n],
            v: vec![0.0; n],
            beta1: cfg.beta1,
            beta2: cfg.beta2,
            epsilon: cfg.epsilon,
            t: 0,
        }
    }

    fn step(&mut self, params: &mut [f64], grads: &[f64], lr: f64) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= lr * m_hat / (v_hat.sqrt() + self.epsilon);
        }
    }
}

/// Mini-batch Adam on the mean per-class BCE, with warmup + cosine learning
/// rate. Single-threaded; the only randomness (weight init, then one shuffle
/// per epoch) comes from `cfg.seed`, so equal inputs give bit-equal output.
pub fn train(
    data: &[(FeatureVector, PhaseLabel)],
    features: FeatureConfig,
    cfg: &TrainConfig,
) -> Result<TrainOutcome, ModelError> {
    if data.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    let dim = features.dim();
    if let Some((x, _)) = data.iter().find(|(x, _)| x.len() != dim) {
        return Err(ModelError::DimensionMismatch {
            expected: dim,
            actual: x.len(),
        });
    }
    let schedule = cfg.schedule(data.len())?;

    let mut rng = SeededRng::new(cfg.seed);
    let bound = 1.0 / (dim as f64).sqrt();
    let weights = (0..NUM_PHASES * dim)
        .map(|_| (2.0 * rng.uniform() - 1.0) * bound)
        .collect();
    let mut params = LinearModelParams::new(features, weights, [0.0; NUM_PHASES])?;

    // Flat parameter layout for the optimizer: weights then biases.
    let n_params = NUM_PHASES * dim + NUM_PHASES;
    let mut adam = Adam::new(n_params, cfg);
    let mut flat = vec![0.0; n_params];
    let mut grads = vec![0.0; n_params];
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut loss_trace = Vec::with_capacity(cfg.epochs);
    let mut step = 0;

    for _ in 0..cfg.epochs {
        rng.shuffle(&mut order);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            grads.iter_mut().for_each(|g| *g = 0.0);
            for &i in batch {
                let (x, y) = &data[i];
                let probs = predict_slice(&params, x)?;
                epoch_loss += bce_loss(&probs, *y);
                let gz = bce_logit_gradient(&probs, *y);
                for (c, g) in gz.iter().enumerate() {
                    let row = &mut grads[c * dim..(c + 1) * dim];
                    for (gw, xi) in row.iter_mut().zip(x.as_slice()) {
                        *gw += g * xi;
                    }
                    grads[NUM_PHASES * dim + c] += g;
                }
            }
            let scale = 1.0 / batch.len() as f64;
            grads.iter_mut().for_each(|g| *g *= scale);

            flat[..NUM_PHASES * dim].copy_from_slice(params.weights());
            flat[NUM_PHASES * dim..].copy_from_slice(params.biases());
            adam.step(&mut flat, &grads, schedule.lr(step));
            params.weights_mut().copy_from_slice(&flat[..NUM_PHASES * dim]);
            params.biases_mut().copy_from_slice(&flat[NUM_PHASES * dim..]);
            step += 1;
        }
        loss_trace.push(epoch_loss / data.len() as f64);
    }

    Ok(TrainOutcome {
        params,
        loss_trace,
        steps: step,
    })
}
