use super::ModelError;

/// Linear warmup followed by cosine annealing to zero.
///
/// Warmup steps `s < w` use `base * (s + 1) / w`; afterwards
/// `0.5 * base * (1 + cos(pi * (s - w) / (total - w)))`.
pub fn lr_at_step(base_lr: f64, warmup_steps: usize, step: usize, total_steps: usize) -> f64 {
    debug_assert!(step < total_steps && warmup_steps < total_steps);
    if step < warmup_steps {
        return base_lr * (step + 1) as f64 / warmup_steps as f64;
    }
    let progress = (step - warmup_steps) as f64 / (total_steps - warmup_steps) as f64;
    0.5 * base_lr * (1.0 + (std::f64::consts::PI * progress).cos())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrSchedule {
    pub base_lr: f64,
    pub warmup_steps: usize,
    pub total_steps: usize,
}

impl LrSchedule {
    pub fn new(base_lr: f64, warmup_steps: usize, total_steps: usize) -> Result<Self, ModelError> {
        if !(base_lr > 0.0 && base_lr.is_finite()) {
            return Err(ModelError::InvalidConfig(format!("base_lr must be positive, got {base_lr}")));
        }
        if warmup_steps >= total_steps {
            return Err(ModelError::InvalidConfig(format!(
                "warmup_steps ({warmup_steps}) must be below total_steps ({total_steps})"
            )));
        }
        Ok(Self {
            base_lr,
            warmup_steps,
            total_steps,
        })
    }

    pub fn lr(&self, step: usize) -> f64 {
        lr_at_step(self.base_lr, self.warmup_steps, step, self.total_steps)
    }
}
