//! Slice-level classification: the classifier interface, a trainable
//! sigmoid-per-class linear model with its BCE training loop, the model file
//! format, and the compound-scaling calculator for CNN backbones.

mod io;
mod linear;
mod scaling;
mod schedule;
mod train;

pub use crate::phase::{PhaseLabel, NUM_PHASES};
pub use io::{load_model, save_model, MODEL_MAGIC, MODEL_VERSION};
pub use linear::{bce_logit_gradient, bce_loss, predict_slice, sigmoid, LinearModelParams, SliceProbs};
pub use scaling::{compound_scale, ScalingConfig};
pub use schedule::{lr_at_step, LrSchedule};
pub use train::{train, TrainConfig, TrainOutcome};

use crate::preprocess::{FeatureConfig, FeatureVector};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("feature vector has length {actual}, model expects {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("training set is empty")]
    EmptyDataset,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("scaling constraint alpha*beta^2*gamma^2 = {product} outside [1.8, 2.2]")]
    ConstraintViolated { product: f64 },
    #[error("model file version {found}, this build reads version {expected}")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("corrupt model payload: {0}")]
    CorruptPayload(String),
}

/// Anything that turns one slice's features into four per-class scores.
pub trait SliceClassifier: Sync {
    fn feature_config(&self) -> FeatureConfig;

    fn classify(&self, features: &FeatureVector) -> Result<SliceProbs, ModelError>;
}

impl SliceClassifier for LinearModelParams {
    fn feature_config(&self) -> FeatureConfig {
        self.features()
    }

    fn classify(&self, features: &FeatureVector) -> Result<SliceProbs, ModelError> {
        predict_slice(self, features)
    }
}

impl<C: SliceClassifier + ?Sized> SliceClassifier for &C {
    fn feature_config(&self) -> FeatureConfig {
        (**self).feature_config()
    }

    fn classify(&self, features: &FeatureVector) -> Result<SliceProbs, ModelError> {
        (**self).classify(features)
    }
}
