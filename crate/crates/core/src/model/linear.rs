use super::{ModelError, NUM_PHASES};
use crate::phase::PhaseLabel;
use crate::preprocess::{FeatureConfig, FeatureVector};

const PROB_CLAMP: f64 = 1e-7;

/// Per-class sigmoid scores. Each lies in `[0, 1]`; they need not sum to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceProbs([f64; NUM_PHASES]);

impl SliceProbs {
    pub fn new(scores: [f64; NUM_PHASES]) -> Option<Self> {
        scores
            .iter()
            .all(|s| (0.0..=1.0).contains(s))
            .then_some(Self(scores))
    }

    pub fn scores(&self) -> &[f64; NUM_PHASES] {
        &self.0
    }

    pub fn get(&self, phase: PhaseLabel) -> f64 {
        self.0[phase.ordinal()]
    }

    /// Highest-scoring class; ties go to the lowest ordinal.
    pub fn argmax(&self) -> PhaseLabel {
        let mut best = 0;
        for c in 1..NUM_PHASES {
            if self.0[c] > self.0[best] {
                best = c;
            }
        }
        PhaseLabel::ALL[best]
    }
}

/// Weights (one row per class) and biases of the linear slice classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModelParams {
    features: FeatureConfig,
    weights: Vec<f64>,
    biases: [f64; NUM_PHASES],
}

impl LinearModelParams {
    pub fn new(
        features: FeatureConfig,
        weights: Vec<f64>,
        biases: [f64; NUM_PHASES],
    ) -> Result<Self, ModelError> {
        features
            .validate()
            .map_err(|e| ModelError::InvalidConfig(e.to_string()))?;
        let expected = NUM_PHASES * features.dim();
        if weights.len() != expected {
            return Err(ModelError::DimensionMismatch {
                expected,
                actual: weights.len(),
            });
        }
        if !weights.iter().chain(biases.iter()).all(|v| v.is_finite()) {
            return Err(ModelError::InvalidConfig("non-finite parameter".into()));
        }
        Ok(Self {
            features,
            weights,
            biases,
        })
    }

    pub fn zeros(features: FeatureConfig) -> Result<Self, ModelError> {
        Self::new(features, vec![0.0; NUM_PHASES * features.dim()], [0.0; NUM_PHASES])
    }

    pub fn features(&self) -> FeatureConfig {
        self.features
    }

    pub fn dim(&self) -> usize {
        self.features.dim()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn weight_row(&self, class: usize) -> &[f64] {
        let d = self.dim();
        &self.weights[class * d..(class + 1) * d]
    }

    pub fn biases(&self) -> &[f64; NUM_PHASES] {
        &self.biases
    }

    pub fn biases_mut(&mut self) -> &mut [f64; NUM_PHASES] {
        &mut self.biases
    }

    pub fn logits(&self, x: &[f64]) -> Result<[f64; NUM_PHASES], ModelError> {
        if x.len() != self.dim() {
            return Err(ModelError::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        let mut z = self.biases;
        for (c, zc) in z.iter_mut().enumerate() {
            *zc += self
                .weight_row(c)
                .iter()
                .zip(x)
                .map(|(w, xi)| w * xi)
                .sum::<f64>();
        }
        Ok(z)
    }
}

/// Logistic function, held strictly inside (0, 1) even for extreme inputs.
pub fn sigmoid(z: f64) -> f64 {
    let s = if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    };
    s.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

pub fn predict_slice(
    params: &LinearModelParams,
    features: &FeatureVector,
) -> Result<SliceProbs, ModelError> {
    let z = params.logits(features.as_slice())?;
    Ok(SliceProbs(z.map(sigmoid)))
}

/// Mean over the four classes of the binary cross-entropy against a one-hot
/// target, with probabilities clamped to `[1e-7, 1 - 1e-7]`.
pub fn bce_loss(probs: &SliceProbs, target: PhaseLabel) -> f64 {
    let t = target.ordinal();
    probs
        .0
        .iter()
        .enumerate()
        .map(|(c, &p)| {
            let p = p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
            if c == t {
                -p.ln()
            } else {
                -(1.0 - p).ln()
            }
        })
        .sum::<f64>()
        / NUM_PHASES as f64
}

/// Gradient of [`bce_loss`] with respect to the four logits (ignoring the
/// clamp): `(p_c - y_c) / 4`.
pub fn bce_logit_gradient(probs: &SliceProbs, target: PhaseLabel) -> [f64; NUM_PHASES] {
    let t = target.ordinal();
    let mut g = [0.0; NUM_PHASES];
    for (c, gc) in g.iter_mut().enumerate() {
        let y = if c == t { 1.0 } else { 0.0 };
        *gc = (probs.0[c] - y) / NUM_PHASES as f64;
    }
    g
}
