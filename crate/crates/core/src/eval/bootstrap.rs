use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{macro_metrics, ConfusionMatrix, Metric};
use super::EvalError;
use crate::phase::PhaseLabel;
use crate::rng::{derive_seed, SeededRng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapCI {
    pub metric: Metric,
    pub point: f64,
    pub lower: f64,
    pub upper: f64,
    pub resamples: usize,
    pub level: f64,
}

/// Percentile bootstrap over `(truth, pred)` items.
///
/// Resample `r` draws `n` items with replacement from its own stream seeded
/// by `derive_seed(seed, r)`, so the result does not depend on how resamples
/// are scheduled across threads. Bounds are the linearly interpolated
/// `(1 - level) / 2` and `1 - (1 - level) / 2` quantiles of the resampled
/// metric.
pub fn bootstrap_ci(
    items: &[(PhaseLabel, PhaseLabel)],
    metric: Metric,
    resamples: usize,
    level: f64,
    seed: u64,
) -> Result<BootstrapCI, EvalError> {
    if items.is_empty() {
        return Err(EvalError::Empty);
    }
    if resamples == 0 {
        return Err(EvalError::InvalidArgument("resamples must be positive".into()));
    }
    if !(0.0..1.0).contains(&level) {
        return Err(EvalError::InvalidArgument(format!("level must lie in [0, 1), got {level}")));
    }
    let mut full = ConfusionMatrix::default();
    items.iter().for_each(|&(t, p)| full.add(t, p));
    let point = metric.of(&macro_metrics(&full));

    let n = items.len();
    let mut values: Vec<f64> = (0..resamples)
        .into_par_iter()
        .map(|r| {
            let mut rng = SeededRng::new(derive_seed(seed, r as u64));
            let mut cm = ConfusionMatrix::default();
            for _ in 0..n {
                let (t, p) = items[rng.below_usize(n)];
                cm.add(t, p);
            }
            metric.of(&macro_metrics(&cm))
        })
        .collect();
    values.sort_by(f64::total_cmp);

    let tail = (1.0 - level) / 2.0;
    Ok(BootstrapCI {
        metric,
        point,
        lower: percentile(&values, tail),
        upper: percentile(&values, 1.0 - tail),
        resamples,
        level,
    })
}

/// Linear-interpolation quantile of ascending `sorted` at `q` in `[0, 1]`.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}
