//! Scan-level phase recognition: sample R% of a scan's slices, classify each
//! sampled slice, and majority-vote the slice decisions.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eval::{confusion, macro_metrics, percentile, EvalError};
use crate::model::{ModelError, SliceClassifier, SliceProbs};
use crate::phase::{PhaseLabel, NUM_PHASES};
use crate::preprocess::{FeatureConfig, FeatureVector, PreprocessConfig, PreprocessError};
use crate::rng::{derive_seed, fnv1a, SeededRng};
use crate::scan::CtScan;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("sampling percentage must lie in (0, 100], got {0}")]
    InvalidPercent(f64),
    #[error("scan {0} has no slices")]
    EmptyScan(String),
    #[error("nothing to vote on")]
    NoVotes,
    #[error("scan {0} has no phase label")]
    MissingLabel(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Sweep grid: 1 to 20 in steps of 5, then 20 to 100 in steps of 10.
pub const DEFAULT_R_GRID: [f64; 13] = [
    1.0, 5.0, 10.0, 15.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 100.0,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    r_percent: f64,
    pub seed: u64,
}

impl SamplerConfig {
    pub fn new(r_percent: f64, seed: u64) -> Result<Self, PipelineError> {
        if !(r_percent > 0.0 && r_percent <= 100.0) {
            return Err(PipelineError::InvalidPercent(r_percent));
        }
        Ok(Self { r_percent, seed })
    }

    pub fn r_percent(&self) -> f64 {
        self.r_percent
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

/// `max(1, ceil(n * r / 100))`, never more than `n`.
pub fn sample_size(n_slices: usize, r_percent: f64) -> usize {
    let k = (n_slices as f64 * r_percent / 100.0).ceil() as usize;
    k.clamp(1, n_slices.max(1))
}

/// Uniform sample without replacement via a partial Fisher-Yates shuffle
/// driven by `cfg.seed`; returned ascending.
pub fn sample_indices(n_slices: usize, cfg: &SamplerConfig) -> Vec<usize> {
    if n_slices == 0 {
        return Vec::new();
    }
    let k = sample_size(n_slices, cfg.r_percent);
    let mut rng = SeededRng::new(cfg.seed);
    let mut pool: Vec<usize> = (0..n_slices).collect();
    for i in 0..k {
        let j = i + rng.below_usize(n_slices - i);
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool.sort_unstable();
    pool
}

/// Seed for one scan's sample, so results do not depend on scan order.
pub fn scan_seed(seed: u64, series_uid: &str) -> u64 {
    derive_seed(seed, fnv1a(series_uid))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanPrediction {
    pub phase: PhaseLabel,
    pub vote_counts: [usize; NUM_PHASES],
    pub sampled_indices: Vec<usize>,
    pub slice_probs: Vec<SliceProbs>,
}

/// Majority vote over slice argmaxes.
///
/// Slice-level ties go to the lowest ordinal. Among classes tied on votes,
/// the one with the largest score summed over all slices wins, then the
/// lowest ordinal. `sampled_indices` is `0..probs.len()`.
pub fn vote(probs: &[SliceProbs]) -> Result<ScanPrediction, PipelineError> {
    if probs.is_empty() {
        return Err(PipelineError::NoVotes);
    }
    let mut counts = [0usize; NUM_PHASES];
    let mut sums = [0.0f64; NUM_PHASES];
    for p in probs {
        counts[p.argmax().ordinal()] += 1;
        for (s, v) in sums.iter_mut().zip(p.scores()) {
            *s += v;
        }
    }
    let mut best = 0;
    for c in 1..NUM_PHASES {
        if counts[c] > counts[best] || (counts[c] == counts[best] && sums[c] > sums[best]) {
            best = c;
        }
    }
    Ok(ScanPrediction {
        phase: PhaseLabel::ALL[best],
        vote_counts: counts,
        sampled_indices: (0..probs.len()).collect(),
        slice_probs: probs.to_vec(),
    })
}

fn check_features(classifier: &impl SliceClassifier, pre: &PreprocessConfig) -> Result<(), ModelError> {
    let have: FeatureConfig = pre.features;
    let want = classifier.feature_config();
    if have != want {
        return Err(ModelError::DimensionMismatch {
            expected: want.dim(),
            actual: have.dim(),
        });
    }
    Ok(())
}

/// Sample, preprocess, classify and vote. The classifier runs exactly once
/// per sampled slice. The sample is drawn with
/// `scan_seed(sampler.seed, scan.series_uid)`.
pub fn predict_scan<C: SliceClassifier>(
    scan: &CtScan,
    classifier: &C,
    sampler: &SamplerConfig,
    pre: &PreprocessConfig,
) -> Result<ScanPrediction, PipelineError> {
    if scan.is_empty() {
        return Err(PipelineError::EmptyScan(scan.series_uid.clone()));
    }
    check_features(classifier, pre)?;
    let seeded = sampler.with_seed(scan_seed(sampler.seed, &scan.series_uid));
    let indices = sample_indices(scan.len(), &seeded);
    let probs = indices
        .iter()
        .map(|&i| {
            let features = pre.slice_features(&scan.slices[i].hu)?;
            Ok(classifier.classify(&features)?)
        })
        .collect::<Result<Vec<_>, PipelineError>>()?;
    let mut prediction = vote(&probs)?;
    prediction.sampled_indices = indices;
    Ok(prediction)
}

/// Classifies every slice of a scan, in parallel, preserving slice order.
pub fn score_all_slices<C: SliceClassifier>(
    scan: &CtScan,
    classifier: &C,
    pre: &PreprocessConfig,
) -> Result<Vec<SliceProbs>, PipelineError> {
    check_features(classifier, pre)?;
    scan.slices
        .par_iter()
        .map(|s| {
            let features = pre.slice_features(&s.hu)?;
            Ok(classifier.classify(&features)?)
        })
        .collect()
}

/// A labeled scan with every slice already scored.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredScan {
    pub series_uid: String,
    pub label: PhaseLabel,
    pub probs: Vec<SliceProbs>,
}

impl ScoredScan {
    /// Vote over the slices a sampler with `seed` would pick for this scan.
    /// Equivalent to [`predict_scan`] with the same seed, since the
    /// classifier is deterministic.
    pub fn predict(&self, r_percent: f64, seed: u64) -> Result<PhaseLabel, PipelineError> {
        let cfg = SamplerConfig::new(r_percent, scan_seed(seed, &self.series_uid))?;
        let idx = sample_indices(self.probs.len(), &cfg);
        let picked: Vec<SliceProbs> = idx.iter().map(|&i| self.probs[i]).collect();
        Ok(vote(&picked)?.phase)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub r_percent: f64,
    pub seeds: usize,
    pub mean_macro_f1: f64,
    /// 2.5% and 97.5% quantiles of the per-seed macro F1.
    pub ci_lower: f64,
    pub ci_upper: f64,
}

/// Scan-level macro F1 at each R, averaged over sampler seeds
/// `base_seed, base_seed + 1, ...`.
pub fn r_sweep(
    scans: &[ScoredScan],
    r_values: &[f64],
    seeds: usize,
    base_seed: u64,
) -> Result<Vec<SweepRow>, PipelineError> {
    if seeds == 0 {
        return Err(PipelineError::Eval(EvalError::InvalidArgument(
            "at least one seed is required".into(),
        )));
    }
    if r_values.is_empty() {
        return Err(PipelineError::Eval(EvalError::InvalidArgument(
            "no R values given".into(),
        )));
    }
    let truth: Vec<PhaseLabel> = scans.iter().map(|s| s.label).collect();
    r_values
        .iter()
        .map(|&r| {
            SamplerConfig::new(r, 0)?;
            let mut f1s = (0..seeds as u64)
                .into_par_iter()
                .map(|s| {
                    let seed = base_seed.wrapping_add(s);
                    let pred = scans
                        .iter()
                        .map(|scan| scan.predict(r, seed))
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(macro_metrics(&confusion(&truth, &pred)?).macro_f1)
                })
                .collect::<Result<Vec<f64>, PipelineError>>()?;
            let mean = f1s.iter().sum::<f64>() / f1s.len() as f64;
            f1s.sort_by(f64::total_cmp);
            Ok(SweepRow {
                r_percent: r,
                seeds,
                mean_macro_f1: mean,
                ci_lower: percentile(&f1s, 0.025),
                ci_upper: percentile(&f1s, 0.975),
            })
        })
        .collect()
}

/// Scores every slice of each labeled scan, then runs [`r_sweep`].
pub fn r_sweep_scans<C: SliceClassifier>(
    scans: &[CtScan],
    classifier: &C,
    pre: &PreprocessConfig,
    r_values: &[f64],
    seeds: usize,
    base_seed: u64,
) -> Result<Vec<SweepRow>, PipelineError> {
    let scored = scans
        .iter()
        .map(|scan| {
            Ok(ScoredScan {
                series_uid: scan.series_uid.clone(),
                label: scan
                    .label
                    .ok_or_else(|| PipelineError::MissingLabel(scan.series_uid.clone()))?,
                probs: score_all_slices(scan, classifier, pre)?,
            })
        })
        .collect::<Result<Vec<_>, PipelineError>>()?;
    r_sweep(&scored, r_values, seeds, base_seed)
}

/// Wraps a classifier and counts `classify` calls.
#[derive(Debug, Default)]
pub struct CountingClassifier<C> {
    inner: C,
    calls: AtomicUsize,
}

impl<C> CountingClassifier<C> {
    pub fn new(inner: C) -> Self {
        Self {
            inner,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.calls.store(0, Ordering::Relaxed);
    }
}

impl<C: SliceClassifier> SliceClassifier for CountingClassifier<C> {
    fn feature_config(&self) -> FeatureConfig {
        self.inner.feature_config()
    }

    fn classify(&self, features: &FeatureVector) -> Result<SliceProbs, ModelError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.classify(features)
    }
}
