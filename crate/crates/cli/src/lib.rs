//! Batch workflows for CT contrast-phase recognition: de-identification,
//! phantom synthesis, training, sampled prediction, evaluation, R sweeps
//! and latency benchmarking. Every command is deterministic given `--seed`.

pub mod args;
pub mod commands;

use anyhow::{ensure, Context, Result};
use ctphase_core::pipeline::SamplerConfig;
use ctphase_core::preprocess::{FeatureConfig, PreprocessConfig, WindowSpec};

use args::{Cli, Command, CommonArgs};

/// Validated form of the flags shared by all subcommands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub window: WindowSpec,
    pub resolution: usize,
    pub sampler: SamplerConfig,
    pub seed: u64,
    pub resamples: usize,
    pub workers: usize,
}

impl RunConfig {
    pub fn from_args(a: &CommonArgs) -> Result<Self> {
        let window = WindowSpec::new(a.window_center, a.window_width).context("invalid --window-width")?;
        ensure!(a.resolution > 0, "--resolution must be positive");
        ensure!(a.resamples > 0, "--resamples must be positive");
        let sampler = SamplerConfig::new(a.r_percent, a.seed)?;
        Ok(Self {
            window,
            resolution: a.resolution,
            sampler,
            seed: a.seed,
            resamples: a.resamples,
            workers: a.workers,
        })
    }

    pub fn preprocess(&self, features: FeatureConfig) -> PreprocessConfig {
        PreprocessConfig {
            window: self.window,
            resolution: self.resolution,
            features,
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::from_args(&CommonArgs::default()).expect("defaults are valid")
    }
}

fn common(cmd: &Command) -> &CommonArgs {
    match cmd {
        Command::Anonymize { common, .. }
        | Command::Train { common, .. }
        | Command::Predict { common, .. }
        | Command::Evaluate { common, .. }
        | Command::Sweep { common, .. }
        | Command::Bench { common, .. } => common,
        Command::Synth(s) => &s.common,
    }
}

/// Runs one parsed command line, printing a short summary to stdout.
pub fn run(cli: Cli) -> Result<()> {
    let cfg = RunConfig::from_args(common(&cli.command))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .context("cannot start worker pool")?;
    pool.install(|| commands::dispatch(cli.command, &cfg))
}
