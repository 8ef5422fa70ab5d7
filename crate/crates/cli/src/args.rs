//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "ctphase", version, about = "Contrast-phase recognition for abdominal CT series")]
pub struct Cli {
    /// Repeat for more logging on stderr.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 50.0, allow_negative_numbers = true)]
    pub window_center: f64,
    #[arg(long, default_value_t = 400.0)]
    pub window_width: f64,
    /// Side length slices are resized to before feature extraction.
    #[arg(long, default_value_t = 128)]
    pub resolution: usize,
    /// Percentage of slices sampled per scan.
    #[arg(long = "r", default_value_t = 30.0)]
    pub r_percent: f64,
    #[arg(long, default_value_t = 5000)]
    pub resamples: usize,
    /// Worker threads; 0 uses one per core.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

impl Default for CommonArgs {
    fn default() -> Self {
        Self {
            seed: 0,
            window_center: 50.0,
            window_width: 400.0,
            resolution: 128,
            r_percent: 30.0,
            resamples: 5000,
            workers: 0,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Strip every non-whitelisted attribute from a tree of DICOM files.
    Anonymize {
        input: PathBuf,
        output: PathBuf,
        /// One tag per line, e.g. `(0010,0010)`; replaces the default list.
        #[arg(long)]
        whitelist: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Write a synthetic phantom dataset as DICOM plus label files.
    Synth(SynthArgs),
    /// Fit the linear slice classifier.
    Train {
        data: PathBuf,
        labels: PathBuf,
        model: PathBuf,
        #[command(flatten)]
        train: TrainArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Predict one phase per scan by sampled majority voting.
    Predict {
        data: PathBuf,
        model: PathBuf,
        output: PathBuf,
        /// Only predict the series listed in this label file.
        #[arg(long)]
        labels: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Score predictions against labels and write a JSON report.
    Evaluate {
        labels: PathBuf,
        predictions: PathBuf,
        output: PathBuf,
        /// With --model, also evaluate every slice of the labeled scans.
        #[arg(long, requires = "model")]
        data: Option<PathBuf>,
        #[arg(long, requires = "data")]
        model: Option<PathBuf>,
        /// Also run the R sweep over this many sampler seeds.
        #[arg(long, requires = "data")]
        sweep_seeds: Option<usize>,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Scan-level macro F1 as a function of R.
    Sweep {
        data: PathBuf,
        labels: PathBuf,
        model: PathBuf,
        output: PathBuf,
        /// Comma-separated R values; defaults to 1,5,10,15,20,30,...,100.
        #[arg(long, value_delimiter = ',')]
        r_values: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        seeds: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Time sampled inference per scan.
    Bench {
        data: PathBuf,
        model: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "30,100")]
        r_values: Vec<f64>,
        /// Also write the table as CSV.
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    pub output: PathBuf,
    #[arg(long, default_value_t = 40)]
    pub studies: usize,
    #[arg(long, default_value_t = 3)]
    pub scans_per_study: usize,
    #[arg(long, default_value_t = 64)]
    pub rows: usize,
    #[arg(long, default_value_t = 64)]
    pub cols: usize,
    #[arg(long, default_value_t = 30)]
    pub min_slices: usize,
    #[arg(long, default_value_t = 60)]
    pub max_slices: usize,
    #[arg(long, default_value_t = 15.0)]
    pub noise_sigma: f64,
    /// Probability a slice shows another phase's contrast.
    #[arg(long, default_value_t = 0.0)]
    pub label_noise: f64,
    /// Probability a slice shows no contrast-bearing region.
    #[arg(long, default_value_t = 0.0)]
    pub uninformative: f64,
    /// Share of studies written to train_labels.csv.
    #[arg(long, default_value_t = 0.7)]
    pub train_fraction: f64,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[arg(long, default_value_t = 15)]
    pub epochs: usize,
    #[arg(long, default_value_t = 1e-2)]
    pub lr: f64,
    #[arg(long, default_value_t = 64)]
    pub batch_size: usize,
    /// Defaults to one epoch of steps.
    #[arg(long)]
    pub warmup_steps: Option<usize>,
    #[arg(long, default_value_t = 32)]
    pub bins: usize,
    #[arg(long, default_value_t = 2)]
    pub grid: usize,
}

impl Default for TrainArgs {
    fn default() -> Self {
        Self {
            epochs: 15,
            lr: 1e-2,
            batch_size: 64,
            warmup_steps: None,
            bins: 32,
            grid: 2,
        }
    }
}
