// SPDX-License-Identifier: MIT OR Apache-2.0

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mxpbf::simgen::{ChangeKind, Layout, SignalCount, Structure};
use mxpbf::ScanKind;

#[derive(Debug, Parser)]
#[command(
    name = "mxpbf",
    version,
    about = "Change-point detection with maximum pairwise Bayes factors"
)]
pub struct Cli {
    /// Worker threads for all parallel stages (default: available cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detect changes in the mean vector.
    DetectMean(DetectArgs),
    /// Detect changes in the covariance matrix (pairwise regressions).
    DetectCov(CovArgs),
    /// Covariance detection, then mean detection within each segment.
    DetectCombined(CombinedArgs),
    /// Select alpha for one window size by simulated false-positive rate.
    Calibrate(CalibrateArgs),
    /// Generate a synthetic dataset with planted change points.
    Simulate(SimulateArgs),
    /// Score detection reports against a truth file.
    Evaluate(EvaluateArgs),
}

/// `auto` or a positive number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaArg {
    Auto,
    Fixed(f64),
}

impl FromStr for AlphaArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Self::Auto);
        }
        match s.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(Self::Fixed(v)),
            _ => Err(format!("expected `auto` or a positive number, got {s:?}")),
        }
    }
}

impl fmt::Display for AlphaArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Auto => f.write_str("auto"),
            Self::Fixed(v) => write!(f, "{v}"),
        }
    }
}

/// Comma-separated window sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowList(pub Vec<usize>);

pub fn parse_windows(s: &str) -> Result<WindowList, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("invalid window size {t:?} in {s:?}"))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(WindowList)
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

fn probability(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v < 1.0 => Ok(v),
        _ => Err(format!("expected a number in (0, 1), got {s:?}")),
    }
}

#[derive(Debug, Clone, Args)]
pub struct DetectArgs {
    /// Input CSV (rows are observations).
    #[arg(short, long)]
    pub input: PathBuf,

    /// Report path (JSON); stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,

    /// Window ladder, an odd number of increasing sizes.
    #[arg(long, value_parser = parse_windows, default_value = "25,60,100")]
    pub windows: WindowList,

    /// Prior exponent: `auto` calibrates each window size.
    #[arg(long, default_value = "auto")]
    pub alpha: AlphaArg,

    /// Detection threshold on the Bayes-factor scale.
    #[arg(long, value_parser = positive_f64, default_value_t = 10.0)]
    pub threshold: f64,

    /// Target false-positive rate for `--alpha auto`.
    #[arg(long, value_parser = probability, default_value_t = 0.05)]
    pub fpr: f64,

    /// Simulated null datasets for `--alpha auto`.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..), default_value_t = 300)]
    pub nsim: u64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Divide each column by 1.4826 x its median absolute deviation first.
    #[arg(long)]
    pub scale_mad: bool,

    /// Per-center profile CSV; with several scans a suffix names each one.
    #[arg(long)]
    pub profile: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct HyperArgs {
    /// Inverse-gamma shape.
    #[arg(long, value_parser = positive_f64, default_value_t = 0.01)]
    pub a0: f64,
    /// Inverse-gamma rate under no change.
    #[arg(long, value_parser = positive_f64, default_value_t = 0.01)]
    pub b0: f64,
    /// Inverse-gamma rate of the left half under a change.
    #[arg(long, value_parser = positive_f64, default_value_t = 0.01)]
    pub b01: f64,
    /// Inverse-gamma rate of the right half under a change.
    #[arg(long, value_parser = positive_f64, default_value_t = 0.01)]
    pub b02: f64,
}

impl HyperArgs {
    pub fn to_hyper(&self) -> mxpbf::CovHyper {
        mxpbf::CovHyper {
            a0: self.a0,
            b0: self.b0,
            b01: self.b01,
            b02: self.b02,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CovArgs {
    #[command(flatten)]
    pub detect: DetectArgs,

    #[command(flatten)]
    pub hyper: HyperArgs,

    /// Center each window size's scan by a rolling mean of that width.
    #[arg(long)]
    pub rolling_center: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CombinedArgs {
    #[command(flatten)]
    pub detect: DetectArgs,

    #[command(flatten)]
    pub hyper: HyperArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Mean,
    Covariance,
}

impl From<KindArg> for ScanKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Mean => ScanKind::Mean,
            KindArg::Covariance => ScanKind::Covariance,
        }
    }
}

impl From<KindArg> for ChangeKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Mean => ChangeKind::Mean,
            KindArg::Covariance => ChangeKind::Covariance,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CalibrateArgs {
    #[arg(short, long)]
    pub input: PathBuf,

    #[arg(short, long)]
    pub output: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub kind: KindArg,

    /// Window size.
    #[arg(long, default_value_t = 25)]
    pub window: usize,

    #[arg(long, value_parser = positive_f64, default_value_t = 10.0)]
    pub threshold: f64,

    #[arg(long, value_parser = probability, default_value_t = 0.05)]
    pub fpr: f64,

    #[arg(long, value_parser = clap::value_parser!(u64).range(1..), default_value_t = 300)]
    pub nsim: u64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long)]
    pub scale_mad: bool,

    #[command(flatten)]
    pub hyper: HyperArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LayoutArg {
    Single,
    Multiple,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CountArg {
    Rare,
    Many,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StructureArg {
    Sparse,
    Dense,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Data CSV to write.
    #[arg(short, long)]
    pub output: PathBuf,

    /// Truth file (JSON); defaults to the data path with `.truth.json`.
    #[arg(long)]
    pub truth: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub kind: KindArg,

    #[arg(long, value_enum, default_value = "single")]
    pub layout: LayoutArg,

    #[arg(short, long, default_value_t = 500)]
    pub n: usize,

    #[arg(short, long, default_value_t = 200)]
    pub p: usize,

    /// Mean shift or covariance magnitude.
    #[arg(long)]
    pub signal: f64,

    #[arg(long, value_enum, default_value = "rare")]
    pub count: CountArg,

    #[arg(long, value_enum, default_value = "sparse")]
    pub structure: StructureArg,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl SimulateArgs {
    pub fn scenario(&self) -> mxpbf::Scenario {
        mxpbf::Scenario {
            kind: self.kind.into(),
            layout: match self.layout {
                LayoutArg::Single => Layout::Single,
                LayoutArg::Multiple => Layout::Multiple,
            },
            n: self.n,
            p: self.p,
            signal: self.signal,
            signal_count: match self.count {
                CountArg::Rare => SignalCount::Rare,
                CountArg::Many => SignalCount::Many,
            },
            structure: match self.structure {
                StructureArg::Sparse => Structure::Sparse,
                StructureArg::Dense => Structure::Dense,
            },
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    /// Detection report(s) produced by a detect command.
    #[arg(short, long, required = true, num_args = 1..)]
    pub report: Vec<PathBuf>,

    /// Truth file written by `simulate`.
    #[arg(short, long)]
    pub truth: PathBuf,

    /// A truth point counts as found when a detection is strictly closer.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..), default_value_t = 15)]
    pub margin: u64,

    #[arg(short, long)]
    pub output: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "json")]
    pub format: FormatArg,
}
