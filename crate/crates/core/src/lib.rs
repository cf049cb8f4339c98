// SPDX-License-Identifier: MIT OR Apache-2.0

//! Change-point detection in the mean and covariance of high-dimensional
//! series with maximum pairwise Bayes factors (mxPBF).
//!
//! The crate provides sliding-window scans ([`scan_mean`], [`scan_cov`]),
//! scan-then-refine localization ([`detect_changepoints`]), majority voting
//! over window ladders ([`aggregate_majority`]), Monte-Carlo calibration of
//! the prior exponent ([`calibrate_alpha`]), scenario generators
//! ([`simgen`]) and evaluation metrics ([`f1_score`], [`hausdorff`]).
//!
//! Rows are 1-based (centers and change points); columns are 0-based.

pub mod calibration;
pub mod cov_pbf;
pub mod error;
pub mod linalg;
pub mod mean_pbf;
pub mod metrics;
pub mod multiscale;
pub mod pipeline;
pub mod scan;
pub mod segmenter;
pub mod simgen;
pub mod special;
pub mod stats;

pub use calibration::{
    calibrate_alpha, fit_null_model, shift_alpha, Calibration, CalibrationConfig, FprPoint, NullModel, ScanKind,
};
pub use cov_pbf::{log_pbf_cov, mxpbf_cov_at, scan_cov, CovHyper, CovPbfParams, PairRates};
pub use error::{Error, Result};
pub use mean_pbf::{log_pbf_mean, mxpbf_mean_at, scan_mean, MeanPbfParams};
pub use metrics::{f1_score, hausdorff, F1Score, MetricConfig};
pub use multiscale::{aggregate_majority, MultiscaleResult, WindowLadder};
pub use pipeline::{
    detect_combined, detect_covariance_centered, detect_ladder, rolling_center, scale_mad, AlphaChoice, CombinedResult,
    DetectorConfig, LadderDetection, MergedPoint, RungProfile, RungResult, SegmentResult, Source,
};
pub use scan::{CovScanResult, MeanScanResult, ScanPoint, ScanProfile};
pub use segmenter::{detect_changepoints, test_existence, ChangePointSet, DetectionConfig, Existence};
pub use simgen::{GroundTruthDataset, Scenario};
pub use stats::{centered_rss, regression_rss, DataMatrix, WindowConfig, WindowMoments, WindowSpan};
