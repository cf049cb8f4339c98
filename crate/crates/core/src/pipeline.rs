// SPDX-License-Identifier: MIT OR Apache-2.0

//! Ladder-level detection and the combined covariance-then-mean procedure.
//!
//! [`detect_ladder`] runs one detector on every rung of a window ladder
//! (optionally calibrating `alpha` per rung) and aggregates by majority.
//! [`detect_combined`] first finds covariance changes on rolling-centered
//! data, then searches each resulting segment of the original data for mean
//! changes, and merges both with priority to covariance points.

use serde::{Deserialize, Serialize};

use crate::calibration::{calibrate_alpha, Calibration, CalibrationConfig, ScanKind};
use crate::cov_pbf::{scan_cov, CovHyper, CovPbfParams};
use crate::error::{Error, Result};
use crate::linalg::derive_seed;
use crate::mean_pbf::{scan_mean, MeanPbfParams};
use crate::multiscale::{aggregate_majority, MultiscaleResult, WindowLadder};
use crate::scan::ScanProfile;
use crate::segmenter::{detect, ChangePointSet, DetectionConfig, DEFAULT_THRESHOLD};
use crate::stats::{DataMatrix, WindowSpan};

/// Normal-consistency constant of the median absolute deviation.
pub const MAD_SCALE: f64 = 1.4826;

/// Subtracts from each entry the mean of its column over rows
/// `max(1, i - n_w/2) ..= min(i + n_w/2, n)`.
pub fn rolling_center(data: &DataMatrix, n_w: usize) -> Result<DataMatrix> {
    if n_w < 2 {
        return Err(Error::InvalidParameter(format!("window size must be >= 2, got {n_w}")));
    }
    let (n, p) = (data.n(), data.p());
    let half = n_w / 2;
    // prefix sums of each column about its overall mean
    let shift = crate::stats::column_means(data);
    let mut prefix = vec![0.0; (n + 1) * p];
    for i in 0..n {
        for j in 0..p {
            prefix[(i + 1) * p + j] = prefix[i * p + j] + (data.get(i, j) - shift[j]);
        }
    }
    data.map_indexed(|i, j, v| {
        let lo = i.saturating_sub(half);
        let hi = (i + half).min(n - 1);
        let mean = (prefix[(hi + 1) * p + j] - prefix[lo * p + j]) / (hi - lo + 1) as f64;
        v - shift[j] - mean
    })
}

/// Divides each column by `1.4826 * MAD` about its median. Columns with zero
/// MAD are left unchanged; their indices are returned.
pub fn scale_mad(data: &DataMatrix) -> Result<(DataMatrix, Vec<usize>)> {
    fn median(mut v: Vec<f64>) -> f64 {
        v.sort_by(f64::total_cmp);
        let m = v.len() / 2;
        if v.len() % 2 == 1 {
            v[m]
        } else {
            0.5 * (v[m - 1] + v[m])
        }
    }
    let mut scales = Vec::with_capacity(data.p());
    let mut unscaled = Vec::new();
    for j in 0..data.p() {
        let col = data.column(j);
        let med = median(col.clone());
        let mad = median(col.iter().map(|v| (v - med).abs()).collect());
        if mad > 0.0 {
            scales.push(MAD_SCALE * mad);
        } else {
            scales.push(1.0);
            unscaled.push(j);
        }
    }
    Ok((data.map_indexed(|_, j, v| v / scales[j])?, unscaled))
}

/// How `alpha` is chosen for each rung.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphaChoice {
    Fixed(f64),
    /// Calibrated per rung; the seed is mixed with the rung (and segment)
    /// so each calibration draws its own datasets.
    Calibrated(CalibrationConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// `log(C_cp)` used for detection (and for calibration when calibrating).
    pub log_threshold: f64,
    pub alpha: AlphaChoice,
    pub cov_hyper: CovHyper,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            log_threshold: DEFAULT_THRESHOLD.ln(),
            alpha: AlphaChoice::Calibrated(CalibrationConfig::default()),
            cov_hyper: CovHyper::default(),
        }
    }
}

impl DetectorConfig {
    pub fn fixed(alpha: f64) -> Self {
        Self {
            alpha: AlphaChoice::Fixed(alpha),
            ..Default::default()
        }
    }

    fn with_seed_tag(&self, tag: u64) -> Self {
        let mut out = self.clone();
        if let AlphaChoice::Calibrated(cal) = &mut out.alpha {
            cal.seed = derive_seed(cal.seed, &[tag]);
        }
        out
    }
}

/// Scan profile of one rung.
#[derive(Debug, Clone, PartialEq)]
pub enum RungProfile {
    Mean(ScanProfile<usize>),
    Covariance(ScanProfile<(usize, usize)>),
}

impl RungProfile {
    pub fn first_center(&self) -> usize {
        match self {
            Self::Mean(p) => p.first_center(),
            Self::Covariance(p) => p.first_center(),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            Self::Mean(p) => p.values(),
            Self::Covariance(p) => p.values(),
        }
    }

    /// `(center, log_mxpbf)` pairs.
    pub fn rows(&self) -> Vec<(usize, f64)> {
        let first = self.first_center();
        self.values()
            .into_iter()
            .enumerate()
            .map(|(k, v)| (first + k, v))
            .collect()
    }

    /// Witness at `center` as column indices (one for mean, two for
    /// covariance); empty if out of range or degenerate.
    pub fn witness(&self, center: usize) -> Vec<usize> {
        match self {
            Self::Mean(p) => p.at(center).and_then(|s| s.witness).map(|c| vec![c]),
            Self::Covariance(p) => p.at(center).and_then(|s| s.witness).map(|(i, j)| vec![i, j]),
        }
        .unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RungResult {
    pub n_w: usize,
    pub alpha: f64,
    pub calibration: Option<Calibration>,
    pub detections: ChangePointSet,
    pub profile: RungProfile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderDetection {
    pub kind: ScanKind,
    pub ladder: WindowLadder,
    pub rungs: Vec<RungResult>,
    pub result: MultiscaleResult,
    /// Rows added to every location; profiles keep local centers.
    pub row_offset: usize,
}

impl LadderDetection {
    /// Same detection with every location moved by `offset` rows.
    pub fn offset(&self, offset: usize) -> Self {
        let mut out = self.clone();
        out.row_offset += offset;
        for rung in &mut out.rungs {
            rung.detections = rung.detections.offset(offset);
        }
        out.result.points.iter_mut().for_each(|p| *p += offset);
        for g in &mut out.result.groups {
            g.location += offset;
            g.members.iter_mut().for_each(|m| m.location += offset);
        }
        out
    }
}

fn run_rung(data: &DataMatrix, n_w: usize, kind: ScanKind, config: &DetectorConfig) -> Result<RungResult> {
    let (alpha, calibration) = match &config.alpha {
        AlphaChoice::Fixed(a) => (*a, None),
        AlphaChoice::Calibrated(cal) => {
            let cal = CalibrationConfig {
                seed: derive_seed(cal.seed, &[n_w as u64]),
                log_threshold: config.log_threshold,
                cov_hyper: config.cov_hyper,
                ..cal.clone()
            };
            let c = calibrate_alpha(data, n_w, kind, &cal)?;
            (c.alpha, Some(c))
        }
    };
    let detection = DetectionConfig::with_log_threshold(n_w, config.log_threshold);
    let (detections, profile) = match kind {
        ScanKind::Mean => {
            let profile = scan_mean(data, &MeanPbfParams::new(alpha, n_w, data.p())?)?;
            (detect(&profile, &detection), RungProfile::Mean(profile))
        }
        ScanKind::Covariance => {
            let params = CovPbfParams::from_hyper(alpha, n_w, data.p(), &config.cov_hyper)?;
            let profile = scan_cov(data, &params)?;
            (detect(&profile, &detection), RungProfile::Covariance(profile))
        }
    };
    Ok(RungResult {
        n_w,
        alpha,
        calibration,
        detections,
        profile,
    })
}

/// Runs one detector on every rung and aggregates by majority. Every rung
/// must satisfy `2 n_w <= n`.
pub fn detect_ladder(
    data: &DataMatrix,
    ladder: &WindowLadder,
    kind: ScanKind,
    config: &DetectorConfig,
) -> Result<LadderDetection> {
    ladder.check_feasible(data.n())?;
    if kind == ScanKind::Covariance && data.p() < 2 {
        return Err(Error::NeedsTwoColumns(data.p()));
    }
    let rungs = ladder
        .sizes()
        .iter()
        .map(|&n_w| run_rung(data, n_w, kind, config))
        .collect::<Result<Vec<_>>>()?;
    let sets: Vec<ChangePointSet> = rungs.iter().map(|r| r.detections.clone()).collect();
    let result = aggregate_majority(&sets, ladder)?;
    Ok(LadderDetection {
        kind,
        ladder: ladder.clone(),
        rungs,
        result,
        row_offset: 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Mean,
    Covariance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergedPoint {
    pub location: usize,
    pub source: Source,
}

/// Mean-stage outcome on one segment `start..=end` of the original data.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentResult {
    pub start: usize,
    pub end: usize,
    /// In global row indices; `None` when no rung fits the segment.
    pub detection: Option<LadderDetection>,
}

impl SegmentResult {
    pub fn points(&self) -> &[usize] {
        self.detection.as_ref().map_or(&[], |d| &d.result.points)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CombinedResult {
    /// Covariance stage on the rolling-centered data (one centering per rung).
    pub covariance: LadderDetection,
    pub segments: Vec<SegmentResult>,
    /// Mean points closer than this to a covariance point are dropped.
    pub merge_radius: usize,
    pub merged: Vec<MergedPoint>,
}

impl CombinedResult {
    pub fn covariance_points(&self) -> &[usize] {
        &self.covariance.result.points
    }

    pub fn mean_points(&self) -> Vec<usize> {
        self.segments.iter().flat_map(|s| s.points().iter().copied()).collect()
    }

    pub fn merged_locations(&self) -> Vec<usize> {
        self.merged.iter().map(|m| m.location).collect()
    }
}

/// Covariance detection where each rung scans the data rolling-centered with
/// its own window size. Every rung must satisfy `2 n_w <= n`.
pub fn detect_covariance_centered(
    data: &DataMatrix,
    ladder: &WindowLadder,
    config: &DetectorConfig,
) -> Result<LadderDetection> {
    ladder.check_feasible(data.n())?;
    if data.p() < 2 {
        return Err(Error::NeedsTwoColumns(data.p()));
    }
    let config = config.with_seed_tag(0);
    let rungs = ladder
        .sizes()
        .iter()
        .map(|&n_w| {
            let centered = rolling_center(data, n_w)?;
            run_rung(&centered, n_w, ScanKind::Covariance, &config)
        })
        .collect::<Result<Vec<_>>>()?;
    let sets: Vec<ChangePointSet> = rungs.iter().map(|r| r.detections.clone()).collect();
    let result = aggregate_majority(&sets, ladder)?;
    Ok(LadderDetection {
        kind: ScanKind::Covariance,
        ladder: ladder.clone(),
        rungs,
        result,
        row_offset: 0,
    })
}

/// Covariance changes first, then mean changes within each segment between
/// covariance changes, merged with covariance priority.
pub fn detect_combined(data: &DataMatrix, ladder: &WindowLadder, config: &DetectorConfig) -> Result<CombinedResult> {
    let n = data.n();
    let cov_ladder = ladder.feasible_prefix(n).ok_or(Error::LadderInfeasible { n })?;
    if data.p() < 2 {
        return Err(Error::NeedsTwoColumns(data.p()));
    }
    let covariance = detect_covariance_centered(data, &cov_ladder, config)?;
    let cov_points = covariance.result.points.clone();

    let mut starts = vec![1];
    starts.extend(&cov_points);
    let segments = starts
        .iter()
        .enumerate()
        .map(|(k, &start)| {
            let end = starts.get(k + 1).map_or(n, |&next| next - 1);
            let len = end + 1 - start;
            let detection = match ladder.feasible_prefix(len) {
                Some(seg_ladder) => {
                    let seg = data.slice_rows(WindowSpan::new(start, end))?;
                    let seg_config = config.with_seed_tag(start as u64);
                    let local = detect_ladder(&seg, &seg_ladder, ScanKind::Mean, &seg_config)?;
                    Some(local.offset(start - 1))
                }
                None => None,
            };
            Ok(SegmentResult { start, end, detection })
        })
        .collect::<Result<Vec<_>>>()?;

    let merge_radius = cov_ladder.largest();
    let mut merged: Vec<MergedPoint> = cov_points
        .iter()
        .map(|&location| MergedPoint {
            location,
            source: Source::Covariance,
        })
        .collect();
    for seg in &segments {
        for &m in seg.points() {
            if cov_points.iter().all(|&c| m.abs_diff(c) >= merge_radius) {
                merged.push(MergedPoint {
                    location: m,
                    source: Source::Mean,
                });
            }
        }
    }
    merged.sort_by_key(|m| m.location);
    Ok(CombinedResult {
        covariance,
        segments,
        merge_radius,
        merged,
    })
}
