// SPDX-License-Identifier: MIT OR Apache-2.0

//! JSON report schema. Field names are stable; `timing` is the only field
//! that varies between identical runs.

use mxpbf::multiscale::Member;
use mxpbf::{CovHyper, LadderDetection, MergedPoint, ScanKind, Scenario};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub windows: Vec<usize>,
    /// `auto` or the fixed value.
    pub alpha: String,
    pub threshold: f64,
    pub log_threshold: f64,
    pub fpr: f64,
    pub nsim: u64,
    pub seed: u64,
    pub scale_mad: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hyper: Option<CovHyper>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rolling_center: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationEcho {
    pub fpr: f64,
    pub nsim: usize,
    pub repair_shift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionEcho {
    pub location: usize,
    pub evidence: f64,
    pub candidate: usize,
    /// Column (mean) or `[response, predictor]` (covariance), 0-based.
    pub witness: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RungReport {
    pub window: usize,
    /// Resolved prior exponent.
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<CalibrationEcho>,
    pub detections: Vec<DetectionEcho>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub location: usize,
    pub members: Vec<Member>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub kind: ScanKind,
    pub windows: Vec<usize>,
    pub points: Vec<usize>,
    pub groups: Vec<GroupReport>,
    pub rungs: Vec<RungReport>,
}

impl StageReport {
    pub fn from_detection(det: &LadderDetection) -> Self {
        let rungs = det
            .rungs
            .iter()
            .map(|r| RungReport {
                window: r.n_w,
                alpha: r.alpha,
                calibration: r.calibration.as_ref().map(|c| CalibrationEcho {
                    fpr: c.fpr,
                    nsim: c.null_maxima.len(),
                    repair_shift: c.repair_shift,
                }),
                detections: r
                    .detections
                    .points
                    .iter()
                    .zip(&r.detections.evidence)
                    .zip(&r.detections.candidates)
                    .map(|((&location, &evidence), &candidate)| DetectionEcho {
                        location,
                        evidence,
                        candidate,
                        witness: r.profile.witness(location - det.row_offset),
                    })
                    .collect(),
            })
            .collect();
        Self {
            kind: det.kind,
            windows: det.ladder.sizes().to_vec(),
            points: det.result.points.clone(),
            groups: det
                .result
                .groups
                .iter()
                .map(|g| GroupReport {
                    location: g.location,
                    members: g.members.clone(),
                })
                .collect(),
            rungs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentReport {
    pub start: usize,
    pub end: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<StageReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectReport {
    pub command: String,
    pub input: String,
    pub config: ConfigEcho,
    pub n: usize,
    pub p: usize,
    /// Final change points.
    pub points: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<StageReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covariance: Option<StageReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub segments: Vec<SegmentReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub merge_radius: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub merged: Vec<MergedPoint>,
    pub warnings: Vec<String>,
    pub timing: Timing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FprRow {
    pub alpha: f64,
    pub fpr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrateReport {
    pub command: String,
    pub input: String,
    pub kind: ScanKind,
    pub window: usize,
    pub threshold: f64,
    pub target_fpr: f64,
    pub nsim: u64,
    pub seed: u64,
    pub scale_mad: bool,
    pub n: usize,
    pub p: usize,
    pub alpha: f64,
    pub fpr: f64,
    pub repair_shift: f64,
    pub curve: Vec<FprRow>,
    pub warnings: Vec<String>,
    pub timing: Timing,
}

/// Written next to simulated data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthFile {
    pub scenario: Scenario,
    pub n: usize,
    pub p: usize,
    pub truth: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub scenario: String,
    pub method: String,
    pub f1: f64,
    pub hausdorff: usize,
    pub precision: f64,
    pub recall: f64,
    pub true_positives: usize,
    pub truth: Vec<usize>,
    pub detected: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluateReport {
    pub command: String,
    pub margin: usize,
    pub n: usize,
    pub rows: Vec<MetricRow>,
}

/// Lowercase serde name of a unit enum variant.
fn variant_name<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

pub fn scenario_label(s: &Scenario) -> String {
    format!(
        "{}-{}-{}-{}-n{}-p{}-signal{}-seed{}",
        variant_name(&s.kind),
        variant_name(&s.layout),
        variant_name(&s.signal_count),
        variant_name(&s.structure),
        s.n,
        s.p,
        s.signal,
        s.seed
    )
}

pub fn method_label(report: &DetectReport) -> String {
    let windows: Vec<String> = report.config.windows.iter().map(|w| w.to_string()).collect();
    format!(
        "{} windows={} alpha={}",
        report.command,
        windows.join(","),
        report.config.alpha
    )
}
