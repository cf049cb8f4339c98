// SPDX-License-Identifier: MIT OR Apache-2.0

//! Scan-then-refine estimation of change points from a log mxPBF profile.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scan::ScanProfile;

/// Default threshold on the Bayes-factor scale.
pub const DEFAULT_THRESHOLD: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionConfig {
    /// `log(C_cp)`; evidence must strictly exceed it.
    pub log_threshold: f64,
    pub n_w: usize,
}

impl DetectionConfig {
    /// Threshold `log(10)`.
    pub fn new(n_w: usize) -> Self {
        Self {
            log_threshold: DEFAULT_THRESHOLD.ln(),
            n_w,
        }
    }

    /// Threshold given on the raw Bayes-factor scale.
    pub fn with_threshold(n_w: usize, threshold: f64) -> Result<Self> {
        if !(threshold > 0.0 && threshold.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "threshold must be a positive finite number, got {threshold}"
            )));
        }
        Ok(Self {
            log_threshold: threshold.ln(),
            n_w,
        })
    }

    pub fn with_log_threshold(n_w: usize, log_threshold: f64) -> Self {
        Self { log_threshold, n_w }
    }
}

/// Estimated change points for one window size, strictly increasing and at
/// least `window` apart. `evidence[k]` is the log mxPBF at `points[k]` and
/// `candidates[k]` the threshold crossing it was refined from.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ChangePointSet {
    pub window: usize,
    pub points: Vec<usize>,
    pub evidence: Vec<f64>,
    #[serde(default)]
    pub candidates: Vec<usize>,
}

impl ChangePointSet {
    pub fn empty(window: usize) -> Self {
        Self {
            window,
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Moves every location by `offset` rows (segment to global indexing).
    pub fn offset(&self, offset: usize) -> Self {
        Self {
            window: self.window,
            points: self.points.iter().map(|&p| p + offset).collect(),
            evidence: self.evidence.clone(),
            candidates: self.candidates.iter().map(|&p| p + offset).collect(),
        }
    }
}

/// Outcome of the global existence test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Existence {
    pub detected: bool,
    pub center: usize,
    pub log_max: f64,
}

#[inline]
fn value(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Whether the global maximum of a profile starting at `first_center`
/// exceeds the threshold.
pub fn test_existence(first_center: usize, profile: &[f64], log_threshold: f64) -> Result<Existence> {
    let (idx, max) = profile
        .iter()
        .map(|&v| value(v))
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (k, v)| match best {
            Some((_, b)) if v <= b => best,
            _ => Some((k, v)),
        })
        .ok_or(Error::EmptyProfile)?;
    Ok(Existence {
        detected: max > log_threshold,
        center: first_center + idx,
        log_max: max,
    })
}

/// Change points from a profile whose first entry is at `first_center`.
///
/// The first candidate is the earliest center whose value exceeds the
/// threshold; it is refined to the argmax over the next `n_w` centers
/// (clipped at the end of the profile, smallest center on ties). The search
/// then restarts `n_w` centers after the refined point.
pub fn detect_changepoints(first_center: usize, profile: &[f64], config: &DetectionConfig) -> ChangePointSet {
    let n_w = config.n_w;
    let mut out = ChangePointSet::empty(n_w);
    if profile.is_empty() {
        return out;
    }
    let last_center = first_center + profile.len() - 1;
    let at = |center: usize| value(profile[center - first_center]);

    let mut previous = 1usize;
    loop {
        let start = (previous + n_w).max(first_center);
        if start > last_center {
            break;
        }
        let Some(candidate) = (start..=last_center).find(|&l| at(l) > config.log_threshold) else {
            break;
        };
        let end = (candidate + n_w - 1).min(last_center);
        let mut refined = candidate;
        for l in candidate + 1..=end {
            if at(l) > at(refined) {
                refined = l;
            }
        }
        out.candidates.push(candidate);
        out.points.push(refined);
        out.evidence.push(at(refined));
        previous = refined;
    }
    out
}

/// [`detect_changepoints`] on a scan profile.
pub fn detect<W: Copy>(profile: &ScanProfile<W>, config: &DetectionConfig) -> ChangePointSet {
    detect_changepoints(profile.first_center(), &profile.values(), config)
}
