// SPDX-License-Identifier: MIT OR Apache-2.0

//! Margin-based precision/recall/F1 and Hausdorff distance between true and
//! detected change-point sets.
//!
//! Both sets are augmented with the trivial endpoints `1` and `n` before any
//! metric is computed, so the metrics are always defined.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Margin used when none is given.
pub const DEFAULT_MARGIN: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricConfig {
    /// A truth point is matched by a detection strictly closer than this.
    pub margin: usize,
    /// Series length, used for the trivial endpoint.
    pub n: usize,
}

impl MetricConfig {
    pub fn new(margin: usize, n: usize) -> Result<Self> {
        if margin < 1 {
            return Err(Error::InvalidParameter("margin must be >= 1".into()));
        }
        if n < 1 {
            return Err(Error::InvalidParameter("series length must be >= 1".into()));
        }
        Ok(Self { margin, n })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct F1Score {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Truth points with a detection strictly within the margin.
    pub true_positives: usize,
    /// Detections with a truth point strictly within the margin.
    pub matched_detections: usize,
}

/// Union with `{1, n}`, sorted and deduplicated.
pub fn augment_trivial(points: &[usize], n: usize) -> Vec<usize> {
    let mut out: Vec<usize> = points.iter().copied().chain([1, n]).collect();
    out.sort_unstable();
    out.dedup();
    out
}

pub fn f1_score(truth: &[usize], detected: &[usize], config: &MetricConfig) -> F1Score {
    let truth = augment_trivial(truth, config.n);
    let detected = augment_trivial(detected, config.n);
    let close = |a: usize, b: &[usize]| b.iter().any(|&x| x.abs_diff(a) < config.margin);
    let tp = truth.iter().filter(|&&t| close(t, &detected)).count();
    let matched = detected.iter().filter(|&&d| close(d, &truth)).count();
    let precision = matched as f64 / detected.len() as f64;
    let recall = tp as f64 / truth.len() as f64;
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    F1Score {
        precision,
        recall,
        f1,
        true_positives: tp,
        matched_detections: matched,
    }
}

fn directed(from: &[usize], to: &[usize]) -> usize {
    from.iter()
        .map(|&a| to.iter().map(|&b| a.abs_diff(b)).min().unwrap_or(0))
        .max()
        .unwrap_or(0)
}

/// Hausdorff distance between two non-augmented sets.
pub fn hausdorff_raw(a: &[usize], b: &[usize]) -> usize {
    directed(a, b).max(directed(b, a))
}

pub fn hausdorff(truth: &[usize], detected: &[usize], config: &MetricConfig) -> usize {
    hausdorff_raw(&augment_trivial(truth, config.n), &augment_trivial(detected, config.n))
}
