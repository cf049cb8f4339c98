// SPDX-License-Identifier: MIT OR Apache-2.0

//! Per-center scan profiles shared by the mean and covariance detectors.

use serde::{Deserialize, Serialize};

/// The maximum log PBF at one candidate center and the coordinate (column
/// or ordered column pair) that attained it.
///
/// `witness` is `None` only when every coordinate was degenerate at this
/// center; `log_mxpbf` is then negative infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint<W> {
    pub center: usize,
    pub log_mxpbf: f64,
    pub witness: Option<W>,
}

impl<W> ScanPoint<W> {
    pub fn all_degenerate(center: usize) -> Self {
        Self {
            center,
            log_mxpbf: f64::NEG_INFINITY,
            witness: None,
        }
    }

    pub fn is_all_degenerate(&self) -> bool {
        self.witness.is_none()
    }
}

/// Result of [`crate::mean_pbf::mxpbf_mean_at`]; the witness is a column.
pub type MeanScanResult = ScanPoint<usize>;

/// Result of [`crate::cov_pbf::mxpbf_cov_at`]; the witness is an ordered
/// `(response, predictor)` pair.
pub type CovScanResult = ScanPoint<(usize, usize)>;

/// Log mxPBF values over the whole scan domain `n_w + 1 ..= n - n_w + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanProfile<W> {
    pub n_w: usize,
    pub points: Vec<ScanPoint<W>>,
}

impl<W: Copy> ScanProfile<W> {
    pub fn first_center(&self) -> usize {
        self.points.first().map_or(self.n_w + 1, |p| p.center)
    }

    pub fn last_center(&self) -> usize {
        self.points.last().map_or(self.n_w, |p| p.center)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.log_mxpbf).collect()
    }

    /// Point at a 1-based center, if inside the domain.
    pub fn at(&self, center: usize) -> Option<&ScanPoint<W>> {
        center
            .checked_sub(self.first_center())
            .and_then(|idx| self.points.get(idx))
    }

    /// The global log mxPBF with its center; smallest center on ties.
    pub fn global_max(&self) -> Option<&ScanPoint<W>> {
        let mut best: Option<&ScanPoint<W>> = None;
        for p in &self.points {
            if best.is_none_or(|b| p.log_mxpbf > b.log_mxpbf) {
                best = Some(p);
            }
        }
        best
    }

    /// The same profile with every value moved by `delta` (used to change
    /// `alpha` without rescanning).
    pub fn shifted(&self, delta: f64) -> Self {
        Self {
            n_w: self.n_w,
            points: self
                .points
                .iter()
                .map(|p| ScanPoint {
                    log_mxpbf: p.log_mxpbf + delta,
                    ..*p
                })
                .collect(),
        }
    }
}

/// Splits the centers of a scan into fixed-size chunks; each chunk is
/// processed from freshly built statistics, so results do not depend on how
/// chunks are scheduled across workers.
pub(crate) fn center_chunks(first: usize, last: usize, chunk: usize) -> Vec<std::ops::RangeInclusive<usize>> {
    let chunk = chunk.max(1);
    (first..=last)
        .step_by(chunk)
        .map(|s| s..=(s + chunk - 1).min(last))
        .collect()
}
