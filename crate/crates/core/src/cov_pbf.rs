// SPDX-License-Identifier: MIT OR Apache-2.0

//! Pairwise Bayes factors for a change in covariance at a candidate center.
//!
//! For an ordered pair `(i, j)` the response column `i` is regressed on the
//! predictor column `j` without intercept, in each half-window and in the
//! joint window. Normal priors on the slope (centered at the least-squares
//! estimate) and inverse-gamma priors on the conditional variance give
//!
//! ```text
//! log B = 0.5 log(gamma / (1 + gamma))
//!       + 2 lnG(n_w/2 + a0) - lnG(n_w + a0) - lnG(a0) + a0 log(b01 b02 / b0)
//!       - (n_w/2 + a0) log(b01 + RSS_L / 2)
//!       - (n_w/2 + a0) log(b02 + RSS_R / 2)
//!       + (n_w + a0)   log(b0  + RSS_joint / 2)
//! ```
//!
//! The data are assumed to have zero mean.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scan::{center_chunks, CovScanResult, ScanPoint, ScanProfile};
use crate::special::{gamma, ln_gamma, log_shrinkage};
use crate::stats::{
    regression_from_sums, regression_rss, DataMatrix, WindowConfig, WindowMoments, DEFAULT_REBUILD_EVERY,
};

/// Default inverse-gamma shape and rates.
pub const DEFAULT_HYPER: f64 = 0.01;

/// Inverse-gamma rates for one ordered pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairRates {
    pub response: usize,
    pub predictor: usize,
    pub b0: f64,
    pub b01: f64,
    pub b02: f64,
}

/// Inverse-gamma shape and default rates, shared by every pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovHyper {
    pub a0: f64,
    pub b0: f64,
    pub b01: f64,
    pub b02: f64,
}

impl Default for CovHyper {
    fn default() -> Self {
        Self {
            a0: DEFAULT_HYPER,
            b0: DEFAULT_HYPER,
            b01: DEFAULT_HYPER,
            b02: DEFAULT_HYPER,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovPbfParams {
    pub alpha: f64,
    pub a0: f64,
    /// Rate under no change.
    pub b0: f64,
    /// Rate of the left half-window under a change.
    pub b01: f64,
    /// Rate of the right half-window under a change.
    pub b02: f64,
    pub n_w: usize,
    pub p: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub overrides: Vec<PairRates>,
}

impl CovPbfParams {
    /// Parameters with `a0 = b0 = b01 = b02 = 0.01`.
    pub fn new(alpha: f64, n_w: usize, p: usize) -> Result<Self> {
        Self {
            alpha,
            a0: DEFAULT_HYPER,
            b0: DEFAULT_HYPER,
            b01: DEFAULT_HYPER,
            b02: DEFAULT_HYPER,
            n_w,
            p,
            overrides: Vec::new(),
        }
        .validated()
    }

    pub fn with_hyper(mut self, a0: f64, b0: f64, b01: f64, b02: f64) -> Result<Self> {
        self.a0 = a0;
        self.b0 = b0;
        self.b01 = b01;
        self.b02 = b02;
        self.validated()
    }

    pub fn from_hyper(alpha: f64, n_w: usize, p: usize, hyper: &CovHyper) -> Result<Self> {
        Self::new(alpha, n_w, p)?.with_hyper(hyper.a0, hyper.b0, hyper.b01, hyper.b02)
    }

    pub fn with_override(mut self, rates: PairRates) -> Result<Self> {
        self.overrides
            .retain(|r| (r.response, r.predictor) != (rates.response, rates.predictor));
        self.overrides.push(rates);
        self.validated()
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self { alpha, ..self.clone() }.validated()
    }

    pub fn gamma(&self) -> f64 {
        gamma(self.alpha, self.n_w, self.p)
    }

    fn validated(self) -> Result<Self> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be > 0, got {v}")))
            }
        };
        positive("alpha", self.alpha)?;
        positive("a0", self.a0)?;
        positive("b0", self.b0)?;
        positive("b01", self.b01)?;
        positive("b02", self.b02)?;
        for r in &self.overrides {
            positive("b0 override", r.b0)?;
            positive("b01 override", r.b01)?;
            positive("b02 override", r.b02)?;
            if r.response == r.predictor {
                return Err(Error::SameColumn(r.response));
            }
        }
        if self.n_w < 2 {
            return Err(Error::InvalidParameter(format!(
                "window size must be >= 2, got {}",
                self.n_w
            )));
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, Copy)]
struct Rates {
    b0: f64,
    b01: f64,
    b02: f64,
    /// Everything that does not depend on the data.
    constant: f64,
}

/// Data-independent parts of the log PBF, computed once per scan.
#[derive(Debug, Clone)]
pub(crate) struct CovKernel {
    half_exp: f64,
    full_exp: f64,
    default: Rates,
    overrides: HashMap<(usize, usize), Rates>,
}

impl CovKernel {
    pub(crate) fn new(params: &CovPbfParams) -> Self {
        let n_w = params.n_w as f64;
        let a0 = params.a0;
        let gamma_block = 2.0 * ln_gamma(n_w / 2.0 + a0) - ln_gamma(n_w + a0) - ln_gamma(a0);
        let shared = log_shrinkage(params.alpha, params.n_w, params.p) + gamma_block;
        let rates = |b0: f64, b01: f64, b02: f64| Rates {
            b0,
            b01,
            b02,
            constant: shared + a0 * (b01.ln() + b02.ln() - b0.ln()),
        };
        Self {
            half_exp: n_w / 2.0 + a0,
            full_exp: n_w + a0,
            default: rates(params.b0, params.b01, params.b02),
            overrides: params
                .overrides
                .iter()
                .map(|r| ((r.response, r.predictor), rates(r.b0, r.b01, r.b02)))
                .collect(),
        }
    }

    #[inline]
    fn rates(&self, i: usize, j: usize) -> &Rates {
        if self.overrides.is_empty() {
            &self.default
        } else {
            self.overrides.get(&(i, j)).unwrap_or(&self.default)
        }
    }

    #[inline]
    pub(crate) fn log_pbf(&self, i: usize, j: usize, rss_left: f64, rss_right: f64, rss_joint: f64) -> f64 {
        let r = self.rates(i, j);
        r.constant - self.half_exp * (r.b01 + 0.5 * rss_left).ln() - self.half_exp * (r.b02 + 0.5 * rss_right).ln()
            + self.full_exp * (r.b0 + 0.5 * rss_joint).ln()
    }
}

fn check_params(data: &DataMatrix, params: &CovPbfParams) -> Result<WindowConfig> {
    if data.p() < 2 {
        return Err(Error::NeedsTwoColumns(data.p()));
    }
    if params.p != data.p() {
        return Err(Error::InvalidParameter(format!(
            "parameters were built for p = {}, data has p = {}",
            params.p,
            data.p()
        )));
    }
    WindowConfig::new(params.n_w, data.n())
}

fn pair_log_pbf(
    data: &DataMatrix,
    window: &WindowConfig,
    kernel: &CovKernel,
    center: usize,
    i: usize,
    j: usize,
) -> Result<f64> {
    let left = regression_rss(data, window.left_span(center), i, j)?;
    let right = regression_rss(data, window.right_span(center), i, j)?;
    let joint_span = crate::stats::WindowSpan::new(center - window.n_w, center + window.n_w - 1);
    let joint = regression_rss(data, joint_span, i, j)?;
    Ok(kernel.log_pbf(i, j, left, right, joint))
}

/// Log PBF for a change in the regression of column `i` on column `j` at
/// `center`, computed directly from the data.
pub fn log_pbf_cov(data: &DataMatrix, center: usize, i: usize, j: usize, params: &CovPbfParams) -> Result<f64> {
    let window = check_params(data, params)?;
    window.check_center(center)?;
    if i == j {
        return Err(Error::SameColumn(i));
    }
    pair_log_pbf(data, &window, &CovKernel::new(params), center, i, j)
}

/// Max over all ordered pairs `i != j` of the log PBF at `center`, computed
/// directly from the data; lexicographically smallest pair on ties.
pub fn mxpbf_cov_at(data: &DataMatrix, center: usize, params: &CovPbfParams) -> Result<CovScanResult> {
    let window = check_params(data, params)?;
    window.check_center(center)?;
    let kernel = CovKernel::new(params);
    let mut best = ScanPoint::all_degenerate(center);
    for i in 0..data.p() {
        for j in (0..data.p()).filter(|&j| j != i) {
            let v = pair_log_pbf(data, &window, &kernel, center, i, j)?;
            if best.witness.is_none() || v > best.log_mxpbf {
                best = ScanPoint {
                    center,
                    log_mxpbf: v,
                    witness: Some((i, j)),
                };
            }
        }
    }
    Ok(best)
}

/// Log mxPBF profile over every center using sliding cross-product
/// statistics, rebuilt from scratch every [`DEFAULT_REBUILD_EVERY`] centers.
pub fn scan_cov(data: &DataMatrix, params: &CovPbfParams) -> Result<ScanProfile<(usize, usize)>> {
    scan_cov_with(data, params, DEFAULT_REBUILD_EVERY)
}

/// [`scan_cov`] with an explicit rebuild period (centers per chunk).
pub fn scan_cov_with(
    data: &DataMatrix,
    params: &CovPbfParams,
    rebuild_every: usize,
) -> Result<ScanProfile<(usize, usize)>> {
    let window = check_params(data, params)?;
    let kernel = CovKernel::new(params);
    let p = data.p();

    let chunks = center_chunks(window.first_center(), window.last_center(), rebuild_every);
    let points = chunks
        .into_par_iter()
        .map(|centers| -> Result<Vec<CovScanResult>> {
            let first = *centers.start();
            let mut left = WindowMoments::with_cross(data, window.left_span(first))?.rebuild_every(0);
            let mut right = WindowMoments::with_cross(data, window.right_span(first))?.rebuild_every(0);
            let mut out = Vec::with_capacity(centers.clone().count());
            for center in centers {
                if center > first {
                    left.shift_right(data);
                    right.shift_right(data);
                }
                let mut best = ScanPoint::all_degenerate(center);
                for i in 0..p {
                    let (yl, yr) = (left.sum_sq(i), right.sum_sq(i));
                    for j in (0..p).filter(|&j| j != i) {
                        let (xl, xr) = (left.sum_sq(j), right.sum_sq(j));
                        let (cl, cr) = (left.cross(i, j), right.cross(i, j));
                        let v = kernel.log_pbf(
                            i,
                            j,
                            regression_from_sums(yl, xl, cl),
                            regression_from_sums(yr, xr, cr),
                            regression_from_sums(yl + yr, xl + xr, cl + cr),
                        );
                        if best.witness.is_none() || v > best.log_mxpbf {
                            best = ScanPoint {
                                center,
                                log_mxpbf: v,
                                witness: Some((i, j)),
                            };
                        }
                    }
                }
                out.push(best);
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanProfile {
        n_w: params.n_w,
        points: points.into_iter().flatten().collect(),
    })
}
