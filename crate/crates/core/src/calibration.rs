// SPDX-License-Identifier: MIT OR Apache-2.0

//! Choice of the prior exponent `alpha` by Monte-Carlo false-positive rate.
//!
//! A Gaussian null model is fitted to the data, `N` null datasets are drawn
//! from it and scanned once at a reference `alpha`. Because `alpha` only
//! moves every log PBF by the same additive term, each dataset's global
//! maximum is mapped to every grid value with [`shift_alpha`]. The smallest
//! grid value whose false-positive rate is at most the target is selected.

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cov_pbf::{scan_cov, CovHyper, CovPbfParams};
use crate::error::{Error, Result};
use crate::linalg::{cholesky_lower, repair_positive_definite, standard_normal, stream_rng, symmetrize};
use crate::mean_pbf::{scan_mean, MeanPbfParams};
use crate::segmenter::DEFAULT_THRESHOLD;
pub use crate::special::shift_alpha;
use crate::stats::{column_means, compensated_sum, DataMatrix, WindowConfig};

pub const DEFAULT_TARGET_FPR: f64 = 0.05;
pub const DEFAULT_N_SIM: usize = 300;
/// Diagonal margin of the null-covariance repair.
pub const NULL_REPAIR_MARGIN: f64 = 1e-3;
/// `alpha` at which simulated datasets are scanned.
pub const REFERENCE_ALPHA: f64 = 1.0;

/// Which detector is being calibrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanKind {
    Mean,
    Covariance,
}

/// Gaussian fit used to simulate data without change points.
#[derive(Debug, Clone, PartialEq)]
pub struct NullModel {
    pub mu_hat: Vec<f64>,
    /// Unbiased sample covariance after repair.
    pub sigma_hat: DMatrix<f64>,
    pub repair_shift: f64,
    factor: DMatrix<f64>,
}

impl NullModel {
    pub fn p(&self) -> usize {
        self.mu_hat.len()
    }

    /// `n` rows drawn from `N(mu_hat, sigma_hat)`, or from `N(0, sigma_hat)`
    /// when `centered`.
    pub fn simulate<R: Rng + ?Sized>(&self, n: usize, centered: bool, rng: &mut R) -> DataMatrix {
        let p = self.p();
        let mut values = Vec::with_capacity(n * p);
        for _ in 0..n {
            let x = &self.factor * standard_normal(p, rng);
            if centered {
                values.extend(x.iter());
            } else {
                values.extend(self.mu_hat.iter().zip(x.iter()).map(|(m, v)| m + v));
            }
        }
        DataMatrix::new(n, p, values).expect("simulated matrix has the requested shape")
    }
}

pub fn fit_null_model(data: &DataMatrix) -> Result<NullModel> {
    let (n, p) = (data.n(), data.p());
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "null model needs at least 2 rows, got {n}"
        )));
    }
    let mu_hat = column_means(data);
    let centered: Vec<Vec<f64>> = (0..p)
        .map(|j| data.column(j).iter().map(|v| v - mu_hat[j]).collect())
        .collect();
    let mut sigma = DMatrix::zeros(p, p);
    for i in 0..p {
        for j in i..p {
            let c = compensated_sum(centered[i].iter().zip(&centered[j]).map(|(a, b)| a * b)) / (n - 1) as f64;
            sigma[(i, j)] = c;
            sigma[(j, i)] = c;
        }
    }
    symmetrize(&mut sigma);
    let repair_shift = repair_positive_definite(&mut sigma, NULL_REPAIR_MARGIN);
    let factor = cholesky_lower(&sigma)?;
    Ok(NullModel {
        mu_hat,
        sigma_hat: sigma,
        repair_shift,
        factor,
    })
}

/// `0.01, 0.02, ..., 15.00`.
pub fn default_alpha_grid() -> Vec<f64> {
    (1..=1500).map(|k| k as f64 / 100.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    pub target_fpr: f64,
    pub n_sim: usize,
    /// `log(C_cp)`.
    pub log_threshold: f64,
    pub alpha_grid: Vec<f64>,
    pub seed: u64,
    /// Hyperparameters used for covariance scans.
    #[serde(default)]
    pub cov_hyper: CovHyper,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            target_fpr: DEFAULT_TARGET_FPR,
            n_sim: DEFAULT_N_SIM,
            log_threshold: DEFAULT_THRESHOLD.ln(),
            alpha_grid: default_alpha_grid(),
            seed: 0,
            cov_hyper: CovHyper::default(),
        }
    }
}

impl CalibrationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.target_fpr > 0.0 && self.target_fpr < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "target FPR must lie in (0, 1), got {}",
                self.target_fpr
            )));
        }
        if self.n_sim < 1 {
            return Err(Error::InvalidParameter("need at least one simulated dataset".into()));
        }
        if !self.log_threshold.is_finite() {
            return Err(Error::InvalidParameter("threshold must be finite".into()));
        }
        if self.alpha_grid.is_empty() {
            return Err(Error::InvalidParameter("alpha grid is empty".into()));
        }
        if !self.alpha_grid.iter().all(|&a| a > 0.0 && a.is_finite())
            || !self.alpha_grid.windows(2).all(|w| w[0] < w[1])
        {
            return Err(Error::InvalidParameter(
                "alpha grid must be positive and strictly increasing".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FprPoint {
    pub alpha: f64,
    pub fpr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub kind: ScanKind,
    pub n_w: usize,
    pub alpha: f64,
    pub fpr: f64,
    pub curve: Vec<FprPoint>,
    /// Global log mxPBF of each simulated dataset at [`REFERENCE_ALPHA`].
    pub null_maxima: Vec<f64>,
    pub repair_shift: f64,
}

/// Global log mxPBF of one dataset (negative infinity if every center is
/// degenerate).
pub fn global_log_mxpbf(
    data: &DataMatrix,
    n_w: usize,
    alpha: f64,
    kind: ScanKind,
    cov_hyper: &CovHyper,
) -> Result<f64> {
    let max = match kind {
        ScanKind::Mean => {
            let params = MeanPbfParams::new(alpha, n_w, data.p())?;
            scan_mean(data, &params)?.global_max().map(|p| p.log_mxpbf)
        }
        ScanKind::Covariance => {
            let params = CovPbfParams::from_hyper(alpha, n_w, data.p(), cov_hyper)?;
            scan_cov(data, &params)?.global_max().map(|p| p.log_mxpbf)
        }
    };
    Ok(max.unwrap_or(f64::NEG_INFINITY))
}

/// Global maxima of `config.n_sim` null datasets at [`REFERENCE_ALPHA`].
/// Dataset `s` uses stream `s` of `config.seed`.
pub fn simulate_null_maxima(
    model: &NullModel,
    n: usize,
    n_w: usize,
    kind: ScanKind,
    config: &CalibrationConfig,
) -> Result<Vec<f64>> {
    (0..config.n_sim)
        .into_par_iter()
        .map(|s| {
            let mut rng = stream_rng(config.seed, s as u64);
            let sim = model.simulate(n, kind == ScanKind::Covariance, &mut rng);
            global_log_mxpbf(&sim, n_w, REFERENCE_ALPHA, kind, &config.cov_hyper)
        })
        .collect()
}

/// Empirical false-positive rate of each grid value.
pub fn fpr_curve(maxima: &[f64], grid: &[f64], log_threshold: f64, n_w: usize, p: usize) -> Vec<FprPoint> {
    grid.iter()
        .map(|&alpha| {
            let hits = maxima
                .iter()
                .filter(|&&m| shift_alpha(m, REFERENCE_ALPHA, alpha, n_w, p) > log_threshold)
                .count();
            FprPoint {
                alpha,
                fpr: hits as f64 / maxima.len() as f64,
            }
        })
        .collect()
}

pub fn calibrate_alpha(
    data: &DataMatrix,
    n_w: usize,
    kind: ScanKind,
    config: &CalibrationConfig,
) -> Result<Calibration> {
    config.validate()?;
    WindowConfig::new(n_w, data.n())?;
    if kind == ScanKind::Covariance && data.p() < 2 {
        return Err(Error::NeedsTwoColumns(data.p()));
    }
    let model = fit_null_model(data)?;
    let maxima = simulate_null_maxima(&model, data.n(), n_w, kind, config)?;
    let curve = fpr_curve(&maxima, &config.alpha_grid, config.log_threshold, n_w, data.p());
    let chosen = curve
        .iter()
        .find(|pt| pt.fpr <= config.target_fpr)
        .copied()
        .ok_or_else(|| Error::NoFeasibleAlpha {
            target: config.target_fpr,
            achieved: curve.last().map_or(1.0, |pt| pt.fpr),
        })?;
    Ok(Calibration {
        kind,
        n_w,
        alpha: chosen.alpha,
        fpr: chosen.fpr,
        curve,
        null_maxima: maxima,
        repair_shift: model.repair_shift,
    })
}
