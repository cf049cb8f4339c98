// SPDX-License-Identifier: MIT OR Apache-2.0

//! Seeded synthetic scenarios with planted change points.
//!
//! Mean scenarios draw Gaussian rows with a sparse or dense precision matrix
//! and plant a mean shift on `n0` random coordinates. Covariance scenarios
//! draw zero-mean rows whose covariance gains a perturbation `U` after each
//! change. Layouts follow a reference length of 500: `single` changes at 250,
//! `multiple` at 150, 300 and 350, rescaled proportionally for other `n`.

use nalgebra::DMatrix;
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cholesky_lower, min_eigenvalue, repair_positive_definite, standard_normal, stream_rng};
use crate::stats::DataMatrix;

const REFERENCE_LENGTH: usize = 500;
const SINGLE_TRUTH: [usize; 1] = [250];
const MULTIPLE_TRUTH: [usize; 3] = [150, 300, 350];

const PRECISION_OFF_DIAGONAL: f64 = 0.3;
const PRECISION_MARGIN: f64 = 1e-3;
const SPARSE_FRACTION: f64 = 0.01;
const DENSE_FRACTION: f64 = 0.40;

const MODEL3_FRACTION: f64 = 0.05;
const MODEL3_VALUE: f64 = 0.5;
const MODEL3_MARGIN: f64 = 0.05;
const MODEL4_BASE: f64 = 0.4;
const SEGMENT_MARGIN: f64 = 0.05;
const RARE_COUNT: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChangeKind {
    Mean,
    Covariance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    Single,
    Multiple,
}

/// `Rare`: 5 mean coordinates or 5 covariance entries. `Many`: `p / 2` mean
/// coordinates or a rank-one covariance perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalCount {
    Rare,
    Many,
}

/// Precision structure for mean scenarios, covariance structure for
/// covariance scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Structure {
    Sparse,
    Dense,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub kind: ChangeKind,
    pub layout: Layout,
    pub n: usize,
    pub p: usize,
    /// Mean shift `mu` or covariance magnitude `psi`.
    pub signal: f64,
    pub signal_count: SignalCount,
    pub structure: Structure,
    pub seed: u64,
}

impl Scenario {
    /// True change locations for this layout and length.
    pub fn truth(&self) -> Vec<usize> {
        let base: &[usize] = match self.layout {
            Layout::Single => &SINGLE_TRUTH,
            Layout::Multiple => &MULTIPLE_TRUTH,
        };
        base.iter()
            .map(|&loc| (loc * self.n + REFERENCE_LENGTH / 2) / REFERENCE_LENGTH)
            .collect()
    }

    /// Number of signal-bearing mean coordinates.
    pub fn n0(&self) -> usize {
        match self.signal_count {
            SignalCount::Rare => RARE_COUNT,
            SignalCount::Many => self.p / 2,
        }
    }

    fn validate(&self, kind: ChangeKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::InfeasibleScenario(format!(
                "expected a {kind:?} scenario, got {:?}",
                self.kind
            )));
        }
        if self.p < 2 {
            return Err(Error::InfeasibleScenario(format!("p must be >= 2, got {}", self.p)));
        }
        if !(self.signal >= 0.0 && self.signal.is_finite()) {
            return Err(Error::InfeasibleScenario(format!(
                "signal must be finite and >= 0, got {}",
                self.signal
            )));
        }
        let truth = self.truth();
        let ok = truth.first().is_some_and(|&t| t >= 2)
            && truth.windows(2).all(|w| w[0] < w[1])
            && truth.last().is_some_and(|&t| t <= self.n);
        if !ok {
            return Err(Error::InfeasibleScenario(format!(
                "n = {} is too short for the {:?} layout",
                self.n, self.layout
            )));
        }
        Ok(())
    }

    /// 1-based inclusive row ranges of the segments, and whether each one
    /// carries the signal.
    fn segments(&self) -> Vec<(usize, usize, bool)> {
        let truth = self.truth();
        let mut starts = vec![1];
        starts.extend(&truth);
        starts
            .iter()
            .enumerate()
            .map(|(k, &s)| {
                let end = starts.get(k + 1).map_or(self.n, |&next| next - 1);
                (s, end, k % 2 == 1)
            })
            .collect()
    }
}

/// A simulated dataset with its planted change points and generator echo.
#[derive(Debug, Clone)]
pub struct GroundTruthDataset {
    pub data: DataMatrix,
    pub truth: Vec<usize>,
    pub scenario: Scenario,
    /// Mean vector of each segment (mean scenarios only).
    pub segment_means: Vec<Vec<f64>>,
    /// Covariance of each segment after repair (covariance scenarios only).
    pub segment_covariances: Vec<DMatrix<f64>>,
    /// Diagonal shift added by positive-definite repair.
    pub repair_shift: f64,
}

/// Maps `k` in `0..p(p-1)/2` to the `k`-th pair `(i, j)`, `i < j`, in row order.
fn pair_from_index(mut k: usize, p: usize) -> (usize, usize) {
    for i in 0..p {
        let row = p - 1 - i;
        if k < row {
            return (i, i + 1 + k);
        }
        k -= row;
    }
    unreachable!("pair index out of range")
}

fn random_pairs<R: Rng + ?Sized>(p: usize, fraction: f64, rng: &mut R) -> Vec<(usize, usize)> {
    let total = p * (p - 1) / 2;
    let count = ((fraction * total as f64).round() as usize).min(total);
    index::sample(rng, total, count)
        .into_iter()
        .map(|k| pair_from_index(k, p))
        .collect()
}

fn precision<R: Rng + ?Sized>(p: usize, fraction: f64, rng: &mut R) -> DMatrix<f64> {
    let mut omega = DMatrix::identity(p, p);
    for (i, j) in random_pairs(p, fraction, rng) {
        omega[(i, j)] = PRECISION_OFF_DIAGONAL;
        omega[(j, i)] = PRECISION_OFF_DIAGONAL;
    }
    repair_positive_definite(&mut omega, PRECISION_MARGIN);
    omega
}

/// Unit-diagonal precision with 1% of off-diagonal pairs set to 0.3,
/// repaired to be positive definite.
pub fn gen_sparse_precision<R: Rng + ?Sized>(p: usize, rng: &mut R) -> DMatrix<f64> {
    precision(p, SPARSE_FRACTION, rng)
}

/// As [`gen_sparse_precision`] with 40% of pairs.
pub fn gen_dense_precision<R: Rng + ?Sized>(p: usize, rng: &mut R) -> DMatrix<f64> {
    precision(p, DENSE_FRACTION, rng)
}

/// Sparse covariance `D^(1/2) Delta D^(1/2)`: 5% of strictly-lower pairs of
/// `Delta_1` are 0.5, `Delta = Delta_1 + (|lambda_min| + 0.05) I` and
/// `d_j ~ U(0.5, 2.5)`.
pub fn gen_cov_sparse_sigma<R: Rng + ?Sized>(p: usize, rng: &mut R) -> DMatrix<f64> {
    let mut delta = DMatrix::zeros(p, p);
    for (i, j) in random_pairs(p, MODEL3_FRACTION, rng) {
        delta[(i, j)] = MODEL3_VALUE;
        delta[(j, i)] = MODEL3_VALUE;
    }
    let shift = min_eigenvalue(&delta).abs() + MODEL3_MARGIN;
    for k in 0..p {
        delta[(k, k)] += shift;
    }
    let root: Vec<f64> = (0..p).map(|_| (0.5 + 2.0 * rng.random::<f64>()).sqrt()).collect();
    DMatrix::from_fn(p, p, |i, j| root[i] * delta[(i, j)] * root[j])
}

/// Dense covariance `O Delta O` with
/// `delta_ij = (-1)^(i+j) 0.4^(|i-j|^0.1)` and `o_j ~ U(1, 5)`.
pub fn gen_cov_dense_sigma<R: Rng + ?Sized>(p: usize, rng: &mut R) -> Result<DMatrix<f64>> {
    let o: Vec<f64> = (0..p).map(|_| 1.0 + 4.0 * rng.random::<f64>()).collect();
    let sigma = DMatrix::from_fn(p, p, |i, j| {
        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
        let lag = i.abs_diff(j) as f64;
        (o[i] * o[j]) * sign * MODEL4_BASE.powf(lag.powf(0.1))
    });
    cholesky_lower(&sigma)?;
    Ok(sigma)
}

/// Covariance perturbation `U`. `Rare`: 5 random strictly-lower entries from
/// `U(0, psi)`, mirrored. `Many`: `u u^T` with `u_j ~ U(0, psi)`.
pub fn gen_cov_signal<R: Rng + ?Sized>(p: usize, count: SignalCount, psi: f64, rng: &mut R) -> DMatrix<f64> {
    let mut u = DMatrix::zeros(p, p);
    match count {
        SignalCount::Rare => {
            let total = p * (p - 1) / 2;
            for k in index::sample(rng, total, RARE_COUNT.min(total)) {
                let (i, j) = pair_from_index(k, p);
                let v = psi * rng.random::<f64>();
                u[(i, j)] = v;
                u[(j, i)] = v;
            }
        }
        SignalCount::Many => {
            let v: Vec<f64> = (0..p).map(|_| psi * rng.random::<f64>()).collect();
            u = DMatrix::from_fn(p, p, |i, j| v[i] * v[j]);
        }
    }
    u
}

/// One draw `mean + L z` with `z` standard normal.
pub fn mvn_sample<R: Rng + ?Sized>(mean: &[f64], chol_factor: &DMatrix<f64>, rng: &mut R) -> Vec<f64> {
    let z = standard_normal(mean.len(), rng);
    let lz = chol_factor * z;
    mean.iter().zip(lz.iter()).map(|(m, v)| m + v).collect()
}

pub fn gen_mean_scenario(scenario: &Scenario) -> Result<GroundTruthDataset> {
    scenario.validate(ChangeKind::Mean)?;
    let (n, p) = (scenario.n, scenario.p);
    let n0 = scenario.n0();
    if n0 > p {
        return Err(Error::InfeasibleScenario(format!("n0 = {n0} exceeds p = {p}")));
    }
    let mut rng = stream_rng(scenario.seed, 0);
    let omega = match scenario.structure {
        Structure::Sparse => gen_sparse_precision(p, &mut rng),
        Structure::Dense => gen_dense_precision(p, &mut rng),
    };
    let factor = cholesky_lower(&omega)?;
    let segments = scenario.segments();
    let segment_means: Vec<Vec<f64>> = segments
        .iter()
        .map(|&(_, _, signal)| {
            let mut mu = vec![0.0; p];
            if signal {
                for j in index::sample(&mut rng, p, n0) {
                    mu[j] = scenario.signal;
                }
            }
            mu
        })
        .collect();

    let mut values = Vec::with_capacity(n * p);
    for (&(start, end, _), mu) in segments.iter().zip(&segment_means) {
        for _ in start..=end {
            // x = mu + L^{-T} z, so that Cov(x) = Omega^{-1}
            let mut z = standard_normal(p, &mut rng);
            factor.tr_solve_lower_triangular_mut(&mut z);
            values.extend(mu.iter().zip(z.iter()).map(|(m, v)| m + v));
        }
    }
    Ok(GroundTruthDataset {
        data: DataMatrix::new(n, p, values)?,
        truth: scenario.truth(),
        scenario: scenario.clone(),
        segment_means,
        segment_covariances: Vec::new(),
        repair_shift: 0.0,
    })
}

pub fn gen_cov_scenario(scenario: &Scenario) -> Result<GroundTruthDataset> {
    scenario.validate(ChangeKind::Covariance)?;
    let (n, p) = (scenario.n, scenario.p);
    let mut rng = stream_rng(scenario.seed, 0);
    let sigma = match scenario.structure {
        Structure::Sparse => gen_cov_sparse_sigma(p, &mut rng),
        Structure::Dense => gen_cov_dense_sigma(p, &mut rng)?,
    };
    let segments = scenario.segments();
    let mut covariances: Vec<DMatrix<f64>> = segments
        .iter()
        .map(|&(_, _, signal)| {
            if signal {
                &sigma + gen_cov_signal(p, scenario.signal_count, scenario.signal, &mut rng)
            } else {
                sigma.clone()
            }
        })
        .collect();

    // One shift for all segments, so unperturbed segments stay identical.
    let lowest = covariances.iter().map(min_eigenvalue).fold(f64::INFINITY, f64::min);
    let needs_repair = covariances.iter().any(|c| !crate::linalg::is_positive_definite(c));
    let repair_shift = if needs_repair { -lowest + SEGMENT_MARGIN } else { 0.0 };
    if repair_shift != 0.0 {
        for c in &mut covariances {
            for k in 0..p {
                c[(k, k)] += repair_shift;
            }
        }
    }
    let factors = covariances.iter().map(cholesky_lower).collect::<Result<Vec<_>>>()?;

    let zero = vec![0.0; p];
    let mut values = Vec::with_capacity(n * p);
    for (&(start, end, _), factor) in segments.iter().zip(&factors) {
        for _ in start..=end {
            values.extend(mvn_sample(&zero, factor, &mut rng));
        }
    }
    Ok(GroundTruthDataset {
        data: DataMatrix::new(n, p, values)?,
        truth: scenario.truth(),
        scenario: scenario.clone(),
        segment_means: Vec::new(),
        segment_covariances: covariances,
        repair_shift,
    })
}

/// Dispatches on the scenario kind.
pub fn generate(scenario: &Scenario) -> Result<GroundTruthDataset> {
    match scenario.kind {
        ChangeKind::Mean => gen_mean_scenario(scenario),
        ChangeKind::Covariance => gen_cov_scenario(scenario),
    }
}
