// SPDX-License-Identifier: MIT OR Apache-2.0

//! Closed-form log PBFs against direct numerical integration of the priors.

mod support;

use mxpbf::{log_pbf_cov, log_pbf_mean, CovPbfParams, DataMatrix, MeanPbfParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use support::quadrature::{self, CovPriors};

const TOL: f64 = 1e-6;
const SEEDS: u64 = 20;

fn normals(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

#[test]
fn mean_matches_integrated_marginals() {
    for n_w in 3..=5 {
        for seed in 0..SEEDS {
            let mut rng = ChaCha8Rng::seed_from_u64(seed * 31 + n_w as u64);
            let shift = rng.random::<f64>() * 3.0;
            let left = normals(&mut rng, n_w);
            let right: Vec<f64> = normals(&mut rng, n_w).into_iter().map(|v| v + shift).collect();
            let alpha = 0.2 + 3.0 * rng.random::<f64>();
            let params = MeanPbfParams::new(alpha, n_w, 1).unwrap();
            let closed = log_pbf_mean(&left, &right, &params).unwrap();
            let numeric = quadrature::log_pbf_mean(&left, &right, params.gamma());
            assert!(
                (closed - numeric).abs() < TOL,
                "n_w = {n_w}, seed = {seed}: closed {closed} vs numeric {numeric}"
            );
        }
    }
}

fn cov_case(n_w: usize, seed: u64) -> (Vec<f64>, Vec<f64>, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed * 17 + n_w as u64);
    let x = normals(&mut rng, 2 * n_w);
    let noise = normals(&mut rng, 2 * n_w);
    let (a1, a2) = (rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0);
    let (s1, s2) = (0.5 + rng.random::<f64>(), 0.5 + 2.0 * rng.random::<f64>());
    let y = (0..2 * n_w)
        .map(|k| {
            if k < n_w {
                a1 * x[k] + s1 * noise[k]
            } else {
                a2 * x[k] + s2 * noise[k]
            }
        })
        .collect();
    (y, x, 0.2 + 3.0 * rng.random::<f64>())
}

fn closed_cov(y: &[f64], x: &[f64], n_w: usize, params: &CovPbfParams) -> f64 {
    let data = DataMatrix::from_columns(&[y.to_vec(), x.to_vec()]).unwrap();
    log_pbf_cov(&data, n_w + 1, 0, 1, params).unwrap()
}

#[test]
fn covariance_matches_integrated_marginals() {
    for n_w in 3..=5 {
        for seed in 0..SEEDS {
            let (y, x, alpha) = cov_case(n_w, seed);
            let params = CovPbfParams::new(alpha, n_w, 2).unwrap();
            let closed = closed_cov(&y, &x, n_w, &params);
            let priors = CovPriors {
                gamma: params.gamma(),
                a0: params.a0,
                b0: params.b0,
                b01: params.b01,
                b02: params.b02,
            };
            let numeric = quadrature::log_pbf_cov(&y, &x, n_w, priors);
            assert!(
                (closed - numeric).abs() < TOL,
                "n_w = {n_w}, seed = {seed}: closed {closed} vs numeric {numeric}"
            );
        }
    }
}

#[test]
fn covariance_with_distinct_rates_matches() {
    let n_w = 4;
    for seed in 0..5 {
        let (y, x, alpha) = cov_case(n_w, 100 + seed);
        let params = CovPbfParams::new(alpha, n_w, 2)
            .unwrap()
            .with_hyper(0.5, 0.3, 0.02, 1.5)
            .unwrap();
        let closed = closed_cov(&y, &x, n_w, &params);
        let priors = CovPriors {
            gamma: params.gamma(),
            a0: 0.5,
            b0: 0.3,
            b01: 0.02,
            b02: 1.5,
        };
        let numeric = quadrature::log_pbf_cov(&y, &x, n_w, priors);
        assert!((closed - numeric).abs() < TOL, "seed {seed}: {closed} vs {numeric}");
    }
}

/// The joint-window rate must be `b0 + RSS / 2`; `b0 + RSS / 4` is far off.
#[test]
fn joint_rate_uses_half_the_rss() {
    let n_w = 4;
    let (y, x, alpha) = cov_case(n_w, 7);
    let params = CovPbfParams::new(alpha, n_w, 2).unwrap();
    let closed = closed_cov(&y, &x, n_w, &params);
    let xx: f64 = x.iter().map(|v| v * v).sum();
    let a = x.iter().zip(&y).map(|(p, q)| p * q).sum::<f64>() / xx;
    let rss: f64 = y.iter().zip(&x).map(|(q, p)| (q - a * p).powi(2)).sum();
    let full_exp = n_w as f64 + params.a0;
    let quarter = closed - full_exp * (params.b0 + rss / 2.0).ln() + full_exp * (params.b0 + rss / 4.0).ln();
    let numeric = quadrature::log_pbf_cov(
        &y,
        &x,
        n_w,
        CovPriors {
            gamma: params.gamma(),
            a0: params.a0,
            b0: params.b0,
            b01: params.b01,
            b02: params.b02,
        },
    );
    assert!((closed - numeric).abs() < TOL);
    assert!((quarter - numeric).abs() > 1.0);
}
