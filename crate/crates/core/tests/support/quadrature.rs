// SPDX-License-Identifier: MIT OR Apache-2.0

//! Numerical-integration reference for the two log PBFs.
//!
//! Marginal likelihoods are integrated directly from the priors with a
//! trapezoid rule in log space: the outer variable is the log variance, the
//! inner one the mean (or slope). Both integrands are smooth and decay fast,
//! so the trapezoid rule converges far below the test tolerances.

#![allow(dead_code)]

use statrs::function::gamma::ln_gamma;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = terms.collect();
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// `log` of the trapezoid rule for `integral exp(f(u)) du` on `lo..=hi`.
fn log_trapezoid(lo: f64, hi: f64, steps: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (hi - lo) / steps as f64;
    let terms = (0..=steps).map(|k| {
        let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
        f(lo + k as f64 * h) + (w * h).ln()
    });
    log_sum_exp(terms)
}

fn log_normal_pdf(x: f64, mean: f64, var: f64) -> f64 {
    -0.5 * (LN_2PI + var.ln()) - (x - mean) * (x - mean) / (2.0 * var)
}

fn mean_of(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn centered_ss(x: &[f64]) -> f64 {
    let m = mean_of(x);
    x.iter().map(|v| (v - m) * (v - m)).sum()
}

const OUTER_BELOW: f64 = 10.0;
const OUTER_ABOVE: f64 = 45.0;
const OUTER_STEP: f64 = 0.02;
const INNER_HALF_WIDTH: f64 = 12.0;
const INNER_STEPS: usize = 160;

fn outer_steps() -> usize {
    ((OUTER_BELOW + OUTER_ABOVE) / OUTER_STEP).round() as usize
}

/// `log integral N(x | mu, v) N(mu | center, v / k) dmu` over `mu`.
fn log_mean_block(x: &[f64], v: f64, center: f64, prior_precision_count: f64) -> f64 {
    let sd = (v / x.len() as f64).sqrt();
    let prior_var = v / prior_precision_count;
    let m = mean_of(x);
    log_trapezoid(
        m - INNER_HALF_WIDTH * sd,
        m + INNER_HALF_WIDTH * sd,
        INNER_STEPS,
        |mu| x.iter().map(|&xi| log_normal_pdf(xi, mu, v)).sum::<f64>() + log_normal_pdf(mu, center, prior_var),
    )
}

/// Log ratio of marginal likelihoods (change over no change) for a mean
/// change between `left` and `right`, with `pi(v) = 1/v`, prior means at the
/// window sample means and prior variances `v / (k gamma)`.
pub fn log_pbf_mean(left: &[f64], right: &[f64], gamma: f64) -> f64 {
    let n_w = left.len() as f64;
    let joint: Vec<f64> = left.iter().chain(right).copied().collect();
    let t0 = (centered_ss(&joint) / joint.len() as f64).ln();
    let (lo, hi) = (t0 - OUTER_BELOW, t0 + OUTER_ABOVE);
    // dv / v = dt with t = log v
    let h0 = log_trapezoid(lo, hi, outer_steps(), |t| {
        let v = t.exp();
        log_mean_block(&joint, v, mean_of(&joint), 2.0 * n_w * gamma)
    });
    let h1 = log_trapezoid(lo, hi, outer_steps(), |t| {
        let v = t.exp();
        log_mean_block(left, v, mean_of(left), n_w * gamma) + log_mean_block(right, v, mean_of(right), n_w * gamma)
    });
    h1 - h0
}

fn log_inverse_gamma_pdf(tau: f64, shape: f64, rate: f64) -> f64 {
    shape * rate.ln() - ln_gamma(shape) - (shape + 1.0) * tau.ln() - rate / tau
}

/// Log marginal likelihood of `y` given `x` under `y = a x + e`,
/// `e ~ N(0, tau)`, `a | tau ~ N(a_hat, tau / (gamma |x|^2))`,
/// `tau ~ IG(shape, rate)`.
pub fn log_marginal_regression(y: &[f64], x: &[f64], gamma: f64, shape: f64, rate: f64) -> f64 {
    let xx: f64 = x.iter().map(|v| v * v).sum();
    let xy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let a_hat = xy / xx;
    let rss: f64 = y.iter().zip(x).map(|(yi, xi)| (yi - a_hat * xi).powi(2)).sum();
    let m = y.len() as f64;
    let t0 = ((rate + 0.5 * rss) / (0.5 * m + shape)).ln();
    log_trapezoid(t0 - OUTER_BELOW, t0 + OUTER_ABOVE, outer_steps(), |t| {
        let tau = t.exp();
        let sd = (tau / xx).sqrt();
        let inner = log_trapezoid(
            a_hat - INNER_HALF_WIDTH * sd,
            a_hat + INNER_HALF_WIDTH * sd,
            INNER_STEPS,
            |a| {
                y.iter()
                    .zip(x)
                    .map(|(&yi, &xi)| log_normal_pdf(yi, a * xi, tau))
                    .sum::<f64>()
                    + log_normal_pdf(a, a_hat, tau / (gamma * xx))
            },
        );
        // d tau = tau dt
        inner + log_inverse_gamma_pdf(tau, shape, rate) + t
    })
}

#[derive(Debug, Clone, Copy)]
pub struct CovPriors {
    pub gamma: f64,
    pub a0: f64,
    pub b0: f64,
    pub b01: f64,
    pub b02: f64,
}

/// Log ratio (change over no change) for the regression of `y` on `x`, the
/// first `n_w` rows forming the left half.
pub fn log_pbf_cov(y: &[f64], x: &[f64], n_w: usize, pr: CovPriors) -> f64 {
    let h0 = log_marginal_regression(y, x, pr.gamma, pr.a0, pr.b0);
    let h1 = log_marginal_regression(&y[..n_w], &x[..n_w], pr.gamma, pr.a0, pr.b01)
        + log_marginal_regression(&y[n_w..], &x[n_w..], pr.gamma, pr.a0, pr.b02);
    h1 - h0
}
