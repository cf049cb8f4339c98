// SPDX-License-Identifier: MIT OR Apache-2.0

//! Log-gamma and the prior shrinkage factor shared by both PBF families.

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7, n = 9).
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "ln_gamma needs a positive argument");
    if x < 0.5 {
        // reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x)
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (k, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + k as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// `gamma = max(n_w, p)^(-alpha)`.
pub fn gamma(alpha: f64, n_w: usize, p: usize) -> f64 {
    (-alpha * (n_w.max(p) as f64).ln()).exp()
}

/// `0.5 * log(gamma / (1 + gamma))`, the only place `alpha` enters either
/// log PBF.
pub fn log_shrinkage(alpha: f64, n_w: usize, p: usize) -> f64 {
    let log_gamma = -alpha * (n_w.max(p) as f64).ln();
    0.5 * (log_gamma - log_gamma.exp().ln_1p())
}

/// Moves a log Bayes factor computed at `alpha_from` to `alpha_to`.
pub fn shift_alpha(log_bf: f64, alpha_from: f64, alpha_to: f64, n_w: usize, p: usize) -> f64 {
    if alpha_from == alpha_to {
        return log_bf;
    }
    log_bf - log_shrinkage(alpha_from, n_w, p) + log_shrinkage(alpha_to, n_w, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_matches_reference() {
        for &x in &[0.01, 0.015, 0.1, 0.5, 1.0, 1.5, 2.51, 7.3, 15.01, 50.01, 170.5] {
            let want = statrs::function::gamma::ln_gamma(x);
            assert!(
                (ln_gamma(x) - want).abs() <= 1e-12 * want.abs().max(1.0),
                "x = {x}: {} vs {want}",
                ln_gamma(x)
            );
        }
        assert!(ln_gamma(1.0).abs() < 1e-14);
        assert!(ln_gamma(2.0).abs() < 1e-14);
        assert!((ln_gamma(0.5) - PI.sqrt().ln()).abs() < 1e-14);
    }

    #[test]
    fn gamma_definition() {
        assert_eq!(gamma(1.0, 2, 1), 0.5);
        assert!((gamma(2.0, 10, 100) - 1e-4).abs() < 1e-18);
        assert!((log_shrinkage(1.0, 2, 1) - 0.5 * (1.0f64 / 3.0).ln()).abs() < 1e-15);
    }

    #[test]
    fn shift_alpha_examples() {
        assert_eq!(shift_alpha(2.0, 1.3, 1.3, 25, 20), 2.0);
        let want = 2.0 + 0.5 * ((1e-4f64 / 1.0001).ln() - (1e-2f64 / 1.01).ln());
        let got = shift_alpha(2.0, 1.0, 2.0, 100, 3);
        assert!((got - want).abs() < 1e-12);
        assert!((got - -0.29766).abs() < 1e-5);
        let back = shift_alpha(shift_alpha(2.0, 1.0, 7.5, 100, 3), 7.5, 1.0, 100, 3);
        assert!((back - 2.0).abs() < 1e-12);
    }
}
