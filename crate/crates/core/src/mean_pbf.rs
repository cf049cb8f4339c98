// SPDX-License-Identifier: MIT OR Apache-2.0

//! Pairwise Bayes factors for a change in mean at a candidate center.
//!
//! For column `j` and center `l`, with `S_L`, `S_R` the centered residual
//! sums of squares of the two half-windows and `S_comb` that of the joint
//! window,
//!
//! ```text
//! log B = 0.5 log(gamma / (1 + gamma)) + n_w log(S_comb / (S_L + S_R))
//! ```
//!
//! The per-center statistic is the maximum over columns.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scan::{center_chunks, MeanScanResult, ScanPoint, ScanProfile};
use crate::special::{gamma, log_shrinkage};
use crate::stats::{
    centered_from_sums, centered_rss_of, column_means, compensated_sum, DataMatrix, WindowConfig, WindowMoments,
    DEFAULT_REBUILD_EVERY,
};

/// Relative size below which the pooled within-window energy counts as zero.
pub const DEGENERACY_RATIO: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanPbfParams {
    pub alpha: f64,
    pub n_w: usize,
    pub p: usize,
}

impl MeanPbfParams {
    pub fn new(alpha: f64, n_w: usize, p: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
        }
        if n_w < 2 {
            return Err(Error::InvalidParameter(format!("window size must be >= 2, got {n_w}")));
        }
        if p < 1 {
            return Err(Error::InvalidParameter("p must be >= 1".into()));
        }
        Ok(Self { alpha, n_w, p })
    }

    pub fn gamma(&self) -> f64 {
        gamma(self.alpha, self.n_w, self.p)
    }

    pub fn log_shrinkage(&self) -> f64 {
        log_shrinkage(self.alpha, self.n_w, self.p)
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(alpha, self.n_w, self.p)
    }
}

/// Log PBF from the three quadratic forms. `raw_energy` is the sum of
/// squared raw values over the joint window; `None` flags a degenerate
/// (near-constant) window pair.
#[inline]
fn evidence(s_comb: f64, s_pooled: f64, raw_energy: f64, n_w: usize, shrink: f64) -> Option<f64> {
    let mean_square = raw_energy / (2 * n_w) as f64;
    if s_pooled <= DEGENERACY_RATIO * mean_square || s_pooled <= 0.0 {
        return None;
    }
    Some(shrink + n_w as f64 * (s_comb / s_pooled).ln())
}

/// Log PBF for a mean change between two equally sized windows of one column.
pub fn log_pbf_mean(left: &[f64], right: &[f64], params: &MeanPbfParams) -> Result<f64> {
    let n_w = params.n_w;
    if left.len() != n_w || right.len() != n_w {
        return Err(Error::WindowMismatch {
            left: left.len(),
            right: right.len(),
        });
    }
    if let Some(bad) = left.iter().chain(right).position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { row: bad + 1, col: 0 });
    }
    let joint: Vec<f64> = left.iter().chain(right).copied().collect();
    let s_pooled = centered_rss_of(left) + centered_rss_of(right);
    let s_comb = centered_rss_of(&joint);
    let energy = compensated_sum(joint.iter().map(|v| v * v));
    evidence(s_comb, s_pooled, energy, n_w, params.log_shrinkage()).ok_or(Error::DegenerateVariance)
}

fn check_params(data: &DataMatrix, params: &MeanPbfParams) -> Result<WindowConfig> {
    if params.p != data.p() {
        return Err(Error::InvalidParameter(format!(
            "parameters were built for p = {}, data has p = {}",
            params.p,
            data.p()
        )));
    }
    WindowConfig::new(params.n_w, data.n())
}

/// Max over columns of the log PBF at `center`, computed directly from the
/// data. Degenerate columns are skipped; ties go to the smallest column.
pub fn mxpbf_mean_at(data: &DataMatrix, center: usize, params: &MeanPbfParams) -> Result<MeanScanResult> {
    let window = check_params(data, params)?;
    window.check_center(center)?;
    let (ls, rs) = (window.left_span(center), window.right_span(center));
    let mut best = ScanPoint::all_degenerate(center);
    for j in 0..data.p() {
        let left: Vec<f64> = data.column_in(ls, j).collect();
        let right: Vec<f64> = data.column_in(rs, j).collect();
        match log_pbf_mean(&left, &right, params) {
            Ok(v) if best.witness.is_none() || v > best.log_mxpbf => {
                best = ScanPoint {
                    center,
                    log_mxpbf: v,
                    witness: Some(j),
                }
            }
            Ok(_) | Err(Error::DegenerateVariance) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(best)
}

/// Log mxPBF profile over every center, using sliding window statistics
/// rebuilt from scratch every [`DEFAULT_REBUILD_EVERY`] centers.
pub fn scan_mean(data: &DataMatrix, params: &MeanPbfParams) -> Result<ScanProfile<usize>> {
    scan_mean_with(data, params, DEFAULT_REBUILD_EVERY)
}

/// [`scan_mean`] with an explicit rebuild period (centers per chunk).
pub fn scan_mean_with(data: &DataMatrix, params: &MeanPbfParams, rebuild_every: usize) -> Result<ScanProfile<usize>> {
    let window = check_params(data, params)?;
    let shift = column_means(data);
    let shrink = params.log_shrinkage();
    let n_w = params.n_w;
    let len = 2.0 * n_w as f64;

    let chunks = center_chunks(window.first_center(), window.last_center(), rebuild_every);
    let points = chunks
        .into_par_iter()
        .map(|centers| -> Result<Vec<MeanScanResult>> {
            let first = *centers.start();
            let mut left = WindowMoments::marginal(data, window.left_span(first), shift.clone())?.rebuild_every(0);
            let mut right = WindowMoments::marginal(data, window.right_span(first), shift.clone())?.rebuild_every(0);
            let mut out = Vec::with_capacity(centers.clone().count());
            for center in centers {
                if center > first {
                    left.shift_right(data);
                    right.shift_right(data);
                }
                let mut best = ScanPoint::all_degenerate(center);
                for (j, &s) in shift.iter().enumerate() {
                    let (sl, sr) = (left.sum(j), right.sum(j));
                    let (ql, qr) = (left.sum_sq(j), right.sum_sq(j));
                    let s_pooled = left.centered_rss(j) + right.centered_rss(j);
                    let s_comb = centered_from_sums(sl + sr, ql + qr, len);
                    let energy = ql + qr + 2.0 * s * (sl + sr) + len * s * s;
                    if let Some(v) = evidence(s_comb, s_pooled, energy, n_w, shrink) {
                        if best.witness.is_none() || v > best.log_mxpbf {
                            best = ScanPoint {
                                center,
                                log_mxpbf: v,
                                witness: Some(j),
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
        n_w,
        points: points.into_iter().flatten().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn params(alpha: f64, n_w: usize, p: usize) -> MeanPbfParams {
        MeanPbfParams::new(alpha, n_w, p).unwrap()
    }

    fn normal_matrix(n: usize, p: usize, seed: u64) -> DataMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = (0..n * p).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        DataMatrix::new(n, p, v).unwrap()
    }

    #[test]
    fn log_pbf_examples() {
        let pr = params(1.0, 2, 1);
        assert!((pr.gamma() - 0.5).abs() < 1e-15);
        let v = log_pbf_mean(&[-1.0, 1.0], &[-1.0, 1.0], &pr).unwrap();
        assert!((v - 0.5 * (1.0f64 / 3.0).ln()).abs() < 1e-12);
        assert!((v - -0.549306).abs() < 1e-6);

        let v = log_pbf_mean(&[-1.0, 1.0], &[9.0, 11.0], &pr).unwrap();
        let want = 2.0 * (104.0f64 / 4.0).ln() + 0.5 * (1.0f64 / 3.0).ln();
        assert!((v - want).abs() < 1e-12);
        assert!((v - 5.96689).abs() < 1e-5);

        assert_eq!(
            log_pbf_mean(&[0.0, 0.0], &[0.0, 0.0], &pr).unwrap_err(),
            Error::DegenerateVariance
        );
    }

    #[test]
    fn log_pbf_rejects_bad_windows() {
        let pr = params(1.0, 2, 1);
        assert!(matches!(
            log_pbf_mean(&[1.0, 2.0, 3.0], &[1.0, 2.0], &pr),
            Err(Error::WindowMismatch { .. })
        ));
        assert!(MeanPbfParams::new(0.0, 2, 1).is_err());
    }

    #[test]
    fn scan_domain_indices() {
        let d = normal_matrix(6, 2, 1);
        let prof = scan_mean(&d, &params(1.0, 2, 2)).unwrap();
        let centers: Vec<usize> = prof.points.iter().map(|p| p.center).collect();
        assert_eq!(centers, vec![3, 4, 5]);
    }

    #[test]
    fn single_column_reduces_to_log_pbf() {
        let d = normal_matrix(12, 1, 5);
        let pr = params(1.5, 4, 1);
        let col = d.column(0);
        let r = mxpbf_mean_at(&d, 6, &pr).unwrap();
        let direct = log_pbf_mean(&col[1..5], &col[5..9], &pr).unwrap();
        assert_eq!(r.witness, Some(0));
        assert!((r.log_mxpbf - direct).abs() < 1e-15);
    }

    #[test]
    fn witness_is_shifted_column() {
        let n = 40;
        let mut d = normal_matrix(n, 6, 9).values().to_vec();
        for r in 20..n {
            d[r * 6 + 4] += 6.0;
        }
        let d = DataMatrix::new(n, 6, d).unwrap();
        let pr = params(1.0, 10, 6);
        let r = mxpbf_mean_at(&d, 21, &pr).unwrap();
        // brute-force max over columns
        let w = WindowConfig::new(10, n).unwrap();
        let mut best = (f64::NEG_INFINITY, 0);
        for j in 0..6 {
            let l: Vec<f64> = d.column_in(w.left_span(21), j).collect();
            let rr: Vec<f64> = d.column_in(w.right_span(21), j).collect();
            let v = log_pbf_mean(&l, &rr, &pr).unwrap();
            if v > best.0 {
                best = (v, j);
            }
        }
        assert_eq!(r.witness, Some(best.1));
        assert_eq!(best.1, 4);
    }

    #[test]
    fn column_permutation_moves_witness() {
        let d = normal_matrix(30, 4, 21);
        let perm = [2usize, 0, 3, 1];
        let permuted = d.map_indexed(|r, c, _| d.get(r, perm[c])).unwrap();
        let pr = params(1.0, 8, 4);
        for center in 9..=23 {
            let a = mxpbf_mean_at(&d, center, &pr).unwrap();
            let b = mxpbf_mean_at(&permuted, center, &pr).unwrap();
            assert_eq!(a.log_mxpbf, b.log_mxpbf);
            assert_eq!(perm[b.witness.unwrap()], a.witness.unwrap());
        }
    }

    #[test]
    fn dead_columns_are_skipped() {
        let mut v = normal_matrix(20, 3, 4).values().to_vec();
        for r in 0..20 {
            v[r * 3] = 2.5;
        }
        let d = DataMatrix::new(20, 3, v).unwrap();
        let prof = scan_mean(&d, &params(1.0, 5, 3)).unwrap();
        assert!(prof.points.iter().all(|p| p.witness != Some(0)));

        let flat = DataMatrix::new(10, 2, vec![1.0; 20]).unwrap();
        let r = mxpbf_mean_at(&flat, 4, &params(1.0, 3, 2)).unwrap();
        assert!(r.is_all_degenerate());
        assert_eq!(r.log_mxpbf, f64::NEG_INFINITY);
        let prof = scan_mean(&flat, &params(1.0, 3, 2)).unwrap();
        assert!(prof.points.iter().all(|p| p.is_all_degenerate()));
    }

    #[test]
    fn sliding_scan_matches_recomputation() {
        for (seed, n, p, n_w, chunk) in [(1, 60, 5, 7, 64), (2, 150, 3, 20, 16), (3, 41, 2, 20, 1)] {
            let mut v = normal_matrix(n, p, seed).values().to_vec();
            for x in v.iter_mut().skip(p * n / 2) {
                *x = *x * 1.5 + 40.0;
            }
            let d = DataMatrix::new(n, p, v).unwrap();
            let pr = params(0.8, n_w, p);
            let prof = scan_mean_with(&d, &pr, chunk).unwrap();
            assert_eq!(prof.len(), n - 2 * n_w + 1);
            for pt in &prof.points {
                let direct = mxpbf_mean_at(&d, pt.center, &pr).unwrap();
                assert!((pt.log_mxpbf - direct.log_mxpbf).abs() < 1e-8);
                assert_eq!(pt.witness, direct.witness);
            }
        }
    }

    #[test]
    fn scan_is_thread_count_independent() {
        let d = normal_matrix(300, 8, 17);
        let pr = params(1.0, 25, 8);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| scan_mean(&d, &pr).unwrap())
        };
        let a = run(1);
        for t in [2, 5] {
            assert_eq!(a, run(t));
        }
    }

    proptest! {
        #[test]
        fn invariances(
            seed in 0u64..10_000,
            n_w in 2usize..12,
            c in -50.0f64..50.0,
            k in 0.05f64..20.0,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let l: Vec<f64> = (0..n_w).map(|_| rng.sample(StandardNormal)).collect();
            let r: Vec<f64> = (0..n_w).map(|_| rng.sample::<f64, _>(StandardNormal) + 1.0).collect();
            let pr = params(1.0, n_w, 3);
            let base = log_pbf_mean(&l, &r, &pr).unwrap();
            let tr = |v: &[f64]| v.iter().map(|x| x + c).collect::<Vec<_>>();
            let sc = |v: &[f64]| v.iter().map(|x| x * k).collect::<Vec<_>>();
            prop_assert!((log_pbf_mean(&tr(&l), &tr(&r), &pr).unwrap() - base).abs() < 1e-9);
            prop_assert!((log_pbf_mean(&sc(&l), &sc(&r), &pr).unwrap() - base).abs() < 1e-9);
            prop_assert!((log_pbf_mean(&r, &l, &pr).unwrap() - base).abs() < 1e-12);
        }

        #[test]
        fn increasing_in_joint_energy(s_pooled in 0.1f64..10.0, s1 in 0.0f64..10.0, ds in 1e-6f64..10.0) {
            let a = evidence(s_pooled + s1, s_pooled, 1.0, 5, -1.0).unwrap();
            let b = evidence(s_pooled + s1 + ds, s_pooled, 1.0, 5, -1.0).unwrap();
            prop_assert!(b > a);
        }
    }
}
