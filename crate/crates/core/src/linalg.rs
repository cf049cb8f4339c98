// SPDX-License-Identifier: MIT OR Apache-2.0

//! Small dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Whether a symmetric matrix should be treated as positive definite: its
/// smallest eigenvalue is positive relative to its scale.
pub fn is_positive_definite(m: &DMatrix<f64>) -> bool {
    let eig = m.clone().symmetric_eigenvalues();
    let max = eig.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    min > 1e-12 * max.max(1.0)
}

/// Adds `(-lambda_min + margin) I` when the matrix is not positive definite.
/// Returns the shift that was applied (0 when none was needed).
pub fn repair_positive_definite(m: &mut DMatrix<f64>, margin: f64) -> f64 {
    if is_positive_definite(m) {
        return 0.0;
    }
    let shift = -min_eigenvalue(m) + margin;
    for k in 0..m.nrows() {
        m[(k, k)] += shift;
    }
    shift
}

/// Lower-triangular Cholesky factor.
pub fn cholesky_lower(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    m.clone().cholesky().map(|c| c.l()).ok_or(Error::NotPositiveDefinite)
}

pub fn symmetrize(m: &mut DMatrix<f64>) {
    let p = m.nrows();
    for i in 0..p {
        for j in i + 1..p {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Independent RNG stream `stream` of the master `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mixes tags into a seed (splitmix64 finalizer), so related runs (ladder
/// rungs, segments) draw from unrelated streams.
pub fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(seed, |acc, &t| {
        let mut z = acc ^ t.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    })
}

pub fn standard_normal<R: Rng + ?Sized>(p: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_iterator(p, (0..p).map(|_| rng.sample::<f64, _>(StandardNormal)))
}
