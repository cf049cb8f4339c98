// SPDX-License-Identifier: MIT OR Apache-2.0

//! Observation matrix, window spans and the sufficient statistics every
//! pairwise Bayes factor is built from.
//!
//! Time locations are 1-based and inclusive, following the usual change-point
//! convention (a change at `l` means rows `..l-1` and `l..` differ). Column
//! indices are 0-based.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of sliding shifts between two from-scratch rebuilds of a
/// [`WindowMoments`] accumulator.
pub const DEFAULT_REBUILD_EVERY: usize = 64;

/// An `n x p` matrix of finite observations, rows ordered in time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataMatrix {
    n: usize,
    p: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    /// Builds a matrix from row-major values.
    pub fn new(n: usize, p: usize, values: Vec<f64>) -> Result<Self> {
        if n < 2 || p < 1 {
            return Err(Error::BadShape { n, p });
        }
        if values.len() != n * p {
            return Err(Error::LengthMismatch {
                n,
                p,
                expected: n * p,
                got: values.len(),
            });
        }
        if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: idx / p + 1,
                col: idx % p,
            });
        }
        Ok(Self { n, p, values })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, |r| r.as_ref().len());
        let mut values = Vec::with_capacity(n * p);
        for row in rows {
            let row = row.as_ref();
            if row.len() != p {
                return Err(Error::LengthMismatch {
                    n,
                    p,
                    expected: n * p,
                    got: values.len() + row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::new(n, p, values)
    }

    /// Builds a matrix whose columns are the given slices.
    pub fn from_columns<C: AsRef<[f64]>>(columns: &[C]) -> Result<Self> {
        let p = columns.len();
        let n = columns.first().map_or(0, |c| c.as_ref().len());
        if columns.iter().any(|c| c.as_ref().len() != n) {
            return Err(Error::InvalidParameter("columns have different lengths".into()));
        }
        let mut values = vec![0.0; n * p];
        for (j, col) in columns.iter().enumerate() {
            for (i, &v) in col.as_ref().iter().enumerate() {
                values[i * p + j] = v;
            }
        }
        Self::new(n, p, values)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    /// Entry at 0-based `row`, `col`.
    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.p + col]
    }

    /// 0-based row slice.
    #[inline]
    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.p..(row + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.p)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        self.rows().map(|r| r[col]).collect()
    }

    /// Values of column `col` over a 1-based inclusive span.
    pub fn column_in(&self, span: WindowSpan, col: usize) -> impl Iterator<Item = f64> + '_ {
        (span.start - 1..span.end).map(move |r| self.get(r, col))
    }

    /// Copy of the rows in a 1-based inclusive span.
    pub fn slice_rows(&self, span: WindowSpan) -> Result<Self> {
        span.check(self.n)?;
        let values = self.values[(span.start - 1) * self.p..span.end * self.p].to_vec();
        Self::new(span.len(), self.p, values)
    }

    /// Applies `f(row, col, value)` to every entry, returning a new matrix.
    pub fn map_indexed(&self, mut f: impl FnMut(usize, usize, f64) -> f64) -> Result<Self> {
        let p = self.p;
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(idx, &v)| f(idx / p, idx % p, v))
            .collect();
        Self::new(self.n, self.p, values)
    }

    fn check_column(&self, col: usize) -> Result<()> {
        if col >= self.p {
            return Err(Error::ColumnOutOfRange { col, p: self.p });
        }
        Ok(())
    }
}

/// A 1-based inclusive range of rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WindowSpan {
    pub start: usize,
    pub end: usize,
}

impl WindowSpan {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn check(&self, n: usize) -> Result<()> {
        if self.start < 1 || self.start > self.end || self.end > n {
            return Err(Error::InvalidSpan {
                start: self.start,
                end: self.end,
                n,
            });
        }
        Ok(())
    }

    /// The span shifted one row later in time.
    pub fn next(&self) -> Self {
        Self::new(self.start + 1, self.end + 1)
    }
}

/// A window size together with the series length it scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowConfig {
    pub n_w: usize,
    pub n: usize,
}

impl WindowConfig {
    /// Validates `2 <= n_w <= n/2`.
    pub fn new(n_w: usize, n: usize) -> Result<Self> {
        if n_w < 2 || 2 * n_w > n {
            return Err(Error::InfeasibleWindow { n_w, n });
        }
        Ok(Self { n_w, n })
    }

    /// First candidate center, `n_w + 1`.
    pub fn first_center(&self) -> usize {
        self.n_w + 1
    }

    /// Last candidate center, `n - n_w + 1`.
    pub fn last_center(&self) -> usize {
        self.n - self.n_w + 1
    }

    pub fn centers(&self) -> std::ops::RangeInclusive<usize> {
        self.first_center()..=self.last_center()
    }

    pub fn check_center(&self, center: usize) -> Result<()> {
        if center < self.first_center() || center > self.last_center() {
            return Err(Error::CenterOutOfRange {
                center,
                first: self.first_center(),
                last: self.last_center(),
            });
        }
        Ok(())
    }

    /// Rows `center - n_w ..= center - 1`.
    pub fn left_span(&self, center: usize) -> WindowSpan {
        WindowSpan::new(center - self.n_w, center - 1)
    }

    /// Rows `center ..= center + n_w - 1`.
    pub fn right_span(&self, center: usize) -> WindowSpan {
        WindowSpan::new(center, center + self.n_w - 1)
    }

    /// `log(max(n_w, p)) / n_w`, the rate at which the window must grow
    /// relative to the dimension for the tests to be consistent.
    pub fn epsilon(&self, p: usize) -> f64 {
        (self.n_w.max(p) as f64).ln() / self.n_w as f64
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().collect::<CompensatedSum>().value()
}

/// Sum of squared deviations from the mean of `values`.
pub fn centered_rss_of(values: &[f64]) -> f64 {
    let len = values.len() as f64;
    let mean = compensated_sum(values.iter().copied()) / len;
    compensated_sum(values.iter().map(|&v| (v - mean) * (v - mean)))
}

/// Residual sum of squares of the no-intercept regression of `response` on
/// `predictor`. A zero predictor projects to zero, so the result is the
/// response energy.
pub fn regression_rss_of(response: &[f64], predictor: &[f64]) -> f64 {
    let sxx = compensated_sum(predictor.iter().map(|&x| x * x));
    if sxx == 0.0 {
        return compensated_sum(response.iter().map(|&y| y * y));
    }
    let sxy = compensated_sum(response.iter().zip(predictor).map(|(&y, &x)| x * y));
    let slope = sxy / sxx;
    compensated_sum(
        response
            .iter()
            .zip(predictor)
            .map(|(&y, &x)| (y - slope * x) * (y - slope * x)),
    )
}

/// Mean-centered residual quadratic form of column `col` over `span`,
/// i.e. `len * sigma_hat^2`.
pub fn centered_rss(data: &DataMatrix, span: WindowSpan, col: usize) -> Result<f64> {
    span.check(data.n())?;
    data.check_column(col)?;
    if span.len() < 2 {
        return Err(Error::SpanTooShort { len: span.len() });
    }
    let values: Vec<f64> = data.column_in(span, col).collect();
    Ok(centered_rss_of(&values))
}

/// RSS of the no-intercept least-squares fit of column `response` on column
/// `predictor` over `span`.
pub fn regression_rss(data: &DataMatrix, span: WindowSpan, response: usize, predictor: usize) -> Result<f64> {
    span.check(data.n())?;
    data.check_column(response)?;
    data.check_column(predictor)?;
    if span.len() < 2 {
        return Err(Error::SpanTooShort { len: span.len() });
    }
    if response == predictor {
        return Err(Error::SameColumn(response));
    }
    let y: Vec<f64> = data.column_in(span, response).collect();
    let x: Vec<f64> = data.column_in(span, predictor).collect();
    Ok(regression_rss_of(&y, &x))
}

/// Streaming first and second moments of every column over a sliding span.
///
/// Per-column sums are kept about a fixed shift (typically the column mean
/// of the whole series) so the centered quadratic form does not cancel
/// catastrophically. Cross-products, when tracked, are raw (zero shift),
/// which is what the no-intercept regressions need. Every `rebuild_every`
/// shifts the accumulator is recomputed from scratch with compensated
/// summation, bounding the drift of the incremental updates.
#[derive(Debug, Clone)]
pub struct WindowMoments {
    span: WindowSpan,
    p: usize,
    shift: Vec<f64>,
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
    /// Upper triangle (`i < j`) of the raw cross-product matrix, stored densely.
    cross: Option<Vec<f64>>,
    since_rebuild: usize,
    rebuild_every: usize,
}

impl WindowMoments {
    /// Per-column sums and sums of squares about `shift`.
    pub fn marginal(data: &DataMatrix, span: WindowSpan, shift: Vec<f64>) -> Result<Self> {
        if shift.len() != data.p() {
            return Err(Error::InvalidParameter(format!(
                "shift has {} entries, expected {}",
                shift.len(),
                data.p()
            )));
        }
        Self::build(data, span, shift, false)
    }

    /// Raw sums, sums of squares and pairwise cross-products.
    pub fn with_cross(data: &DataMatrix, span: WindowSpan) -> Result<Self> {
        Self::build(data, span, vec![0.0; data.p()], true)
    }

    fn build(data: &DataMatrix, span: WindowSpan, shift: Vec<f64>, cross: bool) -> Result<Self> {
        span.check(data.n())?;
        let p = data.p();
        let mut m = Self {
            span,
            p,
            shift,
            sum: vec![0.0; p],
            sum_sq: vec![0.0; p],
            cross: cross.then(|| vec![0.0; p * p]),
            since_rebuild: 0,
            rebuild_every: DEFAULT_REBUILD_EVERY,
        };
        m.rebuild(data);
        Ok(m)
    }

    /// Sets the rebuild period; `0` disables periodic rebuilds.
    pub fn rebuild_every(mut self, shifts: usize) -> Self {
        self.rebuild_every = shifts;
        self
    }

    /// Recomputes every statistic from the rows of the current span.
    pub fn rebuild(&mut self, data: &DataMatrix) {
        let p = self.p;
        let rows = self.span.start - 1..self.span.end;
        for j in 0..p {
            let s = self.shift[j];
            let mut sum = CompensatedSum::new();
            let mut sq = CompensatedSum::new();
            for r in rows.clone() {
                let d = data.get(r, j) - s;
                sum.add(d);
                sq.add(d * d);
            }
            self.sum[j] = sum.value();
            self.sum_sq[j] = sq.value();
        }
        if let Some(cross) = self.cross.as_mut() {
            for i in 0..p {
                for j in i + 1..p {
                    cross[i * p + j] = compensated_sum(rows.clone().map(|r| data.get(r, i) * data.get(r, j)));
                }
            }
        }
        self.since_rebuild = 0;
    }

    /// Incremental update for a one-row shift: removes `leaving`, adds
    /// `entering`. The span bookkeeping moves forward by one row.
    pub fn advance(&mut self, leaving: &[f64], entering: &[f64]) {
        let p = self.p;
        for j in 0..p {
            let s = self.shift[j];
            let (a, b) = (leaving[j] - s, entering[j] - s);
            self.sum[j] += b - a;
            self.sum_sq[j] += b * b - a * a;
        }
        if let Some(cross) = self.cross.as_mut() {
            for i in 0..p {
                let (li, ei) = (leaving[i], entering[i]);
                let row = &mut cross[i * p..(i + 1) * p];
                for j in i + 1..p {
                    row[j] += ei * entering[j] - li * leaving[j];
                }
            }
        }
        self.span = self.span.next();
        self.since_rebuild += 1;
    }

    /// Moves the span one row later using `data`, rebuilding from scratch
    /// when the rebuild period is reached.
    pub fn shift_right(&mut self, data: &DataMatrix) {
        let next = self.span.next();
        debug_assert!(next.end <= data.n());
        if self.rebuild_every > 0 && self.since_rebuild + 1 >= self.rebuild_every {
            self.span = next;
            self.rebuild(data);
        } else {
            self.advance(data.row(self.span.start - 1), data.row(next.end - 1));
        }
    }

    pub fn span(&self) -> WindowSpan {
        self.span
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.span.len()
    }

    /// Sum of `x - shift` over the span.
    pub fn sum(&self, col: usize) -> f64 {
        self.sum[col]
    }

    /// Sum of `(x - shift)^2` over the span.
    pub fn sum_sq(&self, col: usize) -> f64 {
        self.sum_sq[col]
    }

    pub fn shift(&self, col: usize) -> f64 {
        self.shift[col]
    }

    /// Raw cross-product `sum x_i x_j`; for `i == j` the raw sum of squares.
    ///
    /// # Panics
    /// If the accumulator was built without cross-products.
    pub fn cross(&self, i: usize, j: usize) -> f64 {
        use std::cmp::Ordering::*;
        let cross = self.cross.as_ref().expect("cross-products not tracked");
        match i.cmp(&j) {
            Less => cross[i * self.p + j],
            Greater => cross[j * self.p + i],
            Equal => self.sum_sq[i],
        }
    }

    pub fn has_cross(&self) -> bool {
        self.cross.is_some()
    }

    /// Centered quadratic form of column `col`.
    pub fn centered_rss(&self, col: usize) -> f64 {
        centered_from_sums(self.sum[col], self.sum_sq[col], self.len() as f64)
    }

    /// No-intercept RSS of `response` on `predictor`.
    pub fn regression_rss(&self, response: usize, predictor: usize) -> f64 {
        regression_from_sums(
            self.sum_sq[response],
            self.sum_sq[predictor],
            self.cross(response, predictor),
        )
    }
}

#[inline]
pub(crate) fn centered_from_sums(sum: f64, sum_sq: f64, len: f64) -> f64 {
    (sum_sq - sum * sum / len).max(0.0)
}

#[inline]
pub(crate) fn regression_from_sums(syy: f64, sxx: f64, sxy: f64) -> f64 {
    if sxx > 0.0 {
        (syy - sxy * sxy / sxx).max(0.0)
    } else {
        syy
    }
}

/// Column means of the whole matrix.
pub fn column_means(data: &DataMatrix) -> Vec<f64> {
    let n = data.n() as f64;
    (0..data.p())
        .map(|j| compensated_sum((0..data.n()).map(|r| data.get(r, j))) / n)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn col(values: &[f64]) -> DataMatrix {
        DataMatrix::from_columns(&[values]).unwrap()
    }

    fn random_matrix(n: usize, p: usize, seed: u64) -> DataMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = (0..n * p).map(|_| rng.random_range(-3.0..3.0)).collect();
        DataMatrix::new(n, p, v).unwrap()
    }

    #[test]
    fn centered_rss_examples() {
        let s = WindowSpan::new(1, 2);
        assert_eq!(centered_rss(&col(&[-1.0, 1.0]), s, 0).unwrap(), 2.0);
        assert_eq!(
            centered_rss(&col(&[7.25, 7.25, 7.25]), WindowSpan::new(1, 3), 0).unwrap(),
            0.0
        );
        let v = centered_rss(&col(&[-1.0, 1.0, 9.0, 11.0]), WindowSpan::new(1, 4), 0).unwrap();
        assert!((v - 104.0).abs() < 1e-12);
    }

    #[test]
    fn centered_rss_rejects_single_row() {
        let err = centered_rss(&col(&[1.0, 2.0]), WindowSpan::new(2, 2), 0).unwrap_err();
        assert_eq!(err, Error::SpanTooShort { len: 1 });
    }

    #[test]
    fn regression_rss_examples() {
        let d = DataMatrix::from_columns(&[[1.0, 2.0], [1.0, 2.0]]).unwrap();
        assert_eq!(regression_rss(&d, WindowSpan::new(1, 2), 0, 1).unwrap(), 0.0);

        let d = DataMatrix::from_columns(&[[3.0, 4.0], [0.0, 0.0]]).unwrap();
        assert_eq!(regression_rss(&d, WindowSpan::new(1, 2), 0, 1).unwrap(), 25.0);

        let d = DataMatrix::from_columns(&[[2.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!((regression_rss(&d, WindowSpan::new(1, 2), 0, 1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn regression_rss_errors() {
        let d = DataMatrix::from_columns(&[[2.0, 1.0], [1.0, 0.0]]).unwrap();
        assert_eq!(
            regression_rss(&d, WindowSpan::new(1, 2), 1, 1).unwrap_err(),
            Error::SameColumn(1)
        );
        assert_eq!(
            regression_rss(&d, WindowSpan::new(1, 1), 0, 1).unwrap_err(),
            Error::SpanTooShort { len: 1 }
        );
    }

    #[test]
    fn data_matrix_validation() {
        assert!(matches!(DataMatrix::new(1, 1, vec![0.0]), Err(Error::BadShape { .. })));
        assert_eq!(
            DataMatrix::new(2, 2, vec![0.0, 1.0, f64::NAN, 0.0]).unwrap_err(),
            Error::NonFinite { row: 2, col: 0 }
        );
    }

    #[test]
    fn window_config_domain() {
        let w = WindowConfig::new(2, 6).unwrap();
        assert_eq!(w.centers().collect::<Vec<_>>(), vec![3, 4, 5]);
        assert!(WindowConfig::new(4, 7).is_err());
        assert!(WindowConfig::new(1, 7).is_err());
        assert!((w.epsilon(1) - 2f64.ln() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn advance_then_rebuild_agrees() {
        let d = random_matrix(10, 3, 7);
        let mut m = WindowMoments::with_cross(&d, WindowSpan::new(1, 4))
            .unwrap()
            .rebuild_every(0);
        for _ in 0..6 {
            m.shift_right(&d);
        }
        let fresh = WindowMoments::with_cross(&d, m.span()).unwrap();
        for i in 0..3 {
            assert!((m.sum(i) - fresh.sum(i)).abs() < 1e-9);
            assert!((m.sum_sq(i) - fresh.sum_sq(i)).abs() < 1e-9);
            for j in 0..3 {
                assert!((m.cross(i, j) - fresh.cross(i, j)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn advance_over_constant_matrix_is_stationary() {
        let d = DataMatrix::new(8, 2, vec![3.5; 16]).unwrap();
        let mut m = WindowMoments::with_cross(&d, WindowSpan::new(1, 3)).unwrap();
        let (s, q, c) = (m.sum(0), m.sum_sq(1), m.cross(0, 1));
        for _ in 0..5 {
            m.shift_right(&d);
            assert_eq!((m.sum(0), m.sum_sq(1), m.cross(0, 1)), (s, q, c));
        }
    }

    #[test]
    fn full_pass_matches_brute_force_windows() {
        let d = random_matrix(20, 3, 11);
        let n_w = 5;
        let mut m = WindowMoments::marginal(&d, WindowSpan::new(1, n_w), vec![0.0; 3])
            .unwrap()
            .rebuild_every(0);
        for start in 1..=20 - n_w + 1 {
            if start > 1 {
                m.shift_right(&d);
            }
            assert_eq!(m.span(), WindowSpan::new(start, start + n_w - 1));
            for j in 0..3 {
                let brute: f64 = (start - 1..start - 1 + n_w).map(|r| d.get(r, j)).sum();
                let brute_sq: f64 = (start - 1..start - 1 + n_w).map(|r| d.get(r, j).powi(2)).sum();
                assert!((m.sum(j) - brute).abs() < 1e-9);
                assert!((m.sum_sq(j) - brute_sq).abs() < 1e-9);
                let rss = centered_rss(&d, m.span(), j).unwrap();
                assert!((m.centered_rss(j) - rss).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn periodic_rebuild_resets_counter() {
        let d = random_matrix(40, 2, 3);
        let mut m = WindowMoments::with_cross(&d, WindowSpan::new(1, 5))
            .unwrap()
            .rebuild_every(4);
        for _ in 0..30 {
            m.shift_right(&d);
            assert!(m.since_rebuild < 4);
        }
        let fresh = WindowMoments::with_cross(&d, m.span()).unwrap();
        assert!((m.regression_rss(0, 1) - fresh.regression_rss(0, 1)).abs() < 1e-9);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut values = vec![1e16, 1.0, -1e16];
        values.extend(std::iter::repeat_n(1.0, 10));
        assert_eq!(compensated_sum(values), 11.0);
    }

    proptest! {
        #[test]
        fn centered_rss_translation_and_scale(
            v in proptest::collection::vec(-100.0f64..100.0, 2..40),
            c in -1e3f64..1e3,
            k in 0.01f64..100.0,
        ) {
            let base = centered_rss_of(&v);
            let shifted: Vec<f64> = v.iter().map(|x| x + c).collect();
            let scaled: Vec<f64> = v.iter().map(|x| x * k).collect();
            prop_assert!((centered_rss_of(&shifted) - base).abs() <= 1e-9 * base.max(1.0));
            prop_assert!((centered_rss_of(&scaled) - k * k * base).abs() <= 1e-9 * (k * k * base).max(1.0));
        }

        #[test]
        fn regression_rss_vanishes_on_multiples(
            x in proptest::collection::vec(-10.0f64..10.0, 2..30),
            a in -5.0f64..5.0,
        ) {
            let y: Vec<f64> = x.iter().map(|v| a * v).collect();
            let energy: f64 = y.iter().map(|v| v * v).sum();
            prop_assert!(regression_rss_of(&y, &x) <= 1e-12 * energy.max(1.0));
        }

        #[test]
        fn sliding_agrees_with_scratch(seed in 0u64..1000, n_w in 2usize..8, steps in 0usize..30) {
            let d = random_matrix(n_w + 30, 3, seed);
            let shift = column_means(&d);
            let mut m = WindowMoments::marginal(&d, WindowSpan::new(1, n_w), shift.clone()).unwrap();
            let mut c = WindowMoments::with_cross(&d, WindowSpan::new(1, n_w)).unwrap();
            for _ in 0..steps {
                m.shift_right(&d);
                c.shift_right(&d);
            }
            let fm = WindowMoments::marginal(&d, m.span(), shift).unwrap();
            let fc = WindowMoments::with_cross(&d, c.span()).unwrap();
            for j in 0..3 {
                let rel = |a: f64, b: f64| (a - b).abs() <= 1e-9 * b.abs().max(1.0);
                prop_assert!(rel(m.sum_sq(j), fm.sum_sq(j)));
                prop_assert!(rel(m.sum(j), fm.sum(j)));
                for i in 0..3 {
                    prop_assert!(rel(c.cross(i, j), fc.cross(i, j)));
                }
            }
        }
    }
}
