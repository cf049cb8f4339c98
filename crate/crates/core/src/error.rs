// SPDX-License-Identifier: MIT OR Apache-2.0

use thiserror::Error;

/// Errors raised by the detection kernels and their supporting routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("data matrix must have at least 2 rows and 1 column, got {n}x{p}")]
    BadShape { n: usize, p: usize },

    #[error("expected {expected} values for a {n}x{p} matrix, got {got}")]
    LengthMismatch {
        n: usize,
        p: usize,
        expected: usize,
        got: usize,
    },

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("span [{start}, {end}] is invalid for a series of length {n}")]
    InvalidSpan { start: usize, end: usize, n: usize },

    #[error("span of length {len} is too short, need at least 2 observations")]
    SpanTooShort { len: usize },

    #[error("column {0} cannot be regressed on itself")]
    SameColumn(usize),

    #[error("column index {col} out of range for p = {p}")]
    ColumnOutOfRange { col: usize, p: usize },

    #[error("window size {n_w} is infeasible for n = {n} (need 2 <= n_w <= n/2)")]
    InfeasibleWindow { n_w: usize, n: usize },

    #[error("center {center} outside the scan domain [{first}, {last}]")]
    CenterOutOfRange { center: usize, first: usize, last: usize },

    #[error("window halves have unequal or too short lengths ({left} and {right})")]
    WindowMismatch { left: usize, right: usize },

    #[error("degenerate variance: pooled within-window energy is zero")]
    DegenerateVariance,

    #[error("pairwise covariance method needs p >= 2, got p = {0}")]
    NeedsTwoColumns(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("profile is empty")]
    EmptyProfile,

    #[error("ladder has {ladder} rungs but {detections} detection sets were given")]
    LadderMismatch { ladder: usize, detections: usize },

    #[error("invalid window ladder: {0}")]
    InvalidLadder(String),

    #[error("no window of the ladder fits a series of length {n}")]
    LadderInfeasible { n: usize },

    #[error("no alpha on the grid reaches the target FPR {target} (FPR at largest alpha = {achieved})")]
    NoFeasibleAlpha { target: f64, achieved: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("infeasible scenario: {0}")]
    InfeasibleScenario(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
