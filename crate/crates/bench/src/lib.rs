// SPDX-License-Identifier: MIT OR Apache-2.0

//! Shared fixtures for the benchmarks.

use mxpbf::simgen::{generate, ChangeKind, Layout, Scenario, SignalCount, Structure};
use mxpbf::DataMatrix;

/// Seeded single-change dataset of the given kind and size.
pub fn fixture(kind: ChangeKind, n: usize, p: usize) -> DataMatrix {
    let scenario = Scenario {
        kind,
        layout: Layout::Single,
        n,
        p,
        signal: match kind {
            ChangeKind::Mean => 1.0,
            ChangeKind::Covariance => 4.0,
        },
        signal_count: SignalCount::Rare,
        structure: Structure::Sparse,
        seed: 7,
    };
    generate(&scenario).expect("benchmark scenario is valid").data
}
