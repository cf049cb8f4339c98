// SPDX-License-Identifier: MIT OR Apache-2.0

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mxpbf::simgen::ChangeKind;
use mxpbf::{calibrate_alpha, scan_cov, scan_mean, CalibrationConfig, CovPbfParams, MeanPbfParams, ScanKind};
use mxpbf_bench::fixture;

fn mean_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("scan_mean");
    for &(n, p) in &[(500, 200), (500, 800), (2000, 200)] {
        let data = fixture(ChangeKind::Mean, n, p);
        let params = MeanPbfParams::new(1.0, 25, p).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(format!("n{n}_p{p}")), &data, |b, d| {
            b.iter(|| scan_mean(black_box(d), &params).unwrap())
        });
    }
    group.finish();
}

fn cov_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("scan_cov");
    group.sample_size(10);
    for &(n, p) in &[(500, 50), (500, 200)] {
        let data = fixture(ChangeKind::Covariance, n, p);
        let params = CovPbfParams::new(1.0, 25, p).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(format!("n{n}_p{p}")), &data, |b, d| {
            b.iter(|| scan_cov(black_box(d), &params).unwrap())
        });
    }
    group.finish();
}

fn calibration(c: &mut Criterion) {
    let mut group = c.benchmark_group("calibrate_alpha");
    group.sample_size(10);
    let data = fixture(ChangeKind::Mean, 200, 20);
    let config = CalibrationConfig {
        n_sim: 100,
        ..Default::default()
    };
    group.bench_function("mean_n200_p20_nsim100", |b| {
        b.iter(|| calibrate_alpha(black_box(&data), 25, ScanKind::Mean, &config).unwrap())
    });
    group.finish();
}

criterion_group!(benches, mean_scan, cov_scan, calibration);
criterion_main!(benches);
