use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use levybar::estimator::{ensemble_contrast, BarrierGrid};
use levybar::{barrier_outcome, value_curve, BarrierParams, OracleResult, PathProfile, QuasiEnsemble};
use levybar_bench::{reference_increments, reference_path};

fn dividend(c: &mut Criterion) {
    let grid = BarrierGrid::new(10.0, 20.0, 0.05).unwrap().points();
    let mut group = c.benchmark_group("value_curve");
    for h in [0.1, 0.01, 0.001] {
        let path = reference_path(h, 1);
        group.bench_with_input(BenchmarkId::new("profile", h), &path, |b, p| {
            b.iter(|| value_curve(black_box(p), &grid, 0.2).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("direct", h), &path, |b, p| {
            b.iter(|| {
                grid.iter()
                    .map(|&t| barrier_outcome(black_box(p), BarrierParams::new(t, 0.2).unwrap()).value)
                    .sum::<f64>()
            })
        });
    }
    group.finish();

    let path = reference_path(0.01, 2);
    c.bench_function("path_profile/h=0.01", |b| b.iter(|| PathProfile::new(black_box(&path), 0.2)));
}

fn contrast(c: &mut Criterion) {
    let grid = BarrierGrid::new(10.0, 20.0, 0.05).unwrap().points();
    let mut group = c.benchmark_group("contrast");
    group.sample_size(10);
    for (h, alpha) in [(1.0, 100), (0.1, 100), (0.01, 100)] {
        let inc = reference_increments(h, 3);
        group.bench_function(BenchmarkId::new(format!("alpha={alpha}"), h), |b| {
            b.iter(|| ensemble_contrast(&QuasiEnsemble::new(10.0, &inc, alpha, 4), &grid, 0.2).unwrap())
        });
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let p = levybar::ModelParams::reference();
    c.bench_function("oracle/reference", |b| b.iter(|| OracleResult::new(black_box(&p), 0.2).unwrap()));
}

criterion_group!(benches, dividend, contrast, oracle);
criterion_main!(benches);
