//! Sequential vs data-parallel Monte Carlo engine comparison, plus the
//! transform/inversion hot path.
//!
//! Build with default features to bench the rayon engine against the
//! sequential one (workers = 1 routes around the pool); build with
//! `--no-default-features` to measure the pure sequential fallback.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lqlab::inversion::{survival_sn, InversionConfig};
use lqlab::mcsim::{estimate_survival, McConfig};
use lqlab::LevyModel;
use std::hint::black_box;

fn bench_mc_engines(c: &mut Criterion) {
    let model = LevyModel::brownian(1.0).unwrap();
    let mut group = c.benchmark_group("mc_survival_brownian_20k_paths");
    group.sample_size(10);
    let worker_counts: &[usize] = if cfg!(feature = "parallel") {
        &[1, 2, 4, 8]
    } else {
        &[1]
    };
    for &workers in worker_counts {
        group.bench_with_input(BenchmarkId::new("workers", workers), &workers, |b, &w| {
            let cfg = McConfig { paths: 20_000, seed: 7, workers: w, ..McConfig::default() };
            b.iter(|| estimate_survival(black_box(&model), 1.0, 0.5, &cfg).unwrap().mean);
        });
    }
    group.finish();

    let mut group = c.benchmark_group("mc_survival_cpp_event_driven_50k_paths");
    group.sample_size(10);
    let model = LevyModel::compound_poisson_positive(1.0, 1.0).unwrap();
    for &workers in worker_counts {
        group.bench_with_input(BenchmarkId::new("workers", workers), &workers, |b, &w| {
            let cfg = McConfig { paths: 50_000, seed: 7, workers: w, ..McConfig::default() };
            b.iter(|| estimate_survival(black_box(&model), 2.0, 0.5, &cfg).unwrap().mean);
        });
    }
    group.finish();
}

fn bench_inversion(c: &mut Criterion) {
    let model = LevyModel::brownian(1.0).unwrap();
    let cfg = InversionConfig::default();
    c.bench_function("survival_sn_brownian_gs16", |b| {
        b.iter(|| survival_sn(black_box(&model), 1.0, 0.5, &cfg).unwrap().value)
    });
}

criterion_group!(benches, bench_mc_engines, bench_inversion);
criterion_main!(benches);
