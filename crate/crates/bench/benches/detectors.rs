use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mr_hetero::competitors::{presso_outlier_test, radial_mr, PressoConfig};
use mr_hetero::simulation::{generate_replicate, SimConfig};
use mr_hetero::{cochran_q, detect_outliers_gcq, GcqOptions, WeightScheme};
use mr_hetero_bench::{fixture, SETTINGS};

fn heterogeneity(c: &mut Criterion) {
    let mut g = c.benchmark_group("cochran_q");
    for (preset, n) in SETTINGS {
        let data = fixture(preset, n);
        g.bench_with_input(BenchmarkId::new("first_order", preset), &data, |b, d| {
            b.iter(|| black_box(cochran_q(d, WeightScheme::FirstOrder).unwrap()))
        });
        g.bench_with_input(BenchmarkId::new("second_order", preset), &data, |b, d| {
            b.iter(|| black_box(cochran_q(d, WeightScheme::second_order()).unwrap()))
        });
    }
    g.finish();
}

fn detectors(c: &mut Criterion) {
    let mut g = c.benchmark_group("detectors");
    g.sample_size(20);
    for (preset, n) in SETTINGS {
        let data = fixture(preset, n);
        g.bench_with_input(BenchmarkId::new("gcq", preset), &data, |b, d| {
            b.iter(|| black_box(detect_outliers_gcq(d, GcqOptions::default()).unwrap()))
        });
        let cfg = PressoConfig::default();
        g.bench_with_input(BenchmarkId::new("presso_1000", preset), &data, |b, d| {
            b.iter(|| black_box(presso_outlier_test(d, &cfg).unwrap()))
        });
        if data.d() == 1 {
            g.bench_with_input(BenchmarkId::new("radial", preset), &data, |b, d| {
                b.iter(|| black_box(radial_mr(d, WeightScheme::second_order(), 0.05).unwrap()))
            });
        }
    }
    g.finish();
}

fn replicate(c: &mut Criterion) {
    let mut cfg = SimConfig::preset("uni10").unwrap();
    cfg.n_individuals = 20_000;
    let mut g = c.benchmark_group("dgp");
    g.sample_size(10);
    g.bench_function("uni10_20k", |b| b.iter(|| black_box(generate_replicate(&cfg, 0).unwrap())));
    g.finish();
}

criterion_group!(benches, heterogeneity, detectors, replicate);
criterion_main!(benches);
