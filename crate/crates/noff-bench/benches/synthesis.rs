use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use noff_bench::random_admissible_operator;
use noff_core::{
    spectral_decompose, synthesize_projection, synthesize_three_projections, Tolerance,
};

fn bench_spectral(c: &mut Criterion) {
    let mut group = c.benchmark_group("spectral_decompose");
    for n in [8usize, 32, 128] {
        let op = random_admissible_operator(n, n / 2, 17);
        group.bench_with_input(BenchmarkId::from_parameter(n), &op, |b, op| {
            b.iter(|| spectral_decompose(black_box(op)))
        });
    }
    group.finish();
}

fn bench_synthesize(c: &mut Criterion) {
    let tol = Tolerance::default();
    let mut group = c.benchmark_group("synthesize_projection");
    for n in [8usize, 32, 128] {
        let op = random_admissible_operator(n, n / 2, 23);
        group.bench_with_input(BenchmarkId::from_parameter(n), &op, |b, op| {
            b.iter(|| synthesize_projection(black_box(op), &tol).unwrap())
        });
    }
    group.finish();
}

fn bench_three_projections(c: &mut Criterion) {
    let tol = Tolerance::default();
    let mut group = c.benchmark_group("synthesize_three_projections");
    for n in [9usize, 33] {
        let op = random_admissible_operator(n, n, 29);
        group.bench_with_input(BenchmarkId::from_parameter(n), &op, |b, op| {
            b.iter(|| synthesize_three_projections(black_box(op), &tol).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_spectral, bench_synthesize, bench_three_projections);
criterion_main!(benches);
