use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use noff_bench::random_admissible_operator;
use noff_core::{
    complete_to_tight, exact_or_estimated_frame_operator, sample_omega_member,
    ProjectionSampler, SamplerKind, Tolerance, WeightedProjectionFrame,
};

fn starting_frame(n: usize, items: usize, seed: u64) -> WeightedProjectionFrame {
    let tol = Tolerance::default();
    let projections = (0..items)
        .map(|i| {
            let op = random_admissible_operator(n, (n / 3).max(1), seed + i as u64);
            sample_omega_member(&op, seed + 31 * i as u64, &tol).unwrap()
        })
        .collect();
    WeightedProjectionFrame::unit_weights(n, projections).unwrap()
}

fn bench_complete_to_tight(c: &mut Criterion) {
    let tol = Tolerance::default();
    let mut group = c.benchmark_group("complete_to_tight");
    for n in [8usize, 32] {
        let frame = starting_frame(n, 3, 41);
        group.bench_with_input(BenchmarkId::from_parameter(n), &frame, |b, frame| {
            b.iter(|| complete_to_tight(black_box(frame), &tol).unwrap())
        });
    }
    group.finish();
}

fn bench_monte_carlo_estimate(c: &mut Criterion) {
    let mut group = c.benchmark_group("haar_frame_operator_estimate");
    group.sample_size(10);
    for samples in [1000usize, 4000] {
        let sampler =
            ProjectionSampler::new(6, SamplerKind::HaarOrthogonal { rank: 2 }, 51).unwrap();
        group.bench_with_input(
            BenchmarkId::from_parameter(samples),
            &samples,
            |b, &samples| {
                b.iter(|| exact_or_estimated_frame_operator(black_box(&sampler), samples).unwrap())
            },
        );
    }
    group.finish();
}

criterion_group!(benches, bench_complete_to_tight, bench_monte_carlo_estimate);
criterion_main!(benches);
