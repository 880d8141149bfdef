//! Sweeps over the tight-frame construction and completion operations.

mod common;

use common::{random_low_rank_admissible, rng};
use noff_core::{
    classify_two_projection_tight, complete_to_tight, complete_to_tight_low_rank,
    construct_tight_with_ranks, frame_bounds, frame_operator, sample_omega_member,
    spectral_decompose, synthesize_two_projections, SymmetricOperator, TightPairCase, Tolerance,
    WeightedProjectionFrame,
};
use rand::Rng;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn random_ranks(r: &mut rand_chacha::ChaCha8Rng, n: usize) -> Vec<usize> {
    loop {
        let m = r.random_range(1..=6usize);
        let ranks: Vec<usize> = (0..m).map(|_| r.random_range(1..=n / 2)).collect();
        if ranks.iter().sum::<usize>() >= n {
            return ranks;
        }
    }
}

fn random_starting_frame(
    r: &mut rand_chacha::ChaCha8Rng,
    n: usize,
) -> WeightedProjectionFrame {
    let count = r.random_range(0..=4usize);
    let items = (0..count)
        .map(|_| {
            let t = random_low_rank_admissible(r, n);
            let p = sample_omega_member(&t, r.random(), &tol()).unwrap();
            let weight = r.random_range(0.5..2.0);
            (weight, p)
        })
        .collect();
    WeightedProjectionFrame::new(n, items).unwrap()
}

#[test]
fn prescribed_rank_construction_sweep() {
    let mut r = rng(0xf4a3_0001);
    for _ in 0..40 {
        let n = r.random_range(2..=10usize);
        let ranks = random_ranks(&mut r, n);
        let (frame, lambda) = construct_tight_with_ranks(n, &ranks, &tol()).unwrap();
        let report = frame_bounds(&frame, &tol());
        assert!(report.is_tight, "ranks {ranks:?} in dim {n} not tight");
        assert!(report.tightness_ratio <= 1e-8);
        assert!((report.upper - lambda).abs() <= 1e-9 * lambda);
        for ((_, p), &expected) in frame.items().iter().zip(&ranks) {
            assert_eq!(p.rank(), expected);
        }
    }
}

#[test]
fn completion_sweep() {
    let mut r = rng(0xf4a3_0002);
    for _ in 0..40 {
        let n = r.random_range(2..=10usize);
        let start = random_starting_frame(&mut r, n);
        let s = frame_operator(&start);
        let lambda_max = spectral_decompose(&s).eigenvalues()[0];

        let (full, lambda) = complete_to_tight(&start, &tol()).unwrap();
        assert_eq!(full.len(), start.len() + 2);
        assert!((lambda - (lambda_max + 1.0)).abs() <= 1e-10);
        let report = frame_bounds(&full, &tol());
        assert!(report.is_tight);
        assert!(report.tightness_ratio <= 1e-8);
    }
}

#[test]
fn low_rank_completion_sweep() {
    let mut r = rng(0xf4a3_0003);
    for _ in 0..40 {
        let n = r.random_range(2..=10usize);
        let k = r.random_range(1..=n / 2);
        let start = random_starting_frame(&mut r, n);
        let (full, _) = complete_to_tight_low_rank(&start, k, &tol()).unwrap();
        let added = &full.items()[start.len()..];
        assert_eq!(added.len(), n.div_ceil(k));
        assert!(added.iter().all(|(_, q)| q.rank() <= k));
        let report = frame_bounds(&full, &tol());
        assert!(report.is_tight);
    }
}

// Completing a generic non-tight frame requires genuinely oblique
// projections: at least one added matrix is non-symmetric.
#[test]
fn completion_must_leave_orthogonal_family() {
    let single = WeightedProjectionFrame::unit_weights(
        3,
        vec![noff_core::Projection::from_matrix(
            nalgebra::DMatrix::from_row_slice(
                3,
                3,
                &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
            ),
            &tol(),
        )
        .unwrap()],
    )
    .unwrap();
    let (full, _) = complete_to_tight(&single, &tol()).unwrap();
    let max_skew = full.items()[1..]
        .iter()
        .map(|(_, q)| (q.matrix() - q.matrix().transpose()).norm())
        .fold(0.0f64, f64::max);
    assert!(max_skew > 1e-6, "completion unexpectedly orthogonal");
}

#[test]
fn random_tight_pairs_classify_without_contradiction() {
    let mut r = rng(0xf4a3_0004);
    for trial in 0..50 {
        let n = r.random_range(2..=8usize);
        let lambda = if n % 2 == 0 {
            // Any multiple >= 1 works in even dimension.
            r.random_range(1.0..5.0)
        } else if trial % 2 == 0 {
            1.0
        } else {
            2.0
        };
        let target = SymmetricOperator::identity(n).unwrap().scaled(lambda);
        let (p1, p2) = synthesize_two_projections(&target, &tol()).unwrap();
        let classification = classify_two_projection_tight(&p1, &p2, &tol())
            .unwrap_or_else(|e| panic!("tight pair contradicted (n={n}, lambda={lambda}): {e}"));
        assert_ne!(classification.case_tag, TightPairCase::NotTight);
        assert!((classification.lambda - lambda).abs() <= 1e-8 * lambda.max(1.0));
    }
}
