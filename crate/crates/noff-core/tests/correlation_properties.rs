//! Simplex-bound validity, its equality characterization, and the
//! equiangular family size bounds.

mod common;

use common::{operator_with_spectrum, rng};
use nalgebra::{DMatrix, DVector};
use noff_core::{
    equiangular_count_bound, equiangularity_check, linear_independence_check, max_correlation,
    scale_trace, simplex_bound, PovmFamily, ScalarField, SymmetricOperator, Tolerance,
};
use rand::Rng;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn random_psd_family(r: &mut rand_chacha::ChaCha8Rng, n: usize, m: usize) -> PovmFamily {
    let items: Vec<SymmetricOperator> = (0..m)
        .map(|_| {
            let mut eigenvalues: Vec<f64> = (0..n).map(|_| r.random_range(0.0..3.0)).collect();
            eigenvalues.sort_by(|a, b| b.partial_cmp(a).unwrap());
            operator_with_spectrum(&eigenvalues, r.random())
        })
        .collect();
    PovmFamily::new(n, items, &tol()).unwrap()
}

#[test]
fn bound_holds_on_random_families() {
    let mut r = rng(0xc0de_0001);
    for _ in 0..100 {
        let n = r.random_range(2..=8usize);
        let m = r.random_range(2..=10usize);
        let family = scale_trace(&random_psd_family(&mut r, n, m)).unwrap();
        let report = simplex_bound(&family, &tol()).unwrap();
        assert!(
            report.max_corr >= report.bound - 1e-12,
            "bound violated: {} < {}",
            report.max_corr,
            report.bound
        );
    }
}

#[test]
fn identity_slices_achieve_equality() {
    for m in [2usize, 3, 5] {
        for n in [2usize, 3, 4] {
            let slice = SymmetricOperator::identity(n).unwrap().scaled(1.0 / m as f64);
            let family = PovmFamily::new(n, vec![slice; m], &tol()).unwrap();
            let report = simplex_bound(&family, &tol()).unwrap();
            assert!(
                (report.max_corr - report.bound).abs() <= 1e-12,
                "equality missed for m={m}, n={n}"
            );
            assert!(report.equality && report.equiangular && report.resolves_identity);
        }
    }
}

#[test]
fn rank_one_bump_breaks_equality() {
    for m in [2usize, 3, 5] {
        for n in [2usize, 3, 4] {
            let slice = SymmetricOperator::identity(n).unwrap().scaled(1.0 / m as f64);
            let mut items = vec![slice; m];
            let direction = DVector::<f64>::from_fn(n, |i, _| (i + 1) as f64).normalize();
            let mut bumped = items[0].matrix().clone();
            bumped.ger(1e-3, &direction, &direction, 1.0);
            items[0] = SymmetricOperator::new(bumped).unwrap();
            let family =
                scale_trace(&PovmFamily::new(n, items, &tol()).unwrap()).unwrap();
            let report = simplex_bound(&family, &tol()).unwrap();
            let margin = report.max_corr - report.bound;
            assert!(
                margin >= 1e-7,
                "perturbed family margin {margin:.3e} too small for m={m}, n={n}"
            );
            assert!(!report.equality);
        }
    }
}

/// Equiangular, equal-norm, pairwise-distinct families resolving the
/// identity, over the reals.
fn equiangular_test_families() -> Vec<(usize, PovmFamily)> {
    let mut families = Vec::new();

    // Orthogonal resolutions of the identity: one rank-1 slice per axis.
    for n in [2usize, 3, 4] {
        let items: Vec<SymmetricOperator> = (0..n)
            .map(|j| {
                let mut m = DMatrix::<f64>::zeros(n, n);
                m[(j, j)] = 1.0;
                SymmetricOperator::new(m).unwrap()
            })
            .collect();
        families.push((n, PovmFamily::new(n, items, &tol()).unwrap()));
    }

    // Three unit vectors at mutual angle 120 degrees in the plane.
    let items: Vec<SymmetricOperator> = (0..3)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
            let u = DVector::from_vec(vec![angle.cos(), angle.sin()]);
            let mut m = DMatrix::<f64>::zeros(2, 2);
            m.ger(2.0 / 3.0, &u, &u, 1.0);
            SymmetricOperator::new(m).unwrap()
        })
        .collect();
    families.push((2, PovmFamily::new(2, items, &tol()).unwrap()));

    // The six icosahedral diagonals: equiangular lines in R^3 with
    // squared cosine 1/5; halving each projector resolves the identity.
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let axes = [
        [0.0, 1.0, phi],
        [0.0, 1.0, -phi],
        [1.0, phi, 0.0],
        [1.0, -phi, 0.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, 1.0],
    ];
    let items: Vec<SymmetricOperator> = axes
        .iter()
        .map(|a| {
            let u = DVector::from_vec(a.to_vec()).normalize();
            let mut m = DMatrix::<f64>::zeros(3, 3);
            m.ger(0.5, &u, &u, 1.0);
            SymmetricOperator::new(m).unwrap()
        })
        .collect();
    families.push((3, PovmFamily::new(3, items, &tol()).unwrap()));

    families
}

#[test]
fn equiangular_families_are_linearly_independent_and_small() {
    for (n, family) in equiangular_test_families() {
        let (flag, common) = equiangularity_check(&family, &tol()).unwrap();
        assert!(flag, "family in R^{n} not equiangular");

        // For an equal-norm equiangular resolution of the identity the
        // common inner product is pinned: beta = (n - m c) / (m (m - 1)).
        let m = family.len() as f64;
        let c = family.items()[0].hs_inner(&family.items()[0]);
        let beta = (n as f64 - m * c) / (m * (m - 1.0));
        assert!(
            (common.unwrap() - beta).abs() <= 1e-12,
            "derived common value {beta} disagrees with measured {:?}",
            common
        );

        let norms: Vec<f64> = family.items().iter().map(|t| t.hs_inner(t)).collect();
        let spread = norms
            .iter()
            .fold(0.0f64, |acc, x| acc.max((x - norms[0]).abs()));
        assert!(spread <= 1e-10, "norms differ by {spread}");

        assert!(family.identity_residual() <= 1e-10);

        for i in 0..family.len() {
            for j in (i + 1)..family.len() {
                let gap =
                    (family.items()[i].matrix() - family.items()[j].matrix()).norm();
                assert!(gap > 1e-6, "members {i} and {j} coincide");
            }
        }

        assert!(linear_independence_check(&family, &tol()));
        assert!(family.len() <= equiangular_count_bound(n, ScalarField::Real));
    }
}

#[test]
fn count_bound_values() {
    assert_eq!(equiangular_count_bound(3, ScalarField::Real), 6);
    assert_eq!(equiangular_count_bound(2, ScalarField::Complex), 4);
    assert_eq!(equiangular_count_bound(5, ScalarField::Real), 15);
    assert_eq!(equiangular_count_bound(5, ScalarField::Complex), 25);
}

// The saturating icosahedral family also certifies simplex-bound equality.
#[test]
fn saturating_family_achieves_equality() {
    let families = equiangular_test_families();
    let (_, icosahedral) = families.last().unwrap();
    let report = simplex_bound(icosahedral, &tol()).unwrap();
    assert!(report.equality);
    let (value, _) = max_correlation(icosahedral).unwrap();
    assert!((value - 0.05).abs() <= 1e-12);
}
