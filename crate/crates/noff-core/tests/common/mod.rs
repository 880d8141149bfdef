//! Seeded input generators shared by the integration tests.

use nalgebra::DMatrix;
use noff_core::{haar_orthogonal_matrix, SymmetricOperator};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Symmetric PSD operator with the given eigenvalues in a Haar-random basis.
#[allow(dead_code)]
pub fn operator_with_spectrum(eigenvalues: &[f64], seed: u64) -> SymmetricOperator {
    let n = eigenvalues.len();
    let q = haar_orthogonal_matrix(n, seed);
    let mut m = DMatrix::<f64>::zeros(n, n);
    for (j, &lambda) in eigenvalues.iter().enumerate() {
        if lambda != 0.0 {
            let col = q.column(j).into_owned();
            m.ger(lambda, &col, &col, 1.0);
        }
    }
    SymmetricOperator::new(m).expect("spectral synthesis is symmetric")
}

/// Random operator with rank at most n/2 and nonzero eigenvalues in [1, 10].
#[allow(dead_code)]
pub fn random_low_rank_admissible(r: &mut ChaCha8Rng, n: usize) -> SymmetricOperator {
    let rank = r.random_range(1..=n / 2);
    let mut eigenvalues = vec![0.0f64; n];
    for value in eigenvalues.iter_mut().take(rank) {
        *value = r.random_range(1.0..10.0);
    }
    eigenvalues.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let seed = r.random::<u64>();
    operator_with_spectrum(&eigenvalues, seed)
}
