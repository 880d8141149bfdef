//! Shared input generators for the benchmark suite.

use nalgebra::DMatrix;
use noff_core::{haar_orthogonal_matrix, SymmetricOperator};

/// A random positive operator with prescribed rank and nonzero eigenvalues
/// spread over `[1, 10]`, suitable for the single-projection synthesis.
pub fn random_admissible_operator(n: usize, rank: usize, seed: u64) -> SymmetricOperator {
    let q = haar_orthogonal_matrix(n, seed);
    let mut m = DMatrix::<f64>::zeros(n, n);
    for j in 0..rank {
        let lambda = 1.0 + 9.0 * (j as f64 + 0.5) / rank as f64;
        let col = q.column(j).into_owned();
        m.ger(lambda, &col, &col, 1.0);
    }
    SymmetricOperator::new(m).expect("generated operator is symmetric")
}
