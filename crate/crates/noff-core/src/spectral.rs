//! Symmetric eigendecomposition, numerical rank, and orthonormal completion.
//!
//! Everything downstream (projection synthesis, frame completion, POVM
//! analysis, randomized estimators) is built on the primitives in this
//! module. The eigensolver is a cyclic Jacobi iteration: it is deterministic,
//! accurate to machine precision for the matrix sizes this crate targets
//! (n up to a few hundred), and leaves diagonal input untouched, so
//! constructions seeded from diagonal operators come out bit-exact.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Numerical tolerances used by every operation in the crate.
///
/// `rank_rel` scales the threshold that decides whether an eigenvalue counts
/// as zero; `residual_rel` scales idempotency / reconstruction residual
/// checks and the bands that classify eigenvalues as exactly 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rank_rel: f64,
    pub residual_rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rank_rel: 1e-10,
            residual_rel: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(rank_rel: f64, residual_rel: f64) -> Result<Self, SpectralError> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(rank_rel) || !positive(residual_rel) {
            return Err(SpectralError::InvalidTolerance {
                rank_rel,
                residual_rel,
            });
        }
        Ok(Tolerance {
            rank_rel,
            residual_rel,
        })
    }

    /// Threshold below which an eigenvalue counts as zero, for a spectrum
    /// whose largest eigenvalue is `lambda_max`.
    pub fn zero_band(&self, lambda_max: f64) -> f64 {
        self.rank_rel * lambda_max.abs().max(1.0)
    }

    /// Half-width of the band around the distinguished values 1 and 2 used
    /// by the eigenvalue case analysis.
    pub fn unit_band(&self, lambda_max: f64) -> f64 {
        self.residual_rel * lambda_max.abs().max(1.0)
    }
}

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },
    #[error("dimension must be at least 1")]
    EmptyDimension,
    #[error("matrix contains a non-finite entry")]
    NotFinite,
    #[error("tolerances must be strictly positive (rank_rel={rank_rel}, residual_rel={residual_rel})")]
    InvalidTolerance { rank_rel: f64, residual_rel: f64 },
    #[error("target count {target} exceeds ambient dimension {dim}")]
    TargetTooLarge { target: usize, dim: usize },
    #[error("input vectors are not orthonormal (max deviation {deviation:.3e})")]
    InputNotOrthonormal { deviation: f64 },
    #[error("ran out of pivot directions while completing an orthonormal set")]
    CompletionExhausted,
    #[error("vector has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

impl SpectralError {
    /// Stable machine-readable name of the error variant.
    pub fn name(&self) -> &'static str {
        match self {
            SpectralError::NonSquare { .. } => "NonSquare",
            SpectralError::EmptyDimension => "EmptyDimension",
            SpectralError::NotFinite => "NotFinite",
            SpectralError::InvalidTolerance { .. } => "InvalidTolerance",
            SpectralError::TargetTooLarge { .. } => "TargetTooLarge",
            SpectralError::InputNotOrthonormal { .. } => "InputNotOrthonormal",
            SpectralError::CompletionExhausted => "CompletionExhausted",
            SpectralError::DimensionMismatch { .. } => "DimensionMismatch",
        }
    }
}

/// A real symmetric operator on R^n.
///
/// The constructor symmetrizes its input as `(A + A^T) / 2`, so the stored
/// matrix is exactly symmetric entrywise.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricOperator {
    dim: usize,
    entries: DMatrix<f64>,
}

impl SymmetricOperator {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self, SpectralError> {
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return Err(SpectralError::NonSquare { rows, cols });
        }
        if rows == 0 {
            return Err(SpectralError::EmptyDimension);
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(SpectralError::NotFinite);
        }
        let sym = (&matrix + matrix.transpose()) * 0.5;
        Ok(SymmetricOperator {
            dim: rows,
            entries: sym,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, SpectralError> {
        let n = rows.len();
        if n == 0 {
            return Err(SpectralError::EmptyDimension);
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(SpectralError::NonSquare {
                rows: n,
                cols: rows.iter().map(|r| r.len()).max().unwrap_or(0),
            });
        }
        let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::new(m)
    }

    pub fn diagonal(values: &[f64]) -> Result<Self, SpectralError> {
        if values.is_empty() {
            return Err(SpectralError::EmptyDimension);
        }
        let n = values.len();
        Self::new(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                values[i]
            } else {
                0.0
            }
        }))
    }

    pub fn identity(n: usize) -> Result<Self, SpectralError> {
        if n == 0 {
            return Err(SpectralError::EmptyDimension);
        }
        Ok(SymmetricOperator {
            dim: n,
            entries: DMatrix::identity(n, n),
        })
    }

    pub fn zero(n: usize) -> Result<Self, SpectralError> {
        if n == 0 {
            return Err(SpectralError::EmptyDimension);
        }
        Ok(SymmetricOperator {
            dim: n,
            entries: DMatrix::zeros(n, n),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.norm()
    }

    /// Hilbert-Schmidt inner product `trace(A^T B)`.
    pub fn hs_inner(&self, other: &SymmetricOperator) -> f64 {
        self.entries.dot(&other.entries)
    }

    pub fn scaled(&self, factor: f64) -> SymmetricOperator {
        SymmetricOperator {
            dim: self.dim,
            entries: &self.entries * factor,
        }
    }
}

/// Eigendecomposition of a [`SymmetricOperator`], eigenvalues descending.
///
/// Column `j` of `eigenvectors` pairs with `eigenvalues[j]`. Each column's
/// sign is fixed so its first largest-magnitude entry is positive, which
/// makes the decomposition reproducible for identical input.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
    rank: usize,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, j: usize) -> DVector<f64> {
        self.eigenvectors.column(j).into_owned()
    }

    /// Rank at the default tolerance, fixed at decomposition time.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Reassemble `Q diag(lambda) Q^T`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut scaled = self.eigenvectors.clone();
        for j in 0..n {
            let lambda = self.eigenvalues[j];
            for i in 0..n {
                scaled[(i, j)] *= lambda;
            }
        }
        &scaled * self.eigenvectors.transpose()
    }
}

const MAX_JACOBI_SWEEPS: usize = 64;

/// Cyclic Jacobi eigendecomposition of a symmetric operator.
///
/// Deterministic for identical input: rotations are applied in a fixed
/// (row-cyclic) order, the sorted order is stable, and each eigenvector's
/// sign is normalized. Diagonal matrices are returned untouched apart from
/// sorting.
pub fn spectral_decompose(a: &SymmetricOperator) -> SpectralDecomposition {
    let n = a.dim();
    let mut m = a.matrix().clone();
    let mut q = DMatrix::<f64>::identity(n, n);
    let scale = m.norm();

    if scale > 0.0 {
        for _ in 0..MAX_JACOBI_SWEEPS {
            let mut off = 0.0f64;
            for p in 0..n {
                for r in (p + 1)..n {
                    off += m[(p, r)] * m[(p, r)];
                }
            }
            if (2.0 * off).sqrt() <= 1e-15 * scale {
                break;
            }
            for p in 0..n - 1 {
                for r in p + 1..n {
                    jacobi_rotate(&mut m, &mut q, p, r, scale);
                }
            }
        }
    }

    // Stable descending sort keeps degenerate clusters in sweep order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].partial_cmp(&m[(i, i)]).unwrap());

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = DMatrix::<f64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvalues.push(m[(src, src)]);
        let mut col = q.column(src).into_owned();
        fix_sign(&mut col);
        eigenvectors.set_column(dst, &col);
    }

    let tol = Tolerance::default();
    let rank = rank_of(&eigenvalues, &tol);
    SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        rank,
    }
}

fn jacobi_rotate(m: &mut DMatrix<f64>, q: &mut DMatrix<f64>, p: usize, r: usize, scale: f64) {
    let apr = m[(p, r)];
    if apr.abs() <= 1e-18 * scale {
        m[(p, r)] = 0.0;
        m[(r, p)] = 0.0;
        return;
    }
    let app = m[(p, p)];
    let arr = m[(r, r)];
    let theta = (arr - app) / (2.0 * apr);
    let t = if theta >= 0.0 {
        1.0 / (theta + (1.0 + theta * theta).sqrt())
    } else {
        -1.0 / (-theta + (1.0 + theta * theta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let tau = s / (1.0 + c);

    let n = m.nrows();
    m[(p, p)] = app - t * apr;
    m[(r, r)] = arr + t * apr;
    m[(p, r)] = 0.0;
    m[(r, p)] = 0.0;
    for k in 0..n {
        if k != p && k != r {
            let mkp = m[(k, p)];
            let mkr = m[(k, r)];
            m[(k, p)] = mkp - s * (mkr + tau * mkp);
            m[(p, k)] = m[(k, p)];
            m[(k, r)] = mkr + s * (mkp - tau * mkr);
            m[(r, k)] = m[(k, r)];
        }
    }
    for k in 0..n {
        let qkp = q[(k, p)];
        let qkr = q[(k, r)];
        q[(k, p)] = qkp - s * (qkr + tau * qkp);
        q[(k, r)] = qkr + s * (qkp - tau * qkr);
    }
}

/// Flip the vector so its first entry of maximal magnitude is positive.
fn fix_sign(v: &mut DVector<f64>) {
    let mut best = 0usize;
    let mut best_abs = 0.0f64;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > best_abs {
            best_abs = x.abs();
            best = i;
        }
    }
    if v[best] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

fn rank_of(eigenvalues: &[f64], tol: &Tolerance) -> usize {
    let lambda_max = eigenvalues.first().copied().unwrap_or(0.0);
    let threshold = tol.rank_rel * lambda_max.max(1.0);
    eigenvalues.iter().filter(|l| l.abs() > threshold).count()
}

/// Count of eigenvalues above the rank threshold `rank_rel * max(1, lambda_1)`.
pub fn numerical_rank(d: &SpectralDecomposition, tol: &Tolerance) -> usize {
    rank_of(d.eigenvalues(), tol)
}

const COMPLETION_RESIDUAL_MIN: f64 = 1e-8;
const ORTHONORMAL_INPUT_TOL: f64 = 1e-10;

/// Extend an orthonormal set to `target_count` vectors.
///
/// New directions are produced by Gram-Schmidt against the standard basis
/// vectors taken in index order, skipping any whose residual norm falls
/// below 1e-8; each accepted vector's first largest-magnitude entry is made
/// positive. An input that already reaches `target_count` is returned
/// unchanged.
pub fn complete_orthonormal(
    dim: usize,
    partial: &[DVector<f64>],
    target_count: usize,
) -> Result<Vec<DVector<f64>>, SpectralError> {
    if dim == 0 {
        return Err(SpectralError::EmptyDimension);
    }
    if target_count > dim {
        return Err(SpectralError::TargetTooLarge {
            target: target_count,
            dim,
        });
    }
    for v in partial {
        if v.len() != dim {
            return Err(SpectralError::DimensionMismatch {
                expected: dim,
                got: v.len(),
            });
        }
    }
    let deviation = orthonormality_deviation(partial);
    if deviation > ORTHONORMAL_INPUT_TOL {
        return Err(SpectralError::InputNotOrthonormal { deviation });
    }

    let mut result: Vec<DVector<f64>> = partial.to_vec();
    if result.len() >= target_count {
        return Ok(result);
    }

    for b in 0..dim {
        if result.len() == target_count {
            break;
        }
        let mut w = DVector::<f64>::zeros(dim);
        w[b] = 1.0;
        // Two Gram-Schmidt passes keep the accumulated set orthonormal to
        // machine precision.
        for _ in 0..2 {
            for u in &result {
                let coeff = u.dot(&w);
                w.axpy(-coeff, u, 1.0);
            }
        }
        let norm = w.norm();
        if norm < COMPLETION_RESIDUAL_MIN {
            continue;
        }
        w /= norm;
        fix_sign(&mut w);
        result.push(w);
    }

    if result.len() < target_count {
        return Err(SpectralError::CompletionExhausted);
    }
    Ok(result)
}

fn orthonormality_deviation(vectors: &[DVector<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for (i, u) in vectors.iter().enumerate() {
        for (j, v) in vectors.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((u.dot(v) - target).abs());
        }
    }
    worst
}

/// Idempotency check: returns `(flag, ||M^2 - M||_F)` with
/// `flag <=> residual <= residual_rel * max(1, ||M||_F)`.
pub fn is_projection(m: &DMatrix<f64>, tol: &Tolerance) -> (bool, f64) {
    assert_eq!(m.nrows(), m.ncols(), "is_projection needs a square matrix");
    let residual = (m * m - m).norm();
    let flag = residual <= tol.residual_rel * m.norm().max(1.0);
    (flag, residual)
}
