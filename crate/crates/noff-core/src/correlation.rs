//! POVM normalization and correlation analysis: pairwise Hilbert-Schmidt
//! inner products, the simplex lower bound on the maximal correlation with
//! its equality characterization, equiangularity testing, and the size
//! bounds for equiangular families.

use thiserror::Error;

use crate::frame::{frame_bounds, FrameError, WeightedProjectionFrame};
use crate::spectral::{spectral_decompose, SpectralError, SymmetricOperator, Tolerance};

#[derive(Debug, Error)]
pub enum CorrelationError {
    #[error("frame is not tight (tightness ratio {ratio:.3e})")]
    NotTight { ratio: f64 },
    #[error("family trace is not positive (got {trace})")]
    ZeroTrace { trace: f64 },
    #[error("operation needs at least two operators, got {len}")]
    NeedAtLeastTwo { len: usize },
    #[error("family must contain at least one operator")]
    EmptyFamily,
    #[error("operator {index} is not positive semidefinite (eigenvalue {eigenvalue:.3e})")]
    NotPositiveSemidefinite { index: usize, eigenvalue: f64 },
    #[error("family members must share dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

impl CorrelationError {
    pub fn name(&self) -> &'static str {
        match self {
            CorrelationError::NotTight { .. } => "NotTight",
            CorrelationError::ZeroTrace { .. } => "ZeroTrace",
            CorrelationError::NeedAtLeastTwo { .. } => "NeedAtLeastTwo",
            CorrelationError::EmptyFamily => "EmptyFamily",
            CorrelationError::NotPositiveSemidefinite { .. } => "NotPositiveSemidefinite",
            CorrelationError::DimensionMismatch { .. } => "DimensionMismatch",
            CorrelationError::Frame(e) => e.name(),
            CorrelationError::Spectral(e) => e.name(),
        }
    }
}

/// A finite family of positive semidefinite symmetric operators.
#[derive(Debug, Clone)]
pub struct PovmFamily {
    dim: usize,
    items: Vec<SymmetricOperator>,
    trace_total: f64,
}

impl PovmFamily {
    /// Validates positive semidefiniteness of every member (within the
    /// eigenvalue zero band) and caches the total trace.
    pub fn new(
        dim: usize,
        items: Vec<SymmetricOperator>,
        tol: &Tolerance,
    ) -> Result<Self, CorrelationError> {
        if items.is_empty() {
            return Err(CorrelationError::EmptyFamily);
        }
        for (index, op) in items.iter().enumerate() {
            if op.dim() != dim {
                return Err(CorrelationError::DimensionMismatch {
                    expected: dim,
                    got: op.dim(),
                });
            }
            let d = spectral_decompose(op);
            let band = tol.zero_band(d.eigenvalues()[0]);
            let smallest = *d.eigenvalues().last().unwrap();
            if smallest < -band {
                return Err(CorrelationError::NotPositiveSemidefinite {
                    index,
                    eigenvalue: smallest,
                });
            }
        }
        let trace_total = items.iter().map(|op| op.trace()).sum();
        Ok(PovmFamily {
            dim,
            items,
            trace_total,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[SymmetricOperator] {
        &self.items
    }

    pub fn trace_total(&self) -> f64 {
        self.trace_total
    }

    /// `sum_i T_i - I` in Frobenius norm.
    pub fn identity_residual(&self) -> f64 {
        let n = self.dim;
        let mut sum = nalgebra::DMatrix::<f64>::zeros(n, n);
        for op in &self.items {
            sum += op.matrix();
        }
        (sum - nalgebra::DMatrix::identity(n, n)).norm()
    }
}

/// Normalize a tight frame into a POVM: `T_i = v_i^2 P_i^T P_i / lambda`
/// with `lambda` the tight frame bound, so the family sums to the identity.
pub fn povm_from_frame(
    frame: &WeightedProjectionFrame,
    tol: &Tolerance,
) -> Result<PovmFamily, CorrelationError> {
    let report = frame_bounds(frame, tol);
    if !report.is_tight {
        return Err(CorrelationError::NotTight {
            ratio: report.tightness_ratio,
        });
    }
    let lambda = report.operator.trace() / frame.dim() as f64;
    let items: Vec<SymmetricOperator> = frame
        .items()
        .iter()
        .map(|(weight, p)| p.ptp().scaled(weight * weight / lambda))
        .collect();
    PovmFamily::new(frame.dim(), items, tol)
}

/// Rescale so the total trace equals the ambient dimension.
pub fn scale_trace(family: &PovmFamily) -> Result<PovmFamily, CorrelationError> {
    let trace = family.trace_total();
    if !(trace.is_finite() && trace > 0.0) {
        return Err(CorrelationError::ZeroTrace { trace });
    }
    let factor = family.dim() as f64 / trace;
    let items: Vec<SymmetricOperator> =
        family.items().iter().map(|op| op.scaled(factor)).collect();
    let trace_total = items.iter().map(|op| op.trace()).sum();
    Ok(PovmFamily {
        dim: family.dim(),
        items,
        trace_total,
    })
}

/// Largest pairwise inner product `trace(T_i^T T_j)` over unordered pairs,
/// with the 1-based index pair that attains it (ties broken toward the
/// lexicographically smallest pair).
pub fn max_correlation(family: &PovmFamily) -> Result<(f64, (usize, usize)), CorrelationError> {
    let m = family.len();
    if m < 2 {
        return Err(CorrelationError::NeedAtLeastTwo { len: m });
    }
    let mut best = f64::NEG_INFINITY;
    let mut arg = (1usize, 2usize);
    for i in 0..m {
        for j in (i + 1)..m {
            let value = family.items()[i].hs_inner(&family.items()[j]);
            if value > best {
                best = value;
                arg = (i + 1, j + 1);
            }
        }
    }
    Ok((best, arg))
}

/// Result of the simplex-bound evaluation on a trace-normalized family.
#[derive(Debug, Clone)]
pub struct SimplexReport {
    pub max_corr: f64,
    pub bound: f64,
    pub equality: bool,
    pub equiangular: bool,
    pub resolves_identity: bool,
    /// Whether the input needed trace renormalization before evaluation.
    pub rescaled: bool,
}

/// Evaluate `max_{i != j} <T_i, T_j> >= (n - sum_i <T_i, T_i>) / (m(m-1))`.
///
/// The family is trace-normalized first if needed (recorded in the report).
/// Equality is flagged at `rank_rel * max(1, |bound|)`, and the equiangular
/// and identity-resolution properties are computed independently.
pub fn simplex_bound(
    family: &PovmFamily,
    tol: &Tolerance,
) -> Result<SimplexReport, CorrelationError> {
    let m = family.len();
    if m < 2 {
        return Err(CorrelationError::NeedAtLeastTwo { len: m });
    }
    let n = family.dim() as f64;
    let rescaled = (family.trace_total() - n).abs() > tol.rank_rel * n.max(1.0);
    let normalized;
    let family = if rescaled {
        normalized = scale_trace(family)?;
        &normalized
    } else {
        family
    };

    let self_inner: f64 = family.items().iter().map(|op| op.hs_inner(op)).sum();
    let bound = (n - self_inner) / (m as f64 * (m as f64 - 1.0));
    let (max_corr, _) = max_correlation(family)?;
    let equality = (max_corr - bound).abs() <= tol.rank_rel * bound.abs().max(1.0);

    let (equiangular, _) = equiangularity_check(family, tol)?;
    let resolves_identity = family.identity_residual()
        <= tol.residual_rel * (family.dim() as f64).sqrt().max(1.0);

    Ok(SimplexReport {
        max_corr,
        bound,
        equality,
        equiangular,
        resolves_identity,
        rescaled,
    })
}

/// Do all pairwise inner products share one value? Returns the common value
/// (the pairwise mean) when they do.
pub fn equiangularity_check(
    family: &PovmFamily,
    tol: &Tolerance,
) -> Result<(bool, Option<f64>), CorrelationError> {
    let m = family.len();
    if m < 2 {
        return Err(CorrelationError::NeedAtLeastTwo { len: m });
    }
    let mut inners = Vec::with_capacity(m * (m - 1) / 2);
    for i in 0..m {
        for j in (i + 1)..m {
            inners.push(family.items()[i].hs_inner(&family.items()[j]));
        }
    }
    let mean = inners.iter().sum::<f64>() / inners.len() as f64;
    let spread = inners
        .iter()
        .fold(0.0f64, |acc, x| acc.max((x - mean).abs()));
    if spread <= tol.rank_rel * mean.abs().max(1.0) {
        Ok((true, Some(mean)))
    } else {
        Ok((false, None))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarField {
    Real,
    Complex,
}

/// Maximal size of a pairwise-distinct equiangular equal-norm family
/// resolving the identity: `n(n+1)/2` over the reals, `n^2` over the
/// complex numbers.
pub fn equiangular_count_bound(n: usize, field: ScalarField) -> usize {
    match field {
        ScalarField::Real => n * (n + 1) / 2,
        ScalarField::Complex => n * n,
    }
}

/// Linear independence of the family in operator space, decided through
/// the Gram matrix of Hilbert-Schmidt inner products.
pub fn linear_independence_check(family: &PovmFamily, tol: &Tolerance) -> bool {
    let m = family.len();
    let gram = nalgebra::DMatrix::<f64>::from_fn(m, m, |i, j| {
        family.items()[i].hs_inner(&family.items()[j])
    });
    let gram = SymmetricOperator::new(gram).expect("Gram matrix is square and finite");
    let d = spectral_decompose(&gram);
    let largest = d.eigenvalues()[0];
    let smallest = *d.eigenvalues().last().unwrap();
    smallest > tol.rank_rel * largest.max(0.0)
}
