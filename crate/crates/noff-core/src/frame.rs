//! Weighted projection frames: frame operator and bounds, tight
//! construction with prescribed ranks, completion to tightness with two
//! (or `ceil(n/k)` bounded-rank) added projections, and the classification
//! of tight two-projection frames.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::spectral::{spectral_decompose, SpectralError, SymmetricOperator, Tolerance};
use crate::synthesis::{
    synthesize_projection, synthesize_two_projections, unit_core_basis, Projection,
    SynthesisError,
};

#[derive(Debug, Error)]
pub enum FrameError {
    #[error("prescribed ranks sum to {total}, cannot cover dimension {dim}")]
    CoverageImpossible { total: usize, dim: usize },
    #[error("rank {rank} exceeds n/2 for dimension {dim}")]
    RankTooLarge { rank: usize, dim: usize },
    #[error("completion requires dimension at least 2, got {dim}")]
    DimensionTooSmall { dim: usize },
    #[error("block rank must be at least 1")]
    ZeroBlockRank,
    #[error("frame items must share dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("weights must be strictly positive, got {value}")]
    WeightNotPositive { value: f64 },
    #[error("a tight pair violated the two-projection classification: {detail}")]
    InternalContradiction { detail: String },
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

impl FrameError {
    pub fn name(&self) -> &'static str {
        match self {
            FrameError::CoverageImpossible { .. } => "CoverageImpossible",
            FrameError::RankTooLarge { .. } => "RankTooLarge",
            FrameError::DimensionTooSmall { .. } => "DimensionTooSmall",
            FrameError::ZeroBlockRank => "ZeroBlockRank",
            FrameError::DimensionMismatch { .. } => "DimensionMismatch",
            FrameError::WeightNotPositive { .. } => "WeightNotPositive",
            FrameError::InternalContradiction { .. } => "InternalContradiction",
            FrameError::Synthesis(e) => e.name(),
            FrameError::Spectral(e) => e.name(),
        }
    }
}

/// A finite weighted family `{(v_i, P_i)}` of projections on R^n.
#[derive(Debug, Clone)]
pub struct WeightedProjectionFrame {
    dim: usize,
    items: Vec<(f64, Projection)>,
}

impl WeightedProjectionFrame {
    pub fn new(dim: usize, items: Vec<(f64, Projection)>) -> Result<Self, FrameError> {
        if dim == 0 {
            return Err(SpectralError::EmptyDimension.into());
        }
        for (weight, p) in &items {
            if !(weight.is_finite() && *weight > 0.0) {
                return Err(FrameError::WeightNotPositive { value: *weight });
            }
            if p.dim() != dim {
                return Err(FrameError::DimensionMismatch {
                    expected: dim,
                    got: p.dim(),
                });
            }
        }
        Ok(WeightedProjectionFrame { dim, items })
    }

    pub fn empty(dim: usize) -> Result<Self, FrameError> {
        Self::new(dim, Vec::new())
    }

    /// Unit-weight frame from a list of projections.
    pub fn unit_weights(dim: usize, projections: Vec<Projection>) -> Result<Self, FrameError> {
        Self::new(dim, projections.into_iter().map(|p| (1.0, p)).collect())
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

    pub fn items(&self) -> &[(f64, Projection)] {
        &self.items
    }

    pub fn extended(&self, extra: Vec<(f64, Projection)>) -> Result<Self, FrameError> {
        let mut items = self.items.clone();
        items.extend(extra);
        Self::new(self.dim, items)
    }
}

/// Frame operator together with its extreme eigenvalues and the derived
/// frame / tightness flags.
#[derive(Debug, Clone)]
pub struct FrameReport {
    pub operator: SymmetricOperator,
    pub lower: f64,
    pub upper: f64,
    pub is_frame: bool,
    pub is_tight: bool,
    /// `B/A - 1`, or infinity when `A <= 0`.
    pub tightness_ratio: f64,
}

/// `S = sum_i v_i^2 P_i^T P_i`; the empty frame gives the zero operator.
pub fn frame_operator(frame: &WeightedProjectionFrame) -> SymmetricOperator {
    let n = frame.dim();
    let mut s = DMatrix::<f64>::zeros(n, n);
    for (weight, p) in frame.items() {
        s += p.ptp().matrix() * (weight * weight);
    }
    SymmetricOperator::new(s).expect("sum of weighted P^T P terms is symmetric")
}

pub fn frame_bounds(frame: &WeightedProjectionFrame, tol: &Tolerance) -> FrameReport {
    let operator = frame_operator(frame);
    let d = spectral_decompose(&operator);
    let upper = d.eigenvalues().first().copied().unwrap_or(0.0);
    let lower = d.eigenvalues().last().copied().unwrap_or(0.0);
    let is_frame = lower > tol.zero_band(upper);
    let tightness_ratio = if lower > 0.0 {
        upper / lower - 1.0
    } else {
        f64::INFINITY
    };
    let is_tight = is_frame && tightness_ratio <= tol.residual_rel;
    FrameReport {
        operator,
        lower,
        upper,
        is_frame,
        is_tight,
        tightness_ratio,
    }
}

/// Build a tight unit-weight frame with prescribed projection ranks.
///
/// Coordinate subspaces are assigned by a round-robin walk over the basis
/// indices, so the union covers all of R^n whenever the ranks sum to at
/// least n. With `S = sum pi_i` and `gamma` the smallest nonzero eigenvalue
/// among the operators `S^{-1} pi_i`, each `(1/gamma) S^{-1} pi_i` has
/// nonzero eigenvalues at least 1 and rank at most n/2, so it factors as
/// `P_i^T P_i`; the frame operator is then `(1/gamma) I`.
pub fn construct_tight_with_ranks(
    n: usize,
    ranks: &[usize],
    tol: &Tolerance,
) -> Result<(WeightedProjectionFrame, f64), FrameError> {
    if n == 0 {
        return Err(SpectralError::EmptyDimension.into());
    }
    for &r in ranks {
        if 2 * r > n {
            return Err(FrameError::RankTooLarge { rank: r, dim: n });
        }
    }
    let total: usize = ranks.iter().sum();
    if total < n {
        return Err(FrameError::CoverageImpossible { total, dim: n });
    }

    // Round-robin windows of consecutive indices modulo n.
    let mut assignments: Vec<Vec<usize>> = Vec::with_capacity(ranks.len());
    let mut cursor = 0usize;
    for &r in ranks {
        let block: Vec<usize> = (0..r).map(|offset| (cursor + offset) % n).collect();
        cursor += r;
        assignments.push(block);
    }

    let mut counts = vec![0usize; n];
    for block in &assignments {
        for &j in block {
            counts[j] += 1;
        }
    }
    let c_max = counts.iter().copied().max().unwrap_or(0);
    let lambda = c_max as f64;

    let mut projections = Vec::with_capacity(ranks.len());
    for block in &assignments {
        let mut diag = vec![0.0f64; n];
        for &j in block {
            diag[j] = lambda / counts[j] as f64;
        }
        let target = SymmetricOperator::diagonal(&diag)?;
        projections.push(synthesize_projection(&target, tol)?);
    }
    let frame = WeightedProjectionFrame::unit_weights(n, projections)?;
    Ok((frame, lambda))
}

/// Append exactly two unit-weight projections making the frame tight, with
/// `lambda = lambda_max(S) + 1`. The residue `lambda I - S` has all
/// eigenvalues at least 1 and smallest exactly 1, so the two-projection
/// factorization applies in every dimension at least 2.
pub fn complete_to_tight(
    frame: &WeightedProjectionFrame,
    tol: &Tolerance,
) -> Result<(WeightedProjectionFrame, f64), FrameError> {
    let n = frame.dim();
    if n < 2 {
        return Err(FrameError::DimensionTooSmall { dim: n });
    }
    let s = frame_operator(frame);
    let d = spectral_decompose(&s);
    let lambda = d.eigenvalues()[0] + 1.0;
    let t = SymmetricOperator::new(DMatrix::identity(n, n) * lambda - s.matrix())?;
    let (p1, p2) = synthesize_two_projections(&t, tol)?;
    let out = frame.extended(vec![(1.0, p1), (1.0, p2)])?;
    Ok((out, lambda))
}

/// Append `ceil(n/k)` unit-weight projections of rank at most `k` making
/// the frame tight, again with `lambda = lambda_max(S) + 1`. The residue is
/// split along contiguous blocks of the eigenbasis of `S` in descending
/// eigenvalue order.
pub fn complete_to_tight_low_rank(
    frame: &WeightedProjectionFrame,
    k: usize,
    tol: &Tolerance,
) -> Result<(WeightedProjectionFrame, f64), FrameError> {
    let n = frame.dim();
    if k == 0 {
        return Err(FrameError::ZeroBlockRank);
    }
    if 2 * k > n {
        return Err(FrameError::RankTooLarge { rank: k, dim: n });
    }
    let s = frame_operator(frame);
    let d = spectral_decompose(&s);
    let lambda = d.eigenvalues()[0] + 1.0;

    let mut added = Vec::new();
    let mut start = 0usize;
    while start < n {
        let stop = (start + k).min(n);
        let mut block = DMatrix::<f64>::zeros(n, n);
        for j in start..stop {
            let value = lambda - d.eigenvalues()[j];
            let q = d.eigenvector(j);
            block.ger(value, &q, &q, 1.0);
        }
        let target = SymmetricOperator::new(block)?;
        added.push((1.0, synthesize_projection(&target, tol)?));
        start = stop;
    }
    let out = frame.extended(added)?;
    Ok((out, lambda))
}

/// Which case of the tight two-projection classification a pair falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TightPairCase {
    /// Ranks both n/2; any `lambda >= 1` can occur.
    EqualRanksHalfN,
    /// Ranks differ, forcing `lambda = 1` and both projections orthogonal.
    UnequalRanksLambdaOne,
    /// Rank sum exceeds n, forcing equal ranks, `lambda = 2`, and equal
    /// cores `W_i ∩ W_i*`.
    StrictSumLambdaTwo,
    NotTight,
}

impl TightPairCase {
    pub fn name(&self) -> &'static str {
        match self {
            TightPairCase::EqualRanksHalfN => "EqualRanksHalfN",
            TightPairCase::UnequalRanksLambdaOne => "UnequalRanksLambdaOne",
            TightPairCase::StrictSumLambdaTwo => "StrictSumLambdaTwo",
            TightPairCase::NotTight => "NotTight",
        }
    }
}

#[derive(Debug, Clone)]
pub struct TwoProjectionClassification {
    pub case_tag: TightPairCase,
    pub lambda: f64,
    pub ranks: (usize, usize),
    /// Dimension of `W_1 ∩ W_1*` (0 when the pair is not tight).
    pub shared_core_dim: usize,
}

const PRINCIPAL_ANGLE_RESIDUAL: f64 = 1e-6;

/// Classify a pair of projections whose `P^T P` sum is (or is not) a
/// multiple of the identity, verifying the structural conclusions that a
/// tight pair must satisfy. A tight pair that fails its case's conclusions
/// raises `InternalContradiction`.
pub fn classify_two_projection_tight(
    p1: &Projection,
    p2: &Projection,
    tol: &Tolerance,
) -> Result<TwoProjectionClassification, FrameError> {
    if p1.dim() != p2.dim() {
        return Err(FrameError::DimensionMismatch {
            expected: p1.dim(),
            got: p2.dim(),
        });
    }
    let n = p1.dim();
    let sum = p1.ptp().matrix() + p2.ptp().matrix();
    let lambda = sum.trace() / n as f64;
    let ranks = (p1.rank(), p2.rank());

    let off_identity = (&sum - DMatrix::identity(n, n) * lambda).norm();
    let tight = lambda > tol.zero_band(lambda)
        && off_identity <= tol.residual_rel * (n as f64).sqrt() * lambda.max(1.0);
    if !tight {
        return Ok(TwoProjectionClassification {
            case_tag: TightPairCase::NotTight,
            lambda,
            ranks,
            shared_core_dim: 0,
        });
    }

    let band = tol.unit_band(lambda);
    let core1 = unit_core_basis(p1, tol);
    let core2 = unit_core_basis(p2, tol);
    let shared_core_dim = core1.ncols();

    let rank_sum = ranks.0 + ranks.1;
    if rank_sum < n {
        return Err(FrameError::InternalContradiction {
            detail: format!(
                "tight pair with rank sum {} below dimension {}",
                rank_sum, n
            ),
        });
    }

    if rank_sum == n {
        if ranks.0 != ranks.1 {
            if (lambda - 1.0).abs() > band {
                return Err(FrameError::InternalContradiction {
                    detail: format!("unequal ranks with lambda = {lambda}, expected 1"),
                });
            }
            if !p1.is_orthogonal(tol) || !p2.is_orthogonal(tol) {
                return Err(FrameError::InternalContradiction {
                    detail: "unequal-rank tight pair with a nonorthogonal member".into(),
                });
            }
            return Ok(TwoProjectionClassification {
                case_tag: TightPairCase::UnequalRanksLambdaOne,
                lambda,
                ranks,
                shared_core_dim,
            });
        }
        if (lambda - 1.0) < -band {
            return Err(FrameError::InternalContradiction {
                detail: format!("equal-rank tight pair with lambda = {lambda} below 1"),
            });
        }
        return Ok(TwoProjectionClassification {
            case_tag: TightPairCase::EqualRanksHalfN,
            lambda,
            ranks,
            shared_core_dim,
        });
    }

    // Rank sum strictly above n.
    if ranks.0 != ranks.1 {
        return Err(FrameError::InternalContradiction {
            detail: format!("rank sum {rank_sum} > {n} with unequal ranks {ranks:?}"),
        });
    }
    if (lambda - 2.0).abs() > band {
        return Err(FrameError::InternalContradiction {
            detail: format!("rank sum above n with lambda = {lambda}, expected 2"),
        });
    }
    if core1.ncols() != core2.ncols() {
        return Err(FrameError::InternalContradiction {
            detail: format!(
                "core dimensions differ: {} vs {}",
                core1.ncols(),
                core2.ncols()
            ),
        });
    }
    let residual = (&core1 * core1.transpose() - &core2 * core2.transpose()).norm();
    if residual > PRINCIPAL_ANGLE_RESIDUAL {
        return Err(FrameError::InternalContradiction {
            detail: format!("cores W∩W* differ, projector residual {residual:.3e}"),
        });
    }
    Ok(TwoProjectionClassification {
        case_tag: TightPairCase::StrictSumLambdaTwo,
        lambda,
        ranks,
        shared_core_dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn oblique_pair() -> (Projection, Projection) {
        let p1 = Projection::from_matrix(
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 0.0]),
            &tol(),
        )
        .unwrap();
        let p2 = Projection::from_matrix(
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 1.0]),
            &tol(),
        )
        .unwrap();
        (p1, p2)
    }

    fn orth(entries: &[f64]) -> Projection {
        let values = entries.to_vec();
        let n = values.len();
        Projection::from_matrix(
            DMatrix::from_fn(n, n, |i, j| if i == j { values[i] } else { 0.0 }),
            &tol(),
        )
        .unwrap()
    }

    #[test]
    fn frame_operator_examples() {
        let resolution = WeightedProjectionFrame::unit_weights(
            2,
            vec![orth(&[1.0, 0.0]), orth(&[0.0, 1.0])],
        )
        .unwrap();
        assert_eq!(
            frame_operator(&resolution).matrix(),
            &DMatrix::identity(2, 2)
        );

        let (p1, _) = oblique_pair();
        let single = WeightedProjectionFrame::unit_weights(2, vec![p1]).unwrap();
        assert_eq!(
            frame_operator(&single).matrix(),
            SymmetricOperator::diagonal(&[2.0, 0.0]).unwrap().matrix()
        );

        let scaled = WeightedProjectionFrame::new(2, vec![(2.0, orth(&[1.0, 0.0]))]).unwrap();
        assert_eq!(
            frame_operator(&scaled).matrix(),
            SymmetricOperator::diagonal(&[4.0, 0.0]).unwrap().matrix()
        );
    }

    #[test]
    fn frame_bounds_flags() {
        let resolution = WeightedProjectionFrame::unit_weights(
            2,
            vec![orth(&[1.0, 0.0]), orth(&[0.0, 1.0])],
        )
        .unwrap();
        let report = frame_bounds(&resolution, &tol());
        assert_eq!((report.lower, report.upper), (1.0, 1.0));
        assert!(report.is_tight && report.is_frame);

        let (p1, _) = oblique_pair();
        let single = WeightedProjectionFrame::unit_weights(2, vec![p1]).unwrap();
        let report = frame_bounds(&single, &tol());
        assert_eq!((report.lower, report.upper), (0.0, 2.0));
        assert!(!report.is_frame);
        assert!(report.tightness_ratio.is_infinite());

        let pair = WeightedProjectionFrame::unit_weights(
            2,
            vec![orth(&[1.0, 1.0]), orth(&[1.0, 0.0])],
        )
        .unwrap();
        let report = frame_bounds(&pair, &tol());
        assert_eq!((report.lower, report.upper), (1.0, 2.0));
        assert!(report.is_frame && !report.is_tight);
    }

    #[test]
    fn tight_with_ranks_worked_case() {
        let (frame, lambda) = construct_tight_with_ranks(2, &[1, 1, 1], &tol()).unwrap();
        assert_eq!(lambda, 2.0);
        assert_eq!(frame.len(), 3);
        let matrices: Vec<&DMatrix<f64>> =
            frame.items().iter().map(|(_, p)| p.matrix()).collect();
        assert_eq!(
            matrices[0],
            &DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0])
        );
        assert_eq!(
            matrices[1],
            &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 1.0])
        );
        assert_eq!(
            matrices[2],
            &DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0])
        );
        let s = frame_operator(&frame);
        assert_eq!(s.matrix(), &(DMatrix::identity(2, 2) * 2.0));
    }

    #[test]
    fn tight_with_ranks_disjoint_cover() {
        let (frame, lambda) = construct_tight_with_ranks(2, &[1, 1], &tol()).unwrap();
        assert_eq!(lambda, 1.0);
        let report = frame_bounds(&frame, &tol());
        assert!(report.is_tight);
    }

    #[test]
    fn tight_with_ranks_errors() {
        assert!(matches!(
            construct_tight_with_ranks(3, &[2], &tol()),
            Err(FrameError::RankTooLarge { .. })
        ));
        assert!(matches!(
            construct_tight_with_ranks(3, &[1, 1], &tol()),
            Err(FrameError::CoverageImpossible { .. })
        ));
    }

    #[test]
    fn complete_to_tight_single_projection() {
        let start =
            WeightedProjectionFrame::unit_weights(2, vec![orth(&[1.0, 0.0])]).unwrap();
        let (full, lambda) = complete_to_tight(&start, &tol()).unwrap();
        assert_eq!(lambda, 2.0);
        assert_eq!(full.len(), 3);
        let added: Vec<&DMatrix<f64>> = full.items()[1..]
            .iter()
            .map(|(_, p)| p.matrix())
            .collect();
        assert_eq!(
            added[0],
            &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 1.0])
        );
        assert_eq!(
            added[1],
            &DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0])
        );
        let s = frame_operator(&full);
        assert!((s.matrix() - DMatrix::identity(2, 2) * 2.0).norm() <= 1e-12);
    }

    #[test]
    fn complete_to_tight_empty_and_already_tight() {
        let empty = WeightedProjectionFrame::empty(2).unwrap();
        let (full, lambda) = complete_to_tight(&empty, &tol()).unwrap();
        assert_eq!(lambda, 1.0);
        let mats: Vec<&DMatrix<f64>> = full.items().iter().map(|(_, p)| p.matrix()).collect();
        assert_eq!(mats[0], orth(&[1.0, 0.0]).matrix());
        assert_eq!(mats[1], orth(&[0.0, 1.0]).matrix());

        let tight_start = WeightedProjectionFrame::unit_weights(
            2,
            vec![orth(&[1.0, 0.0]), orth(&[0.0, 1.0])],
        )
        .unwrap();
        let (full, lambda) = complete_to_tight(&tight_start, &tol()).unwrap();
        assert_eq!(lambda, 2.0);
        let s = frame_operator(&full);
        assert!((s.matrix() - DMatrix::identity(2, 2) * 2.0).norm() <= 1e-12);
    }

    #[test]
    fn complete_to_tight_rejects_dim_one() {
        let tiny = WeightedProjectionFrame::empty(1).unwrap();
        assert!(matches!(
            complete_to_tight(&tiny, &tol()),
            Err(FrameError::DimensionTooSmall { dim: 1 })
        ));
    }

    #[test]
    fn low_rank_completion_counts() {
        let empty = WeightedProjectionFrame::empty(4).unwrap();
        let (full, lambda) = complete_to_tight_low_rank(&empty, 2, &tol()).unwrap();
        assert_eq!(full.len(), 2);
        assert!(full.items().iter().all(|(_, p)| p.rank() <= 2));
        let s = frame_operator(&full);
        assert!((s.matrix() - DMatrix::identity(4, 4) * lambda).norm() <= 1e-10);

        let empty3 = WeightedProjectionFrame::empty(3).unwrap();
        let (full, _) = complete_to_tight_low_rank(&empty3, 1, &tol()).unwrap();
        assert_eq!(full.len(), 3);
        assert!(full.items().iter().all(|(_, p)| p.rank() <= 1));

        assert!(matches!(
            complete_to_tight_low_rank(&empty, 3, &tol()),
            Err(FrameError::RankTooLarge { .. })
        ));
    }

    #[test]
    fn classification_worked_pairs() {
        let c = classify_two_projection_tight(&orth(&[1.0, 0.0]), &orth(&[0.0, 1.0]), &tol())
            .unwrap();
        assert_eq!(c.case_tag, TightPairCase::EqualRanksHalfN);
        assert!((c.lambda - 1.0).abs() < 1e-12);

        let (p1, p2) = oblique_pair();
        let c = classify_two_projection_tight(&p1, &p2, &tol()).unwrap();
        assert_eq!(c.case_tag, TightPairCase::EqualRanksHalfN);
        assert!((c.lambda - 2.0).abs() < 1e-12);
        assert_eq!(c.ranks, (1, 1));

        let id = Projection::identity(2);
        let c = classify_two_projection_tight(&id, &id, &tol()).unwrap();
        assert_eq!(c.case_tag, TightPairCase::StrictSumLambdaTwo);
        assert!((c.lambda - 2.0).abs() < 1e-12);
        assert_eq!(c.shared_core_dim, 2);

        let c = classify_two_projection_tight(&orth(&[1.0, 0.0]), &orth(&[1.0, 0.0]), &tol())
            .unwrap();
        assert_eq!(c.case_tag, TightPairCase::NotTight);
    }

    #[test]
    fn classification_unequal_ranks() {
        // pi + (I - pi) with ranks 1 and 2 in R^3: tight with lambda 1.
        let p1 = orth(&[1.0, 0.0, 0.0]);
        let p2 = orth(&[0.0, 1.0, 1.0]);
        let c = classify_two_projection_tight(&p1, &p2, &tol()).unwrap();
        assert_eq!(c.case_tag, TightPairCase::UnequalRanksLambdaOne);
        assert!((c.lambda - 1.0).abs() < 1e-12);
        assert_eq!(c.ranks, (1, 2));
    }

    #[test]
    fn classification_dimension_mismatch() {
        let p1 = orth(&[1.0, 0.0]);
        let p2 = orth(&[1.0, 0.0, 0.0]);
        assert!(matches!(
            classify_two_projection_tight(&p1, &p2, &tol()),
            Err(FrameError::DimensionMismatch { .. })
        ));
    }
}
