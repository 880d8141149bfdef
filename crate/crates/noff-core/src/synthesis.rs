//! Construction of oblique projections realizing a prescribed positive
//! operator as `P^T P`, together with the feasibility tests and the
//! eigenvalue case analysis that drive them.
//!
//! The central construction takes the nonzero eigenpairs `(lambda_j, e_j)`
//! of the target operator plus one auxiliary unit vector per pair, all
//! orthonormal together, and forms
//!
//! ```text
//! P = sum_j (e_j + sqrt(lambda_j - 1) * a_j) e_j^T
//! ```
//!
//! which is idempotent with `P^T P = sum_j lambda_j e_j e_j^T` by direct
//! multiplication. Everything else in this module is dispatch: splitting
//! off unit eigenspaces, scaling by the smallest nonzero eigenvalue, and
//! partitioning spectra so each piece satisfies the rank and eigenvalue
//! hypotheses of that formula.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::spectral::{
    complete_orthonormal, is_projection, spectral_decompose, SpectralDecomposition,
    SpectralError, SymmetricOperator, Tolerance,
};

#[derive(Debug, Error)]
pub enum SynthesisError {
    #[error("operator has a negative eigenvalue {eigenvalue:.6e}")]
    NotPositive { eigenvalue: f64 },
    #[error("rank {rank} exceeds n/2 for dimension {dim}; use the two- or three-projection constructions")]
    RankTooLarge { rank: usize, dim: usize },
    #[error("nonzero eigenvalue {eigenvalue:.6e} lies below 1")]
    EigenvalueBelowOne { eigenvalue: f64 },
    #[error("matrix is not idempotent (residual {residual:.3e})")]
    NotIdempotent { residual: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operator admits no single-projection factorization: {reason:?}")]
    Infeasible { reason: FeasibilityReason },
    #[error("operator is zero")]
    ZeroOperator,
    #[error("weighted factorization infeasible: too many eigenvalues above the smallest nonzero one")]
    InfeasibleWeighted,
    #[error("no two-projection factorization is known for this spectrum")]
    NotConstructible,
    #[error("image rank {image} and coimage rank {coimage} disagree")]
    RankInconsistent { image: usize, coimage: usize },
    #[error("kernel meets image: stacked basis is rank deficient (min Gram eigenvalue {gram_min:.3e})")]
    KernelMeetsImage { gram_min: f64 },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

impl SynthesisError {
    pub fn name(&self) -> &'static str {
        match self {
            SynthesisError::NotPositive { .. } => "NotPositive",
            SynthesisError::RankTooLarge { .. } => "RankTooLarge",
            SynthesisError::EigenvalueBelowOne { .. } => "EigenvalueBelowOne",
            SynthesisError::NotIdempotent { .. } => "NotIdempotent",
            SynthesisError::DimensionMismatch { .. } => "DimensionMismatch",
            SynthesisError::Infeasible { .. } => "Infeasible",
            SynthesisError::ZeroOperator => "ZeroOperator",
            SynthesisError::InfeasibleWeighted => "InfeasibleWeighted",
            SynthesisError::NotConstructible => "NotConstructible",
            SynthesisError::RankInconsistent { .. } => "RankInconsistent",
            SynthesisError::KernelMeetsImage { .. } => "KernelMeetsImage",
            SynthesisError::Spectral(e) => e.name(),
        }
    }
}

/// An idempotent operator on R^n with its subspace data.
///
/// `image_basis` spans `W = im(P)`, `coimage_basis` spans `W* = im(P^T)`,
/// and `kernel_basis` spans `ker(P) = (W*)^perp`. All three are orthonormal
/// column blocks; `W` and `W*` always have equal dimension `rank`, and the
/// stacked block `[kernel | image]` has full column rank, so `P` is the
/// projection onto `W` along `ker(P)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    dim: usize,
    matrix: DMatrix<f64>,
    rank: usize,
    image_basis: DMatrix<f64>,
    coimage_basis: DMatrix<f64>,
    kernel_basis: DMatrix<f64>,
}

impl Projection {
    /// Validate an arbitrary square matrix as a projection and extract its
    /// subspace bases from the spectra of `P^T P` and `P P^T`.
    pub fn from_matrix(matrix: DMatrix<f64>, tol: &Tolerance) -> Result<Self, SynthesisError> {
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return Err(SpectralError::NonSquare { rows, cols }.into());
        }
        if rows == 0 {
            return Err(SpectralError::EmptyDimension.into());
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(SpectralError::NotFinite.into());
        }
        let (idempotent, residual) = is_projection(&matrix, tol);
        if !idempotent {
            return Err(SynthesisError::NotIdempotent { residual });
        }
        let n = rows;

        let ptp = SymmetricOperator::new(matrix.transpose() * &matrix)?;
        let dp = spectral_decompose(&ptp);
        let band = tol.zero_band(dp.eigenvalues().first().copied().unwrap_or(0.0));
        let coimage_count = dp.eigenvalues().iter().filter(|&&l| l > band).count();

        let ppt = SymmetricOperator::new(&matrix * matrix.transpose())?;
        let dq = spectral_decompose(&ppt);
        let image_count = dq.eigenvalues().iter().filter(|&&l| l > band).count();

        if image_count != coimage_count {
            return Err(SynthesisError::RankInconsistent {
                image: image_count,
                coimage: coimage_count,
            });
        }
        let rank = image_count;

        let coimage_basis = dp.eigenvectors().columns(0, rank).into_owned();
        let kernel_basis = dp.eigenvectors().columns(rank, n - rank).into_owned();
        let image_basis = dq.eigenvectors().columns(0, rank).into_owned();

        // Transversality of ker(P) and im(P): the stacked basis must have
        // full column rank.
        let mut stacked = DMatrix::<f64>::zeros(n, n);
        stacked.columns_mut(0, n - rank).copy_from(&kernel_basis);
        stacked.columns_mut(n - rank, rank).copy_from(&image_basis);
        let gram = SymmetricOperator::new(stacked.transpose() * &stacked)?;
        let dg = spectral_decompose(&gram);
        let gram_min = dg.eigenvalues().last().copied().unwrap_or(0.0);
        if gram_min <= tol.rank_rel {
            return Err(SynthesisError::KernelMeetsImage { gram_min });
        }

        Ok(Projection {
            dim: n,
            matrix,
            rank,
            image_basis,
            coimage_basis,
            kernel_basis,
        })
    }

    /// The rank-0 projection (the zero matrix is idempotent).
    pub fn zero(n: usize) -> Projection {
        Projection {
            dim: n,
            matrix: DMatrix::zeros(n, n),
            rank: 0,
            image_basis: DMatrix::zeros(n, 0),
            coimage_basis: DMatrix::zeros(n, 0),
            kernel_basis: DMatrix::identity(n, n),
        }
    }

    pub fn identity(n: usize) -> Projection {
        Projection {
            dim: n,
            matrix: DMatrix::identity(n, n),
            rank: n,
            image_basis: DMatrix::identity(n, n),
            coimage_basis: DMatrix::identity(n, n),
            kernel_basis: DMatrix::zeros(n, 0),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn image_basis(&self) -> &DMatrix<f64> {
        &self.image_basis
    }

    pub fn coimage_basis(&self) -> &DMatrix<f64> {
        &self.coimage_basis
    }

    pub fn kernel_basis(&self) -> &DMatrix<f64> {
        &self.kernel_basis
    }

    /// `P^T P`, exactly symmetric entrywise.
    pub fn ptp(&self) -> SymmetricOperator {
        SymmetricOperator::new(self.matrix.transpose() * &self.matrix)
            .expect("P^T P of a valid projection is a well-formed symmetric operator")
    }

    pub fn is_orthogonal(&self, tol: &Tolerance) -> bool {
        let skew = (&self.matrix - self.matrix.transpose()).norm();
        skew <= tol.residual_rel * self.matrix.norm().max(1.0)
    }

    /// Squared Hilbert-Schmidt norm `||P||_HS^2 = trace(P^T P)`.
    pub fn hs_norm_sq(&self) -> f64 {
        self.matrix.iter().map(|x| x * x).sum()
    }
}

/// Eigenvalue case analysis of a symmetric spectrum, with tolerance bands.
///
/// Indices refer to positions in the descending eigenvalue order. An
/// eigenvalue counts as zero below `zero_band`, as 1 (or 2) within
/// `unit_band` of that value, and the remaining positive ones split at 1.
#[derive(Debug, Clone)]
pub(crate) struct SpectrumClasses {
    pub negative: Vec<usize>,
    pub zero: Vec<usize>,
    pub below_one: Vec<usize>,
    pub eq_one: Vec<usize>,
    pub gt_one: Vec<usize>,
    pub eq_two: Vec<usize>,
    pub zero_band: f64,
    pub unit_band: f64,
}

impl SpectrumClasses {
    pub fn nonzero_count(&self) -> usize {
        self.below_one.len() + self.eq_one.len() + self.gt_one.len()
    }
}

pub(crate) fn classify_spectrum(eigenvalues: &[f64], tol: &Tolerance) -> SpectrumClasses {
    let lambda_max = eigenvalues.first().copied().unwrap_or(0.0);
    let zero_band = tol.zero_band(lambda_max);
    let unit_band = tol.unit_band(lambda_max);
    let mut classes = SpectrumClasses {
        negative: Vec::new(),
        zero: Vec::new(),
        below_one: Vec::new(),
        eq_one: Vec::new(),
        gt_one: Vec::new(),
        eq_two: Vec::new(),
        zero_band,
        unit_band,
    };
    for (j, &l) in eigenvalues.iter().enumerate() {
        if l < -zero_band {
            classes.negative.push(j);
        } else if l <= zero_band {
            classes.zero.push(j);
        } else if l < 1.0 - unit_band {
            classes.below_one.push(j);
        } else if l <= 1.0 + unit_band {
            classes.eq_one.push(j);
        } else {
            classes.gt_one.push(j);
        }
        if (l - 2.0).abs() <= unit_band {
            classes.eq_two.push(j);
        }
    }
    classes
}

/// Assemble `sum_j (e_j + sqrt(lambda_j - 1) a_j) e_j^T` and validate it.
///
/// Eigenvalues within `unit_band` of 1 are snapped to exactly 1: the
/// square root would otherwise turn eigenvalue noise of size eps into an
/// auxiliary component of size sqrt(eps).
fn member_from_triples(
    n: usize,
    triples: &[(f64, DVector<f64>, DVector<f64>)],
    unit_band: f64,
    tol: &Tolerance,
) -> Result<Projection, SynthesisError> {
    if triples.is_empty() {
        return Ok(Projection::zero(n));
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    for (lambda, e, a) in triples {
        let excess = lambda - 1.0;
        let c = if excess <= unit_band { 0.0 } else { excess.sqrt() };
        let w = e + a * c;
        m.ger(1.0, &w, e, 1.0);
    }
    Projection::from_matrix(m, tol)
}

/// Build a factor from eigenpairs at `member_idx`, drawing auxiliary
/// directions from the eigenvectors at `aux_pool` in order.
fn member_from_eigen(
    d: &SpectralDecomposition,
    member_idx: &[usize],
    aux_pool: &[usize],
    classes: &SpectrumClasses,
    tol: &Tolerance,
) -> Result<Projection, SynthesisError> {
    let n = d.dim();
    let mut triples = Vec::new();
    let mut slot = 0usize;
    for &j in member_idx {
        let lambda = d.eigenvalues()[j];
        if lambda <= classes.zero_band {
            continue;
        }
        assert!(
            slot < aux_pool.len(),
            "auxiliary pool exhausted: rank exceeds available directions"
        );
        triples.push((lambda, d.eigenvector(j), d.eigenvector(aux_pool[slot])));
        slot += 1;
    }
    member_from_triples(n, &triples, classes.unit_band, tol)
}

fn check_positive(classes: &SpectrumClasses, d: &SpectralDecomposition) -> Result<(), SynthesisError> {
    if let Some(&j) = classes.negative.last() {
        return Err(SynthesisError::NotPositive {
            eigenvalue: d.eigenvalues()[j],
        });
    }
    Ok(())
}

fn check_all_at_least_one(
    classes: &SpectrumClasses,
    d: &SpectralDecomposition,
) -> Result<(), SynthesisError> {
    if let Some(&j) = classes.below_one.first() {
        return Err(SynthesisError::EigenvalueBelowOne {
            eigenvalue: d.eigenvalues()[j],
        });
    }
    Ok(())
}

/// Factor a positive operator of rank at most n/2 with nonzero eigenvalues
/// at least 1 as `T = P^T P`, using the deterministic orthonormal
/// completion for the auxiliary directions.
pub fn synthesize_projection(
    t: &SymmetricOperator,
    tol: &Tolerance,
) -> Result<Projection, SynthesisError> {
    let d = spectral_decompose(t);
    let classes = classify_spectrum(d.eigenvalues(), tol);
    check_positive(&classes, &d)?;
    let k = classes.nonzero_count();
    let n = t.dim();
    if 2 * k > n {
        return Err(SynthesisError::RankTooLarge { rank: k, dim: n });
    }
    check_all_at_least_one(&classes, &d)?;

    let partial: Vec<DVector<f64>> = (0..k).map(|j| d.eigenvector(j)).collect();
    let extended = complete_orthonormal(n, &partial, 2 * k)?;
    let triples: Vec<(f64, DVector<f64>, DVector<f64>)> = (0..k)
        .map(|j| (d.eigenvalues()[j], extended[j].clone(), extended[k + j].clone()))
        .collect();
    member_from_triples(n, &triples, classes.unit_band, tol)
}

/// Draw orthonormal vectors inside the orthogonal complement of `existing`.
pub(crate) fn gaussian_complement_extension<R: Rng>(
    rng: &mut R,
    n: usize,
    count: usize,
    existing: &[DVector<f64>],
) -> Vec<DVector<f64>> {
    let mut accepted: Vec<DVector<f64>> = Vec::with_capacity(count);
    while accepted.len() < count {
        let mut w = DVector::<f64>::from_fn(n, |_, _| rng.sample(StandardNormal));
        for _ in 0..2 {
            for u in existing.iter().chain(accepted.iter()) {
                let coeff = u.dot(&w);
                w.axpy(-coeff, u, 1.0);
            }
        }
        let norm = w.norm();
        if norm < 1e-8 {
            continue;
        }
        w /= norm;
        accepted.push(w);
    }
    accepted
}

/// Like [`synthesize_projection`], but the auxiliary orthonormal set is a
/// seeded Haar-random draw inside `im(T)^perp`, exercising the full family
/// of valid factorizations rather than a single canonical one.
pub fn sample_omega_member(
    t: &SymmetricOperator,
    seed: u64,
    tol: &Tolerance,
) -> Result<Projection, SynthesisError> {
    let d = spectral_decompose(t);
    let classes = classify_spectrum(d.eigenvalues(), tol);
    check_positive(&classes, &d)?;
    let k = classes.nonzero_count();
    let n = t.dim();
    if 2 * k > n {
        return Err(SynthesisError::RankTooLarge { rank: k, dim: n });
    }
    check_all_at_least_one(&classes, &d)?;

    // The random auxiliary set must avoid all of im(T), not only the first
    // k eigendirections.
    let full_basis: Vec<DVector<f64>> = (0..k).map(|j| d.eigenvector(j)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let aux = gaussian_complement_extension(&mut rng, n, k, &full_basis);
    let triples: Vec<(f64, DVector<f64>, DVector<f64>)> = (0..k)
        .map(|j| (d.eigenvalues()[j], d.eigenvector(j), aux[j].clone()))
        .collect();
    member_from_triples(n, &triples, classes.unit_band, tol)
}

/// Does `P^T P` reproduce `T` within tolerance?
pub fn omega_membership(
    p: &Projection,
    t: &SymmetricOperator,
    tol: &Tolerance,
) -> Result<bool, SynthesisError> {
    if p.dim() != t.dim() {
        return Err(SynthesisError::DimensionMismatch {
            expected: t.dim(),
            got: p.dim(),
        });
    }
    let (idempotent, _) = is_projection(p.matrix(), tol);
    let residual = (p.ptp().matrix() - t.matrix()).norm();
    Ok(idempotent && residual <= tol.residual_rel * t.frobenius_norm().max(1.0))
}

/// Split `P = P' + pi` where `pi` is the orthogonal projection onto
/// `W ∩ W*` (the unit eigenspace of `P^T P`) and every nonzero eigenvalue
/// of `P'^T P'` is strictly greater than 1.
pub fn split_unit_eigenspace(p: &Projection) -> (Projection, Projection) {
    let tol = Tolerance::default();
    let n = p.dim();
    let d = spectral_decompose(&p.ptp());
    let classes = classify_spectrum(d.eigenvalues(), &tol);

    let mut pi = DMatrix::<f64>::zeros(n, n);
    for &j in &classes.eq_one {
        let q = d.eigenvector(j);
        pi.ger(1.0, &q, &q, 1.0);
    }
    let prime = p.matrix() - &pi;
    // An eigenvalue sitting at 1 + eps inside the unit band leaves a
    // residual of order sqrt(eps) in the split; validate at that scale.
    let relaxed = Tolerance::new(
        tol.rank_rel,
        tol.residual_rel.max(4.0 * classes.unit_band.sqrt()),
    )
    .expect("relaxed tolerance is positive");
    let p_prime = Projection::from_matrix(prime, &relaxed)
        .expect("removing the unit eigenspace of a valid projection yields a projection");
    let pi_unit = Projection::from_matrix(pi, &relaxed)
        .expect("the unit-eigenspace projector is an orthogonal projection");
    (p_prime, pi_unit)
}

/// Why a spectrum does or does not admit a single-projection factorization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeasibilityReason {
    Feasible,
    EigenvalueBelowOne,
    CountConditionViolated,
}

/// Outcome of the rank-dichotomy test: counts of eigenvalues above 1,
/// equal to 1, and equal to 0, under the tolerance bands.
#[derive(Debug, Clone)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub count_above_one: usize,
    pub count_unit: usize,
    pub count_zero: usize,
    pub reason: FeasibilityReason,
}

/// Decide whether `T = P^T P` is solvable for any rank: all nonzero
/// eigenvalues must be >= 1 and the eigenvalues above 1 must not outnumber
/// the zero ones.
pub fn feasibility_high_rank(
    t: &SymmetricOperator,
    tol: &Tolerance,
) -> Result<FeasibilityReport, SynthesisError> {
    let d = spectral_decompose(t);
    let classes = classify_spectrum(d.eigenvalues(), tol);
    check_positive(&classes, &d)?;

    let count_above_one = classes.gt_one.len();
    let count_unit = classes.eq_one.len();
    let count_zero = classes.zero.len();
    let (feasible, reason) = if !classes.below_one.is_empty() {
        (false, FeasibilityReason::EigenvalueBelowOne)
    } else if count_above_one > count_zero {
        (false, FeasibilityReason::CountConditionViolated)
    } else {
        (true, FeasibilityReason::Feasible)
    };
    Ok(FeasibilityReport {
        feasible,
        count_above_one,
        count_unit,
        count_zero,
        reason,
    })
}

/// Factor a feasible operator of any rank as `T = P^T P`: the part of the
/// spectrum above 1 is handled by the low-rank construction with auxiliary
/// directions drawn from the zero eigenspace, and the unit eigenspace is
/// added back as an orthogonal projection.
pub fn synthesize_single_high_rank(
    t: &SymmetricOperator,
    tol: &Tolerance,
) -> Result<Projection, SynthesisError> {
    let report = feasibility_high_rank(t, tol)?;
    if !report.feasible {
        return Err(SynthesisError::Infeasible {
            reason: report.reason,
        });
    }
    let d = spectral_decompose(t);
    let classes = classify_spectrum(d.eigenvalues(), tol);
    let n = t.dim();

    let p_prime = member_from_eigen(&d, &classes.gt_one, &classes.zero, &classes, tol)?;
    let mut m = p_prime.matrix().clone();
    for &j in &classes.eq_one {
        let q = d.eigenvector(j);
        m.ger(1.0, &q, &q, 1.0);
    }
    let _ = n;
    Projection::from_matrix(m, tol)
}

/// Factor `T = v^2 P^T P` with `v` the square root of the smallest nonzero
/// eigenvalue.
pub fn synthesize_weighted(
    t: &SymmetricOperator,
    tol: &Tolerance,
) -> Result<(f64, Projection), SynthesisError> {
    let d = spectral_decompose(t);
    let classes = classify_spectrum(d.eigenvalues(), tol);
    check_positive(&classes, &d)?;
    let rank = classes.nonzero_count();
    if rank == 0 {
        return Err(SynthesisError::ZeroOperator);
    }
    let n = t.dim();
    let lambda_k = d.eigenvalues()[rank - 1];
    let v = lambda_k.sqrt();
    let scaled = t.scaled(1.0 / lambda_k);

    let p = if 2 * rank <= n {
        synthesize_projection(&scaled, tol)?
    } else {
        let report = feasibility_high_rank(&scaled, tol)?;
        if !report.feasible {
            return Err(SynthesisError::InfeasibleWeighted);
        }
        synthesize_single_high_rank(&scaled, tol)?
    };
    Ok((v, p))
}

/// Factor `T = P1^T P1 + P2^T P2` for a positive operator with nonzero
/// eigenvalues at least 1, provided `n` is even or the spectrum contains
/// one of the values 0, 1, 2.
pub fn synthesize_two_projections(
    t: &SymmetricOperator,
    tol: &Tolerance,
) -> Result<(Projection, Projection), SynthesisError> {
    let d = spectral_decompose(t);
    let classes = classify_spectrum(d.eigenvalues(), tol);
    check_positive(&classes, &d)?;
    check_all_at_least_one(&classes, &d)?;
    let n = t.dim();

    if n.is_multiple_of(2) {
        let half = n / 2;
        let first: Vec<usize> = (0..half).collect();
        let second: Vec<usize> = (half..n).collect();
        let p1 = member_from_eigen(&d, &first, &second, &classes, tol)?;
        let p2 = member_from_eigen(&d, &second, &first, &classes, tol)?;
        return Ok((p1, p2));
    }

    let h = (n - 1) / 2;
    if !classes.zero.is_empty() {
        // The smallest eigenvalue is zero; the remaining even-dimensional
        // block splits in half.
        let first: Vec<usize> = (0..h).collect();
        let second: Vec<usize> = (h..n - 1).collect();
        let mut pool1: Vec<usize> = second.clone();
        pool1.push(n - 1);
        let mut pool2: Vec<usize> = first.clone();
        pool2.push(n - 1);
        let p1 = member_from_eigen(&d, &first, &pool1, &classes, tol)?;
        let p2 = member_from_eigen(&d, &second, &pool2, &classes, tol)?;
        return Ok((p1, p2));
    }
    if !classes.eq_one.is_empty() {
        // All eigenvalues >= 1 and one equals 1, so the smallest does; split
        // the rest and absorb the unit direction into the second factor.
        let first: Vec<usize> = (0..h).collect();
        let second: Vec<usize> = (h..n - 1).collect();
        let p1 = member_from_eigen(&d, &first, &second, &classes, tol)?;
        let p2 = member_from_eigen(&d, &second, &first, &classes, tol)?;
        let unit = d.eigenvector(n - 1);
        let mut q = p2.matrix().clone();
        q.ger(1.0, &unit, &unit, 1.0);
        let p2 = Projection::from_matrix(q, tol)?;
        return Ok((p1, p2));
    }
    if let Some(&reserved) = classes.eq_two.last() {
        // An eigenvalue equal to 2 contributes its rank-one projector to
        // both factors.
        let rest: Vec<usize> = (0..n).filter(|&j| j != reserved).collect();
        let first: Vec<usize> = rest[0..h].to_vec();
        let second: Vec<usize> = rest[h..].to_vec();
        let pi = {
            let q = d.eigenvector(reserved);
            let mut m = DMatrix::<f64>::zeros(n, n);
            m.ger(1.0, &q, &q, 1.0);
            m
        };
        let p1 = member_from_eigen(&d, &first, &second, &classes, tol)?;
        let p2 = member_from_eigen(&d, &second, &first, &classes, tol)?;
        let q1 = Projection::from_matrix(p1.matrix() + &pi, tol)?;
        let q2 = Projection::from_matrix(p2.matrix() + &pi, tol)?;
        return Ok((q1, q2));
    }
    Err(SynthesisError::NotConstructible)
}

/// Factor `T = v^2 (P1^T P1 + P2^T P2)` for any nonzero positive operator.
/// Rescaling by the smallest nonzero eigenvalue plants an eigenvalue
/// exactly 1, so the two-projection construction always applies; when the
/// rank is at most n/2 a single projection suffices and `P2` is zero.
pub fn synthesize_two_weighted(
    t: &SymmetricOperator,
    tol: &Tolerance,
) -> Result<(f64, Projection, Projection), SynthesisError> {
    let d = spectral_decompose(t);
    let classes = classify_spectrum(d.eigenvalues(), tol);
    check_positive(&classes, &d)?;
    let rank = classes.nonzero_count();
    if rank == 0 {
        return Err(SynthesisError::ZeroOperator);
    }
    let n = t.dim();
    let lambda_k = d.eigenvalues()[rank - 1];
    let v = lambda_k.sqrt();
    let scaled = t.scaled(1.0 / lambda_k);

    if 2 * rank <= n {
        let p = synthesize_projection(&scaled, tol)?;
        return Ok((v, p, Projection::zero(n)));
    }
    let (p1, p2) = synthesize_two_projections(&scaled, tol)?;
    Ok((v, p1, p2))
}

/// Factor `T = P1^T P1 + P2^T P2 + P3^T P3` for a positive operator with
/// nonzero eigenvalues at least 1, without weights and for any rank.
pub fn synthesize_three_projections(
    t: &SymmetricOperator,
    tol: &Tolerance,
) -> Result<(Projection, Projection, Projection), SynthesisError> {
    let d = spectral_decompose(t);
    let classes = classify_spectrum(d.eigenvalues(), tol);
    check_positive(&classes, &d)?;
    check_all_at_least_one(&classes, &d)?;
    let n = t.dim();

    if n.is_multiple_of(2) {
        let (p1, p2) = synthesize_two_projections(t, tol)?;
        return Ok((p1, p2, Projection::zero(n)));
    }
    if n == 1 {
        // On R^1 every projection is 0 or 1, so only integer spectra split.
        let lambda = d.eigenvalues()[0];
        let one = Projection::identity(1);
        if !classes.zero.is_empty() {
            return Ok((Projection::zero(1), Projection::zero(1), Projection::zero(1)));
        }
        if !classes.eq_one.is_empty() {
            return Ok((one, Projection::zero(1), Projection::zero(1)));
        }
        if !classes.eq_two.is_empty() {
            return Ok((one.clone(), one, Projection::zero(1)));
        }
        if (lambda - 3.0).abs() <= classes.unit_band {
            return Ok((one.clone(), one.clone(), one));
        }
        return Err(SynthesisError::NotConstructible);
    }

    // Near-equal contiguous partition into three blocks, each strictly
    // smaller than n/2.
    let q = n / 3;
    let r = n % 3;
    let sizes = [q + usize::from(r >= 1), q + usize::from(r >= 2), q];
    let mut blocks: Vec<Vec<usize>> = Vec::with_capacity(3);
    let mut start = 0usize;
    for size in sizes {
        blocks.push((start..start + size).collect());
        start += size;
    }
    let mut out = Vec::with_capacity(3);
    for block in &blocks {
        let pool: Vec<usize> = (0..n).filter(|j| !block.contains(j)).collect();
        out.push(member_from_eigen(&d, block, &pool, &classes, tol)?);
    }
    let p3 = out.pop().unwrap();
    let p2 = out.pop().unwrap();
    let p1 = out.pop().unwrap();
    Ok((p1, p2, p3))
}

/// Signed factorization of an arbitrary symmetric operator through the
/// weighted two-projection construction applied to its positive and
/// negative spectral parts.
#[derive(Debug, Clone)]
pub struct IndefiniteDecomposition {
    pub positive_weight: f64,
    pub p1: Projection,
    pub p2: Projection,
    pub negative_weight: f64,
    pub p3: Projection,
    pub p4: Projection,
}

impl IndefiniteDecomposition {
    /// `v1^2 (P1^T P1 + P2^T P2) - v2^2 (P3^T P3 + P4^T P4)`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let pos = self.p1.ptp().matrix() + self.p2.ptp().matrix();
        let neg = self.p3.ptp().matrix() + self.p4.ptp().matrix();
        pos * self.positive_weight.powi(2) - neg * self.negative_weight.powi(2)
    }
}

pub fn decompose_indefinite(t: &SymmetricOperator, tol: &Tolerance) -> IndefiniteDecomposition {
    let d = spectral_decompose(t);
    let n = t.dim();
    let scale = d
        .eigenvalues()
        .iter()
        .fold(0.0f64, |acc, l| acc.max(l.abs()));
    let band = tol.zero_band(scale);

    let mut pos = DMatrix::<f64>::zeros(n, n);
    let mut neg = DMatrix::<f64>::zeros(n, n);
    let mut has_pos = false;
    let mut has_neg = false;
    for j in 0..n {
        let lambda = d.eigenvalues()[j];
        let q = d.eigenvector(j);
        if lambda > band {
            pos.ger(lambda, &q, &q, 1.0);
            has_pos = true;
        } else if lambda < -band {
            neg.ger(-lambda, &q, &q, 1.0);
            has_neg = true;
        }
    }

    let (positive_weight, p1, p2) = if has_pos {
        let op = SymmetricOperator::new(pos).expect("positive part is well-formed");
        synthesize_two_weighted(&op, tol).expect("positive part is a nonzero positive operator")
    } else {
        (0.0, Projection::zero(n), Projection::zero(n))
    };
    let (negative_weight, p3, p4) = if has_neg {
        let op = SymmetricOperator::new(neg).expect("negative part is well-formed");
        synthesize_two_weighted(&op, tol).expect("negative part is a nonzero positive operator")
    } else {
        (0.0, Projection::zero(n), Projection::zero(n))
    };

    IndefiniteDecomposition {
        positive_weight,
        p1,
        p2,
        negative_weight,
        p3,
        p4,
    }
}

/// Orthonormal basis of `W ∩ W*`, computed as the unit eigenspace of
/// `P^T P`.
pub fn unit_core_basis(p: &Projection, tol: &Tolerance) -> DMatrix<f64> {
    let d = spectral_decompose(&p.ptp());
    let classes = classify_spectrum(d.eigenvalues(), tol);
    let mut basis = DMatrix::<f64>::zeros(p.dim(), classes.eq_one.len());
    for (col, &j) in classes.eq_one.iter().enumerate() {
        basis.set_column(col, &d.eigenvector(j));
    }
    basis
}
