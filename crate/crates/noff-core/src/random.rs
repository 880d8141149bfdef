//! Distributions over projections, exact and Monte-Carlo frame-operator
//! estimation, the random frame potential with its lower bound, group-orbit
//! averaging, and the variance identity experiment.
//!
//! Sampling is counter-based: draw `t` of a sampler depends only on the
//! sampler's seed and `t`, so trial loops can be split across threads (or
//! replayed) without changing results.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::frame::{frame_operator, FrameError, WeightedProjectionFrame};
use crate::spectral::{
    complete_orthonormal, spectral_decompose, SpectralError, SymmetricOperator, Tolerance,
};
use crate::synthesis::{gaussian_complement_extension, Projection, SynthesisError};

#[derive(Debug, Error)]
pub enum RandomError {
    #[error("requested rank {rank} exceeds dimension {dim}")]
    RankExceedsDim { rank: usize, dim: usize },
    #[error("invalid finite-discrete distribution: {detail}")]
    BadProbabilities { detail: String },
    #[error("kernel tilt must lie in [0, pi/2), got {theta}")]
    InvalidTilt { theta: f64 },
    #[error("estimation from a generator sampler needs at least one sample")]
    NeedSamples,
    #[error("frame operator is not tight (tightness ratio {ratio:.3e})")]
    NotTight { ratio: f64 },
    #[error("projection must be nonzero")]
    TrivialProjection,
    #[error("malformed group: {reason}")]
    MalformedGroup { reason: String },
    #[error("sampler {index} is not tight (tightness ratio {ratio:.3e})")]
    SamplerNotTight { index: usize, ratio: f64 },
    #[error("variance experiment needs at least {minimum} trials, got {trials}")]
    TooFewTrials { trials: usize, minimum: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

impl RandomError {
    pub fn name(&self) -> &'static str {
        match self {
            RandomError::RankExceedsDim { .. } => "RankExceedsDim",
            RandomError::BadProbabilities { .. } => "BadProbabilities",
            RandomError::InvalidTilt { .. } => "InvalidTilt",
            RandomError::NeedSamples => "NeedSamples",
            RandomError::NotTight { .. } => "NotTight",
            RandomError::TrivialProjection => "TrivialProjection",
            RandomError::MalformedGroup { .. } => "MalformedGroup",
            RandomError::SamplerNotTight { .. } => "SamplerNotTight",
            RandomError::TooFewTrials { .. } => "TooFewTrials",
            RandomError::DimensionMismatch { .. } => "DimensionMismatch",
            RandomError::Synthesis(e) => e.name(),
            RandomError::Spectral(e) => e.name(),
            RandomError::Frame(e) => e.name(),
        }
    }
}

/// The supported distributions over projections.
#[derive(Debug, Clone)]
pub enum SamplerKind {
    /// A point mass.
    Deterministic(Projection),
    /// A finite discrete measure; probabilities are positive and sum to 1.
    FiniteDiscrete(Vec<(f64, Projection)>),
    /// Orthogonal projection onto a uniformly random k-dimensional subspace.
    HaarOrthogonal { rank: usize },
    /// Haar-random image subspace with the kernel tilted away from the
    /// orthogonal complement by angle `theta`. At `theta = 0` this reduces
    /// to `HaarOrthogonal`; as many kernel directions are tilted as the
    /// image can absorb while keeping the kernel transversal to it.
    ObliqueHaar { rank: usize, theta: f64 },
}

/// A seeded distribution over projections on R^n.
///
/// Draws are indexed: `draw_at(t)` is a pure function of `(seed, t)`.
/// [`sample_random_projection`] draws at the internal counter and advances
/// it, which is the only mutable state.
#[derive(Debug, Clone)]
pub struct ProjectionSampler {
    dim: usize,
    kind: SamplerKind,
    seed: u64,
    counter: u64,
}

const PROBABILITY_SUM_TOL: f64 = 1e-12;

impl ProjectionSampler {
    pub fn new(dim: usize, kind: SamplerKind, seed: u64) -> Result<Self, RandomError> {
        if dim == 0 {
            return Err(SpectralError::EmptyDimension.into());
        }
        match &kind {
            SamplerKind::Deterministic(p) => {
                if p.dim() != dim {
                    return Err(RandomError::DimensionMismatch {
                        expected: dim,
                        got: p.dim(),
                    });
                }
            }
            SamplerKind::FiniteDiscrete(atoms) => {
                if atoms.is_empty() {
                    return Err(RandomError::BadProbabilities {
                        detail: "no atoms".into(),
                    });
                }
                let mut total = 0.0f64;
                for (prob, p) in atoms {
                    if !(prob.is_finite() && *prob > 0.0) {
                        return Err(RandomError::BadProbabilities {
                            detail: format!("probability {prob} is not positive"),
                        });
                    }
                    if p.dim() != dim {
                        return Err(RandomError::DimensionMismatch {
                            expected: dim,
                            got: p.dim(),
                        });
                    }
                    total += prob;
                }
                if (total - 1.0).abs() > PROBABILITY_SUM_TOL {
                    return Err(RandomError::BadProbabilities {
                        detail: format!("probabilities sum to {total}"),
                    });
                }
            }
            SamplerKind::HaarOrthogonal { rank } => {
                if *rank > dim {
                    return Err(RandomError::RankExceedsDim {
                        rank: *rank,
                        dim,
                    });
                }
            }
            SamplerKind::ObliqueHaar { rank, theta } => {
                if *rank > dim {
                    return Err(RandomError::RankExceedsDim {
                        rank: *rank,
                        dim,
                    });
                }
                if !(theta.is_finite() && *theta >= 0.0) || *theta >= std::f64::consts::FRAC_PI_2 {
                    return Err(RandomError::InvalidTilt { theta: *theta });
                }
            }
        }
        Ok(ProjectionSampler {
            dim,
            kind,
            seed,
            counter: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &SamplerKind {
        &self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn is_exact(&self) -> bool {
        matches!(
            self.kind,
            SamplerKind::Deterministic(_) | SamplerKind::FiniteDiscrete(_)
        )
    }

    /// Draw the projection at stream index `t` without touching the counter.
    pub fn draw_at(&self, t: u64) -> Projection {
        let tol = Tolerance::default();
        match &self.kind {
            SamplerKind::Deterministic(p) => p.clone(),
            SamplerKind::FiniteDiscrete(atoms) => {
                let mut rng = stream_rng(self.seed, t);
                let u: f64 = rng.random();
                let mut acc = 0.0f64;
                for (prob, p) in atoms {
                    acc += prob;
                    if u < acc {
                        return p.clone();
                    }
                }
                atoms.last().expect("atoms validated non-empty").1.clone()
            }
            SamplerKind::HaarOrthogonal { rank } => {
                let mut rng = stream_rng(self.seed, t);
                let basis = gaussian_complement_extension(&mut rng, self.dim, *rank, &[]);
                let mut m = DMatrix::<f64>::zeros(self.dim, self.dim);
                for b in &basis {
                    m.ger(1.0, b, b, 1.0);
                }
                Projection::from_matrix(m, &tol)
                    .expect("BB^T of an orthonormal basis is an orthogonal projection")
            }
            SamplerKind::ObliqueHaar { rank, theta } => {
                let mut rng = stream_rng(self.seed, t);
                self.draw_oblique(&mut rng, *rank, *theta, &tol)
            }
        }
    }

    fn draw_oblique(
        &self,
        rng: &mut ChaCha8Rng,
        rank: usize,
        theta: f64,
        tol: &Tolerance,
    ) -> Projection {
        let n = self.dim;
        if rank == 0 {
            return Projection::zero(n);
        }
        if rank == n {
            return Projection::identity(n);
        }
        let image = gaussian_complement_extension(rng, n, rank, &[]);
        if theta == 0.0 {
            let mut m = DMatrix::<f64>::zeros(n, n);
            for b in &image {
                m.ger(1.0, b, b, 1.0);
            }
            return Projection::from_matrix(m, tol)
                .expect("zero tilt gives an orthogonal projection");
        }

        let completed = complete_orthonormal(n, &image, n)
            .expect("any orthonormal set extends to a full basis");
        let perp = &completed[rank..];

        // Haar-random orthonormal vectors inside the image subspace supply
        // the tilt directions; at most `rank` kernel directions can be
        // tilted while the kernel stays transversal to the image.
        let tilt_count = rank.min(n - rank);
        let mut tilts: Vec<DVector<f64>> = Vec::with_capacity(tilt_count);
        while tilts.len() < tilt_count {
            let mut w = DVector::<f64>::zeros(n);
            for b in &image {
                let coeff: f64 = rng.sample(StandardNormal);
                w.axpy(coeff, b, 1.0);
            }
            for u in &tilts {
                let coeff = u.dot(&w);
                w.axpy(-coeff, u, 1.0);
            }
            let norm = w.norm();
            if norm < 1e-8 {
                continue;
            }
            tilts.push(w / norm);
        }

        let (sin_t, cos_t) = theta.sin_cos();
        let mut full = DMatrix::<f64>::zeros(n, n);
        for (col, b) in image.iter().enumerate() {
            full.set_column(col, b);
        }
        for (j, w) in perp.iter().enumerate() {
            let column = if j < tilt_count {
                w * cos_t + &tilts[j] * sin_t
            } else {
                w.clone()
            };
            full.set_column(rank + j, &column);
        }
        let inverse = full
            .clone()
            .lu()
            .try_inverse()
            .expect("image and tilted kernel are transversal for theta < pi/2");
        let image_block = full.columns(0, rank).into_owned();
        let m = image_block * inverse.rows(0, rank);
        Projection::from_matrix(m, tol).expect("projection onto image along tilted kernel")
    }
}

/// Draw the next projection, advancing the sampler's counter.
pub fn sample_random_projection(sampler: &mut ProjectionSampler) -> Projection {
    let p = sampler.draw_at(sampler.counter);
    sampler.counter += 1;
    p
}

/// Counter-based derivation of a per-index RNG (splitmix64 over seed and
/// index), so draws are independent of evaluation order.
fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    ChaCha8Rng::seed_from_u64(z)
}

/// A warning attached to a report rather than raised as an error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RandomWarning {
    /// Orbit averaging did not produce a multiple of the identity; the
    /// named eigenspace of the frame operator is a proper invariant
    /// subspace of the group.
    GroupNotIrreducible { invariant_subspace_dim: usize },
}

/// Exact or estimated mean operator `S = E[P^T P]` with frame bounds.
#[derive(Debug, Clone)]
pub struct RandomFrameReport {
    pub mean_operator: SymmetricOperator,
    pub lower: f64,
    pub upper: f64,
    pub tight: bool,
    /// 0 for exact (deterministic / finite-discrete) evaluation.
    pub samples_used: usize,
    /// Frobenius aggregate of entrywise standard errors; 0 for exact paths.
    pub standard_error: f64,
    pub warning: Option<RandomWarning>,
}

struct SampleStats {
    mean: DMatrix<f64>,
    standard_error: f64,
    samples_used: usize,
    mean_rank: f64,
    mean_hs_sq: f64,
    mean_hs_sq_of_ptp: f64,
    orthogonal_ae: bool,
}

fn collect_stats(
    sampler: &ProjectionSampler,
    m_samples: usize,
    tol: &Tolerance,
) -> Result<SampleStats, RandomError> {
    let n = sampler.dim();
    let symmetric = |p: &Projection| {
        (p.matrix() - p.matrix().transpose()).norm()
            <= tol.residual_rel * p.matrix().norm().max(1.0)
    };

    match sampler.kind() {
        SamplerKind::Deterministic(p) => {
            let ptp = p.ptp();
            Ok(SampleStats {
                mean: ptp.matrix().clone(),
                standard_error: 0.0,
                samples_used: 0,
                mean_rank: p.rank() as f64,
                mean_hs_sq: p.hs_norm_sq(),
                mean_hs_sq_of_ptp: ptp.matrix().iter().map(|x| x * x).sum(),
                orthogonal_ae: symmetric(p),
            })
        }
        SamplerKind::FiniteDiscrete(atoms) => {
            let mut mean = DMatrix::<f64>::zeros(n, n);
            let mut mean_rank = 0.0;
            let mut mean_hs_sq = 0.0;
            let mut mean_hs_sq_of_ptp = 0.0;
            let mut orthogonal_ae = true;
            for (prob, p) in atoms {
                let ptp = p.ptp();
                mean += ptp.matrix() * *prob;
                mean_rank += prob * p.rank() as f64;
                mean_hs_sq += prob * p.hs_norm_sq();
                mean_hs_sq_of_ptp += prob * ptp.matrix().iter().map(|x| x * x).sum::<f64>();
                orthogonal_ae &= symmetric(p);
            }
            Ok(SampleStats {
                mean,
                standard_error: 0.0,
                samples_used: 0,
                mean_rank,
                mean_hs_sq,
                mean_hs_sq_of_ptp,
                orthogonal_ae,
            })
        }
        SamplerKind::HaarOrthogonal { .. } | SamplerKind::ObliqueHaar { .. } => {
            if m_samples == 0 {
                return Err(RandomError::NeedSamples);
            }
            let mut sum = DMatrix::<f64>::zeros(n, n);
            let mut sum_sq = DMatrix::<f64>::zeros(n, n);
            let mut rank_sum = 0.0;
            let mut hs_sum = 0.0;
            let mut hs_ptp_sum = 0.0;
            let mut orthogonal_ae = true;
            for t in 0..m_samples {
                let p = sampler.draw_at(t as u64);
                let ptp = p.ptp();
                for (dst, x) in sum.iter_mut().zip(ptp.matrix().iter()) {
                    *dst += x;
                }
                for (dst, x) in sum_sq.iter_mut().zip(ptp.matrix().iter()) {
                    *dst += x * x;
                }
                rank_sum += p.rank() as f64;
                hs_sum += p.hs_norm_sq();
                hs_ptp_sum += ptp.matrix().iter().map(|x| x * x).sum::<f64>();
                orthogonal_ae &= symmetric(&p);
            }
            let m = m_samples as f64;
            let mean = &sum / m;
            let standard_error = if m_samples > 1 {
                let mut var_total = 0.0f64;
                for (s, s2) in sum.iter().zip(sum_sq.iter()) {
                    let var = (s2 - s * s / m) / (m - 1.0);
                    var_total += var.max(0.0);
                }
                (var_total / m).sqrt()
            } else {
                f64::INFINITY
            };
            Ok(SampleStats {
                mean,
                standard_error,
                samples_used: m_samples,
                mean_rank: rank_sum / m,
                mean_hs_sq: hs_sum / m,
                mean_hs_sq_of_ptp: hs_ptp_sum / m,
                orthogonal_ae,
            })
        }
    }
}

fn report_from_stats(stats: &SampleStats) -> Result<RandomFrameReport, RandomError> {
    let tol = Tolerance::default();
    let mean_operator = SymmetricOperator::new(stats.mean.clone())?;
    let d = spectral_decompose(&mean_operator);
    let upper = d.eigenvalues().first().copied().unwrap_or(0.0);
    let lower = d.eigenvalues().last().copied().unwrap_or(0.0);
    let tight = if stats.samples_used == 0 {
        lower > tol.zero_band(upper) && upper - lower <= tol.residual_rel * upper.max(1.0)
    } else {
        upper - lower
            <= (tol.residual_rel * upper.max(1.0)).max(3.0 * stats.standard_error)
    };
    Ok(RandomFrameReport {
        mean_operator,
        lower,
        upper,
        tight,
        samples_used: stats.samples_used,
        standard_error: stats.standard_error,
        warning: None,
    })
}

/// Mean frame operator of a sampler: an exact weighted sum for point-mass
/// and finite-discrete samplers, a Monte-Carlo average over `m_samples`
/// indexed draws otherwise.
pub fn exact_or_estimated_frame_operator(
    sampler: &ProjectionSampler,
    m_samples: usize,
) -> Result<RandomFrameReport, RandomError> {
    let stats = collect_stats(sampler, m_samples, &Tolerance::default())?;
    report_from_stats(&stats)
}

/// For a tight report, the frame bound equals the mean of
/// `trace(P^T P) / n`; returns `(A, trace(S)/n)`.
pub fn tight_bound_trace_identity(
    report: &RandomFrameReport,
) -> Result<(f64, f64), RandomError> {
    if !report.tight {
        let ratio = if report.lower > 0.0 {
            report.upper / report.lower - 1.0
        } else {
            f64::INFINITY
        };
        return Err(RandomError::NotTight { ratio });
    }
    let n = report.mean_operator.dim() as f64;
    Ok((report.lower, report.mean_operator.trace() / n))
}

/// Frame potential of a sampler with its lower bound `M^2 / n`, the
/// rank-based variant, and the orthogonality diagnosis.
#[derive(Debug, Clone)]
pub struct PotentialReport {
    /// `trace(S^2)` for the (exact or estimated) mean operator `S`.
    pub potential: f64,
    /// Mean squared Hilbert-Schmidt norm of the drawn projections.
    pub mean_hs_norm_sq: f64,
    pub bound: f64,
    pub equality: bool,
    pub mean_rank: f64,
    pub rank_bound: f64,
    /// All drawn (or enumerated) projections symmetric within tolerance.
    pub orthogonal_ae: bool,
    pub samples_used: usize,
}

pub fn random_potential(
    sampler: &ProjectionSampler,
    m_samples: usize,
) -> Result<PotentialReport, RandomError> {
    let tol = Tolerance::default();
    let stats = collect_stats(sampler, m_samples, &tol)?;
    let n = sampler.dim() as f64;
    let s = &stats.mean;
    let potential = (s * s).trace();
    let mean_hs = stats.mean_hs_sq;
    let bound = mean_hs * mean_hs / n;
    // First-order error propagation from the entrywise standard error.
    let propagated =
        stats.standard_error * (2.0 * s.norm() + 2.0 * mean_hs.abs() / n.sqrt());
    let equality = (potential - bound).abs() <= (1e-8f64).max(3.0 * propagated);
    Ok(PotentialReport {
        potential,
        mean_hs_norm_sq: mean_hs,
        bound,
        equality,
        mean_rank: stats.mean_rank,
        rank_bound: stats.mean_rank * stats.mean_rank / n,
        orthogonal_ae: stats.orthogonal_ae,
        samples_used: stats.samples_used,
    })
}

const DEFAULT_CLOSURE_CAP: usize = 1_000_000;
const GROUP_ORTHOGONALITY_TOL: f64 = 1e-10;
const GROUP_ELEMENT_MATCH_TOL: f64 = 1e-9;

/// A finite group of orthogonal matrices, closed under product and inverse.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    dim: usize,
    elements: Vec<DMatrix<f64>>,
}

impl FiniteGroup {
    /// Close a generating set under multiplication (breadth-first, capped).
    /// The identity is always included; an empty generator list yields the
    /// trivial group.
    pub fn from_generators(
        dim: usize,
        generators: &[DMatrix<f64>],
        cap: Option<usize>,
    ) -> Result<Self, RandomError> {
        if dim == 0 {
            return Err(SpectralError::EmptyDimension.into());
        }
        let cap = cap.unwrap_or(DEFAULT_CLOSURE_CAP);
        for (i, g) in generators.iter().enumerate() {
            check_orthogonal(g, dim, i)?;
        }
        let mut elements: Vec<DMatrix<f64>> = vec![DMatrix::identity(dim, dim)];
        let mut frontier: Vec<usize> = vec![0];
        while let Some(idx) = frontier.pop() {
            let current = elements[idx].clone();
            for g in generators {
                let candidate = &current * g;
                if find_element(&elements, &candidate).is_none() {
                    if elements.len() >= cap {
                        return Err(RandomError::MalformedGroup {
                            reason: format!("closure exceeded cap of {cap} elements"),
                        });
                    }
                    elements.push(candidate);
                    frontier.push(elements.len() - 1);
                }
            }
        }
        Ok(FiniteGroup { dim, elements })
    }

    /// Validate an explicit element list: orthogonality, identity
    /// membership, and closure under products.
    pub fn from_elements(dim: usize, elements: Vec<DMatrix<f64>>) -> Result<Self, RandomError> {
        if dim == 0 {
            return Err(SpectralError::EmptyDimension.into());
        }
        if elements.is_empty() {
            return Err(RandomError::MalformedGroup {
                reason: "no elements".into(),
            });
        }
        for (i, g) in elements.iter().enumerate() {
            check_orthogonal(g, dim, i)?;
        }
        let identity = DMatrix::<f64>::identity(dim, dim);
        if find_element(&elements, &identity).is_none() {
            return Err(RandomError::MalformedGroup {
                reason: "identity element missing".into(),
            });
        }
        for a in &elements {
            for b in &elements {
                if find_element(&elements, &(a * b)).is_none() {
                    return Err(RandomError::MalformedGroup {
                        reason: "element set not closed under products".into(),
                    });
                }
            }
        }
        Ok(FiniteGroup { dim, elements })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[DMatrix<f64>] {
        &self.elements
    }
}

fn check_orthogonal(g: &DMatrix<f64>, dim: usize, index: usize) -> Result<(), RandomError> {
    if g.nrows() != dim || g.ncols() != dim {
        return Err(RandomError::DimensionMismatch {
            expected: dim,
            got: g.nrows().max(g.ncols()),
        });
    }
    let defect = (g.transpose() * g - DMatrix::identity(dim, dim)).norm();
    if !defect.is_finite() || defect > GROUP_ORTHOGONALITY_TOL {
        return Err(RandomError::MalformedGroup {
            reason: format!("element {index} is not orthogonal (defect {defect:.3e})"),
        });
    }
    Ok(())
}

fn find_element(elements: &[DMatrix<f64>], candidate: &DMatrix<f64>) -> Option<usize> {
    elements.iter().position(|e| {
        e.iter()
            .zip(candidate.iter())
            .all(|(a, b)| (a - b).abs() <= GROUP_ELEMENT_MATCH_TOL)
    })
}

/// Conjugate `P` by every group element with weights `1/sqrt(|G|)`, so the
/// frame operator is the orbit average of `P^T P`. If the average is not a
/// multiple of the identity the group has a proper invariant subspace and
/// the report carries a [`RandomWarning::GroupNotIrreducible`] instead of
/// failing.
pub fn group_orbit_tighten(
    p: &Projection,
    group: &FiniteGroup,
    tol: &Tolerance,
) -> Result<(WeightedProjectionFrame, RandomFrameReport), RandomError> {
    if p.dim() != group.dim() {
        return Err(RandomError::DimensionMismatch {
            expected: group.dim(),
            got: p.dim(),
        });
    }
    if p.rank() == 0 {
        return Err(RandomError::TrivialProjection);
    }
    let weight = 1.0 / (group.order() as f64).sqrt();
    let mut items = Vec::with_capacity(group.order());
    for g in group.elements() {
        let conjugate = g.transpose() * p.matrix() * g;
        items.push((weight, Projection::from_matrix(conjugate, tol)?));
    }
    let frame = WeightedProjectionFrame::new(p.dim(), items)?;

    let s = frame_operator(&frame);
    let d = spectral_decompose(&s);
    let upper = d.eigenvalues()[0];
    let lower = *d.eigenvalues().last().unwrap();
    let tight = lower > tol.zero_band(upper) && upper - lower <= tol.residual_rel * upper.max(1.0);

    let warning = if tight {
        None
    } else {
        // The leading eigenvalue cluster of S spans a G-invariant subspace;
        // if S is not a multiple of I that subspace is proper.
        let band = tol.unit_band(upper);
        let cluster = d
            .eigenvalues()
            .iter()
            .take_while(|&&l| upper - l <= band)
            .count();
        Some(RandomWarning::GroupNotIrreducible {
            invariant_subspace_dim: cluster,
        })
    };

    let report = RandomFrameReport {
        mean_operator: s,
        lower,
        upper,
        tight,
        samples_used: 0,
        standard_error: 0.0,
        warning,
    };
    Ok((frame, report))
}

/// Outcome of the variance identity experiment.
#[derive(Debug, Clone)]
pub struct VarianceReport {
    /// Trial mean of `|| S/m - A I ||_HS^2`.
    pub empirical: f64,
    /// `(M - n * mean(A_i^2)) / m`.
    pub predicted: f64,
    /// Standard error of the trial mean.
    pub stderr: f64,
    pub trials: usize,
}

const MIN_TRIALS: usize = 100;
const TIGHTNESS_VERIFY_SAMPLES: usize = 2000;
/// Trial draws use stream indices offset past the verification draws.
const TRIAL_STREAM_OFFSET: u64 = 1 << 32;

/// Draw one projection per sampler per trial, form `S = sum_i P_i^T P_i`,
/// and compare the empirical mean of `|| S/m - A I ||_HS^2` against the
/// closed-form prediction `(M - n Atilde) / m`.
///
/// Every sampler must individually be tight; exact samplers are verified
/// exactly, generator samplers by a Monte-Carlo estimate.
pub fn variance_experiment(
    samplers: &[ProjectionSampler],
    trials: usize,
) -> Result<VarianceReport, RandomError> {
    if trials < MIN_TRIALS {
        return Err(RandomError::TooFewTrials {
            trials,
            minimum: MIN_TRIALS,
        });
    }
    if samplers.is_empty() {
        return Err(RandomError::NeedSamples);
    }
    let n = samplers[0].dim();
    for s in samplers {
        if s.dim() != n {
            return Err(RandomError::DimensionMismatch {
                expected: n,
                got: s.dim(),
            });
        }
    }
    let tol = Tolerance::default();

    let mut bound_sum = 0.0f64;
    let mut bound_sq_sum = 0.0f64;
    let mut hs_sq_sum = 0.0f64;
    for (index, sampler) in samplers.iter().enumerate() {
        let verify_samples = if sampler.is_exact() {
            0
        } else {
            TIGHTNESS_VERIFY_SAMPLES
        };
        let stats = collect_stats(sampler, verify_samples, &tol)?;
        let report = report_from_stats(&stats)?;
        if !report.tight {
            let ratio = if report.lower > 0.0 {
                report.upper / report.lower - 1.0
            } else {
                f64::INFINITY
            };
            return Err(RandomError::SamplerNotTight { index, ratio });
        }
        let a = report.mean_operator.trace() / n as f64;
        bound_sum += a;
        bound_sq_sum += a * a;
        hs_sq_sum += stats.mean_hs_sq_of_ptp;
    }
    let m = samplers.len() as f64;
    let a_mean = bound_sum / m;
    let a_sq_mean = bound_sq_sum / m;
    let hs_mean = hs_sq_sum / m;
    let predicted = (hs_mean - n as f64 * a_sq_mean) / m;

    let mut value_sum = 0.0f64;
    let mut value_sq_sum = 0.0f64;
    for t in 0..trials {
        let mut s = DMatrix::<f64>::zeros(n, n);
        for sampler in samplers {
            let p = sampler.draw_at(TRIAL_STREAM_OFFSET + t as u64);
            s += p.ptp().matrix();
        }
        let deviation = s / m - DMatrix::identity(n, n) * a_mean;
        let value = deviation.iter().map(|x| x * x).sum::<f64>();
        value_sum += value;
        value_sq_sum += value * value;
    }
    let trials_f = trials as f64;
    let empirical = value_sum / trials_f;
    let variance = (value_sq_sum - value_sum * value_sum / trials_f) / (trials_f - 1.0);
    let stderr = (variance.max(0.0) / trials_f).sqrt();

    Ok(VarianceReport {
        empirical,
        predicted,
        stderr,
        trials,
    })
}

/// A seeded Haar-distributed orthogonal matrix (Gaussian columns followed
/// by Gram-Schmidt). Exposed for building reproducible random test inputs.
pub fn haar_orthogonal_matrix(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = stream_rng(seed, 0);
    let columns = gaussian_complement_extension(&mut rng, n, n, &[]);
    let mut m = DMatrix::<f64>::zeros(n, n);
    for (j, c) in columns.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}
