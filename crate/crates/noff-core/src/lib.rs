//! Nonorthogonal fusion frames: oblique projection synthesis, tight frame
//! construction and completion, POVM correlation bounds, and randomized
//! frame-operator estimation.
//!
//! The crate is organized around one question: which positive self-adjoint
//! operators `T` arise as `P^T P` for a projection `P` (idempotent, not
//! necessarily symmetric), and how can families of such factorizations be
//! assembled into tight frames? The modules build on each other:
//!
//! - [`spectral`]: symmetric eigendecomposition, numerical rank, and
//!   orthonormal completion;
//! - [`synthesis`]: single, weighted, two-, and three-projection
//!   factorizations of a prescribed operator, with feasibility tests;
//! - [`frame`]: frame operators and bounds, tight frames with prescribed
//!   ranks, completion to tightness, and the tight two-projection
//!   classification;
//! - [`correlation`]: POVM normalization, the simplex bound on pairwise
//!   correlation, equiangularity, and family-size bounds;
//! - [`random`]: seeded samplers over projections, Monte-Carlo estimation,
//!   the frame potential, group-orbit averaging, and the variance identity.
//!
//! All operations are pure functions over immutable values; samplers carry
//! their own seed and draw counter-based streams.
//!
//! ```
//! use noff_core::{
//!     complete_to_tight, frame_bounds, synthesize_projection, SymmetricOperator, Tolerance,
//!     WeightedProjectionFrame,
//! };
//!
//! let tol = Tolerance::default();
//! let t = SymmetricOperator::diagonal(&[2.0, 0.0]).unwrap();
//! let p = synthesize_projection(&t, &tol).unwrap();
//! assert_eq!(p.ptp().matrix(), t.matrix());
//!
//! let start = WeightedProjectionFrame::unit_weights(2, vec![p]).unwrap();
//! let (tight, lambda) = complete_to_tight(&start, &tol).unwrap();
//! assert_eq!(lambda, 3.0);
//! assert!(frame_bounds(&tight, &tol).is_tight);
//! ```

pub mod correlation;
pub mod frame;
pub mod random;
pub mod spectral;
pub mod synthesis;

pub use correlation::{
    equiangular_count_bound, equiangularity_check, linear_independence_check, max_correlation,
    povm_from_frame, scale_trace, simplex_bound, CorrelationError, PovmFamily, ScalarField,
    SimplexReport,
};
pub use frame::{
    classify_two_projection_tight, complete_to_tight, complete_to_tight_low_rank,
    construct_tight_with_ranks, frame_bounds, frame_operator, FrameError, FrameReport,
    TightPairCase, TwoProjectionClassification, WeightedProjectionFrame,
};
pub use random::{
    exact_or_estimated_frame_operator, group_orbit_tighten, haar_orthogonal_matrix,
    random_potential, sample_random_projection, tight_bound_trace_identity, variance_experiment,
    FiniteGroup, PotentialReport, ProjectionSampler, RandomError, RandomFrameReport,
    RandomWarning, SamplerKind, VarianceReport,
};
pub use spectral::{
    complete_orthonormal, is_projection, numerical_rank, spectral_decompose,
    SpectralDecomposition, SpectralError, SymmetricOperator, Tolerance,
};
pub use synthesis::{
    decompose_indefinite, feasibility_high_rank, omega_membership, sample_omega_member,
    split_unit_eigenspace, synthesize_projection, synthesize_single_high_rank,
    synthesize_three_projections, synthesize_two_projections, synthesize_two_weighted,
    synthesize_weighted, unit_core_basis, FeasibilityReason, FeasibilityReport,
    IndefiniteDecomposition, Projection, SynthesisError,
};
