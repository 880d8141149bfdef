//! The `noff` command line: construction, verification, analysis, and
//! randomized experiments over nonorthogonal fusion frames, with JSON
//! documents on disk and JSON reports on stdout.
//!
//! Exit codes: 0 success, 1 domain error (the violated contract's name is
//! printed to stderr), 2 usage or parse error. All numeric output carries
//! 17 significant digits and every randomized command takes an explicit
//! `--seed`, making outputs byte-reproducible.

pub mod docs;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use docs::{
    frame_document_json, matrix_document_json, render_document, DocError, FrameDocument, Json,
    MatrixDocument, MatrixKind, SamplerDocument, VarianceConfigDocument,
};
use noff_core::{
    classify_two_projection_tight, complete_to_tight, complete_to_tight_low_rank,
    construct_tight_with_ranks, decompose_indefinite, equiangular_count_bound,
    equiangularity_check, exact_or_estimated_frame_operator, feasibility_high_rank,
    frame_bounds, group_orbit_tighten, linear_independence_check, numerical_rank,
    povm_from_frame, random_potential, sample_omega_member, scale_trace, simplex_bound,
    spectral_decompose, split_unit_eigenspace, synthesize_projection,
    synthesize_single_high_rank, synthesize_three_projections, synthesize_two_projections,
    synthesize_weighted, tight_bound_trace_identity, variance_experiment, FiniteGroup,
    Projection, ProjectionSampler, RandomWarning, SamplerKind, ScalarField, SymmetricOperator,
    Tolerance, WeightedProjectionFrame,
};

#[derive(Parser)]
#[command(
    name = "noff",
    version,
    about = "Construct, complete, and verify nonorthogonal fusion frames"
)]
struct Cli {
    /// Relative threshold for treating eigenvalues as zero.
    #[arg(long, global = true, value_name = "REL")]
    tol_rank: Option<f64>,
    /// Relative threshold for residual and idempotency checks.
    #[arg(long, global = true, value_name = "REL")]
    tol_residual: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Factor a positive operator as projections (P^T P sums).
    Synthesize {
        /// Matrix document holding the target operator.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = SynthMode::Single)]
        mode: SynthMode,
        /// Output document (matrix for single mode, frame otherwise).
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw a seeded random member of the factorization family of T.
    OmegaSample {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decide whether T = P^T P is solvable, with eigenvalue counts.
    Feasibility {
        #[arg(long)]
        input: PathBuf,
    },
    /// Split a projection into its unit-eigenspace part and the rest.
    SplitUnit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a tight unit-weight frame with prescribed projection ranks.
    TightRanks {
        #[arg(long)]
        n: usize,
        /// Comma-separated list, e.g. --ranks 1,1,1
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        ranks: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Append projections to a frame document to make it tight.
    Complete {
        #[arg(long)]
        frame: PathBuf,
        /// Bound the added ranks by k, using ceil(n/k) projections.
        #[arg(long, value_name = "K")]
        low_rank: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify a tight two-projection frame.
    ClassifyPair {
        #[arg(long)]
        p1: PathBuf,
        #[arg(long)]
        p2: PathBuf,
    },
    /// Frame bounds and tightness of a frame document.
    Verify {
        #[arg(long)]
        frame: PathBuf,
    },
    /// Normalize a tight frame into a POVM and report its correlation
    /// structure: simplex bound, equiangularity, linear independence.
    Povm {
        #[arg(long)]
        frame: PathBuf,
    },
    /// Size bound for equiangular families resolving the identity.
    CountBound {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        field: FieldArg,
    },
    /// Randomized frame experiments driven by a sampler config file.
    Random {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        action: RandomAction,
        #[arg(long)]
        seed: u64,
        /// Monte-Carlo sample count for generator samplers.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Trial count for the variance action.
        #[arg(long, default_value_t = 1_000)]
        trials: usize,
    },
    /// Average a projection over the orbit of a finite orthogonal group.
    GroupOrbit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        generators: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SynthMode {
    /// One projection: low-rank construction or the high-rank dichotomy.
    Single,
    /// One weighted projection, v^2 P^T P.
    Weighted,
    /// Two unit-weight projections.
    Two,
    /// Three unit-weight projections.
    Three,
    /// Signed weighted decomposition of an arbitrary symmetric operator.
    Indefinite,
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldArg {
    Real,
    Complex,
}

#[derive(Clone, Copy, ValueEnum)]
enum RandomAction {
    Estimate,
    Potential,
    Variance,
}

enum CliError {
    Domain { name: String, message: String },
    Parse(String),
}

impl From<DocError> for CliError {
    fn from(e: DocError) -> Self {
        match e {
            DocError::Malformed(message) => CliError::Parse(message),
            DocError::Domain { name, message } => CliError::Domain {
                name: name.to_string(),
                message,
            },
        }
    }
}

macro_rules! domain_error_from {
    ($($ty:ty),* $(,)?) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::Domain {
                    name: e.name().to_string(),
                    message: e.to_string(),
                }
            }
        }
    )*};
}

domain_error_from!(
    noff_core::SpectralError,
    noff_core::SynthesisError,
    noff_core::FrameError,
    noff_core::CorrelationError,
    noff_core::RandomError,
);

/// Run the CLI against explicit argv and output streams; returns the exit
/// code. `argv[0]` is the program name.
pub fn run<W: Write, E: Write>(argv: &[String], out: &mut W, err: &mut E) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let _ = write!(err, "{e}");
            return 2;
        }
    };

    let tol = match resolve_tolerance(&cli) {
        Ok(tol) => tol,
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            return 2;
        }
    };

    match dispatch(cli.command, &tol, out) {
        Ok(()) => 0,
        Err(CliError::Domain { name, message }) => {
            let _ = writeln!(err, "error: {name}: {message}");
            1
        }
        Err(CliError::Parse(message)) => {
            let _ = writeln!(err, "error: {message}");
            2
        }
    }
}

/// Tolerances resolve in order: built-in defaults, then the optional
/// NOFF_DEFAULT_TOL environment variable (one value for both thresholds,
/// or "rank,residual"), then the command-line flags.
fn resolve_tolerance(cli: &Cli) -> Result<Tolerance, String> {
    let defaults = Tolerance::default();
    let mut rank_rel = defaults.rank_rel;
    let mut residual_rel = defaults.residual_rel;

    if let Ok(value) = std::env::var("NOFF_DEFAULT_TOL") {
        let parts: Vec<&str> = value.split(',').collect();
        match parts.as_slice() {
            [single] => {
                let x: f64 = single
                    .trim()
                    .parse()
                    .map_err(|_| format!("NOFF_DEFAULT_TOL is not a number: {value}"))?;
                rank_rel = x;
                residual_rel = x;
            }
            [rank, residual] => {
                rank_rel = rank
                    .trim()
                    .parse()
                    .map_err(|_| format!("NOFF_DEFAULT_TOL rank part is not a number: {value}"))?;
                residual_rel = residual.trim().parse().map_err(|_| {
                    format!("NOFF_DEFAULT_TOL residual part is not a number: {value}")
                })?;
            }
            _ => return Err(format!("NOFF_DEFAULT_TOL has too many parts: {value}")),
        }
    }

    if let Some(x) = cli.tol_rank {
        rank_rel = x;
    }
    if let Some(x) = cli.tol_residual {
        residual_rel = x;
    }
    Tolerance::new(rank_rel, residual_rel).map_err(|e| e.to_string())
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content)
        .map_err(|e| CliError::Parse(format!("cannot write {}: {e}", path.display())))
}

fn load_operator(path: &Path, tol: &Tolerance) -> Result<SymmetricOperator, CliError> {
    let doc = MatrixDocument::parse(&read_file(path)?)?;
    Ok(doc.to_symmetric_operator(tol)?)
}

fn load_projection(path: &Path, tol: &Tolerance) -> Result<Projection, CliError> {
    let doc = MatrixDocument::parse(&read_file(path)?)?;
    Ok(doc.to_projection(tol)?)
}

fn load_frame(path: &Path, tol: &Tolerance) -> Result<WeightedProjectionFrame, CliError> {
    let doc = FrameDocument::parse(&read_file(path)?)?;
    let mut items = Vec::with_capacity(doc.items.len());
    for item in &doc.items {
        items.push((item.weight, item.matrix.to_projection(tol)?));
    }
    Ok(WeightedProjectionFrame::new(doc.n, items)?)
}

fn emit<W: Write>(out: &mut W, json: &Json) -> Result<(), CliError> {
    writeln!(out, "{}", json.render())
        .map_err(|e| CliError::Parse(format!("cannot write report: {e}")))
}

fn dispatch<W: Write>(command: Command, tol: &Tolerance, out: &mut W) -> Result<(), CliError> {
    match command {
        Command::Synthesize {
            input,
            mode,
            out: out_path,
        } => synthesize_command(&input, mode, &out_path, tol, out),
        Command::OmegaSample {
            input,
            seed,
            out: out_path,
        } => {
            let t = load_operator(&input, tol)?;
            let p = sample_omega_member(&t, seed, tol)?;
            write_file(
                &out_path,
                &render_document(&matrix_document_json(MatrixKind::Projection, p.matrix())),
            )?;
            emit(
                out,
                &Json::Object(vec![
                    ("seed", Json::Uint(seed as usize)),
                    ("n", Json::Uint(p.dim())),
                    ("rank", Json::Uint(p.rank())),
                ]),
            )
        }
        Command::Feasibility { input } => {
            let t = load_operator(&input, tol)?;
            let report = feasibility_high_rank(&t, tol)?;
            emit(
                out,
                &Json::Object(vec![
                    ("feasible", Json::Bool(report.feasible)),
                    ("above_one", Json::Uint(report.count_above_one)),
                    ("unit", Json::Uint(report.count_unit)),
                    ("zero", Json::Uint(report.count_zero)),
                    ("reason", Json::Str(format!("{:?}", report.reason))),
                ]),
            )
        }
        Command::SplitUnit {
            input,
            out: out_path,
        } => {
            let p = load_projection(&input, tol)?;
            let (prime, unit) = split_unit_eigenspace(&p);
            let document = Json::Object(vec![
                ("n", Json::Uint(p.dim())),
                (
                    "p_prime",
                    matrix_document_json(MatrixKind::Projection, prime.matrix()),
                ),
                (
                    "unit",
                    matrix_document_json(MatrixKind::Projection, unit.matrix()),
                ),
            ]);
            write_file(&out_path, &render_document(&document))?;
            emit(
                out,
                &Json::Object(vec![
                    ("prime_rank", Json::Uint(prime.rank())),
                    ("unit_rank", Json::Uint(unit.rank())),
                ]),
            )
        }
        Command::TightRanks {
            n,
            ranks,
            out: out_path,
        } => {
            let (frame, lambda) = construct_tight_with_ranks(n, &ranks, tol)?;
            write_file(
                &out_path,
                &render_document(&frame_document_json(
                    frame.dim(),
                    frame.items(),
                    MatrixKind::Projection,
                )),
            )?;
            emit(
                out,
                &Json::Object(vec![
                    ("lambda", Json::Float(lambda)),
                    ("count", Json::Uint(frame.len())),
                ]),
            )
        }
        Command::Complete {
            frame,
            low_rank,
            out: out_path,
        } => {
            let start = load_frame(&frame, tol)?;
            let before = start.len();
            let (full, lambda) = match low_rank {
                Some(k) => complete_to_tight_low_rank(&start, k, tol)?,
                None => complete_to_tight(&start, tol)?,
            };
            write_file(
                &out_path,
                &render_document(&frame_document_json(
                    full.dim(),
                    full.items(),
                    MatrixKind::Projection,
                )),
            )?;
            emit(
                out,
                &Json::Object(vec![
                    ("lambda", Json::Float(lambda)),
                    ("added", Json::Uint(full.len() - before)),
                ]),
            )
        }
        Command::ClassifyPair { p1, p2 } => {
            let a = load_projection(&p1, tol)?;
            let b = load_projection(&p2, tol)?;
            let c = classify_two_projection_tight(&a, &b, tol)?;
            emit(
                out,
                &Json::Object(vec![
                    ("case", Json::Str(c.case_tag.name().to_string())),
                    ("lambda", Json::Float(c.lambda)),
                    ("rank1", Json::Uint(c.ranks.0)),
                    ("rank2", Json::Uint(c.ranks.1)),
                    ("shared_core_dim", Json::Uint(c.shared_core_dim)),
                ]),
            )
        }
        Command::Verify { frame } => {
            let f = load_frame(&frame, tol)?;
            let report = frame_bounds(&f, tol);
            emit(
                out,
                &Json::Object(vec![
                    ("A", Json::Float(report.lower)),
                    ("B", Json::Float(report.upper)),
                    ("tight", Json::Bool(report.is_tight)),
                    ("is_frame", Json::Bool(report.is_frame)),
                    (
                        "tightness_ratio",
                        if report.tightness_ratio.is_finite() {
                            Json::Float(report.tightness_ratio)
                        } else {
                            Json::Null
                        },
                    ),
                ]),
            )
        }
        Command::Povm { frame } => {
            let f = load_frame(&frame, tol)?;
            let povm = povm_from_frame(&f, tol)?;
            let normalized = scale_trace(&povm)?;
            let report = simplex_bound(&normalized, tol)?;
            let (_, pair) = noff_core::max_correlation(&normalized)?;
            let (_, common) = equiangularity_check(&normalized, tol)?;
            let independent = linear_independence_check(&normalized, tol);
            emit(
                out,
                &Json::Object(vec![
                    ("m", Json::Uint(normalized.len())),
                    ("max_correlation", Json::Float(report.max_corr)),
                    (
                        "pair",
                        Json::Array(vec![Json::Uint(pair.0), Json::Uint(pair.1)]),
                    ),
                    ("bound", Json::Float(report.bound)),
                    ("equality", Json::Bool(report.equality)),
                    ("equiangular", Json::Bool(report.equiangular)),
                    ("common_value", common.map_or(Json::Null, Json::Float)),
                    ("resolves_identity", Json::Bool(report.resolves_identity)),
                    ("linearly_independent", Json::Bool(independent)),
                ]),
            )
        }
        Command::CountBound { n, field } => {
            let (field_name, field_value) = match field {
                FieldArg::Real => ("real", ScalarField::Real),
                FieldArg::Complex => ("complex", ScalarField::Complex),
            };
            emit(
                out,
                &Json::Object(vec![
                    ("n", Json::Uint(n)),
                    ("field", Json::Str(field_name.to_string())),
                    ("bound", Json::Uint(equiangular_count_bound(n, field_value))),
                ]),
            )
        }
        Command::Random {
            config,
            action,
            seed,
            samples,
            trials,
        } => random_command(&config, action, seed, samples, trials, tol, out),
        Command::GroupOrbit {
            input,
            generators,
            out: out_path,
        } => {
            let p = load_projection(&input, tol)?;
            let doc: docs::GeneratorsDocument = serde_json::from_str(&read_file(&generators)?)
                .map_err(|e| CliError::Parse(e.to_string()))?;
            let mats: Vec<nalgebra::DMatrix<f64>> =
                doc.generators.iter().map(|g| g.to_dmatrix()).collect();
            let group = FiniteGroup::from_generators(doc.n, &mats, None)?;
            let (orbit, report) = group_orbit_tighten(&p, &group, tol)?;
            write_file(
                &out_path,
                &render_document(&frame_document_json(
                    orbit.dim(),
                    orbit.items(),
                    MatrixKind::Projection,
                )),
            )?;
            let warning = match report.warning {
                Some(RandomWarning::GroupNotIrreducible {
                    invariant_subspace_dim,
                }) => Json::Object(vec![
                    ("kind", Json::Str("GroupNotIrreducible".to_string())),
                    ("invariant_subspace_dim", Json::Uint(invariant_subspace_dim)),
                ]),
                None => Json::Null,
            };
            emit(
                out,
                &Json::Object(vec![
                    ("order", Json::Uint(group.order())),
                    ("A", Json::Float(report.lower)),
                    ("B", Json::Float(report.upper)),
                    ("tight", Json::Bool(report.tight)),
                    ("warning", warning),
                ]),
            )
        }
    }
}

fn synthesize_command<W: Write>(
    input: &Path,
    mode: SynthMode,
    out_path: &Path,
    tol: &Tolerance,
    out: &mut W,
) -> Result<(), CliError> {
    let t = load_operator(input, tol)?;
    let n = t.dim();
    match mode {
        SynthMode::Single => {
            // Rank dispatch: the low-rank construction when it applies, the
            // unit-eigenspace dichotomy otherwise.
            let d = spectral_decompose(&t);
            let rank = numerical_rank(&d, tol);
            let p = if 2 * rank <= n {
                synthesize_projection(&t, tol)?
            } else {
                synthesize_single_high_rank(&t, tol)?
            };
            write_file(
                out_path,
                &render_document(&matrix_document_json(MatrixKind::Projection, p.matrix())),
            )?;
            emit(
                out,
                &Json::Object(vec![
                    ("mode", Json::Str("single".to_string())),
                    ("n", Json::Uint(n)),
                    ("rank", Json::Uint(p.rank())),
                ]),
            )
        }
        SynthMode::Weighted => {
            let (v, p) = synthesize_weighted(&t, tol)?;
            write_file(
                out_path,
                &render_document(&frame_document_json(n, &[(v, p)], MatrixKind::Projection)),
            )?;
            emit(
                out,
                &Json::Object(vec![
                    ("mode", Json::Str("weighted".to_string())),
                    ("weight", Json::Float(v)),
                ]),
            )
        }
        SynthMode::Two => {
            let (p1, p2) = synthesize_two_projections(&t, tol)?;
            write_file(
                out_path,
                &render_document(&frame_document_json(
                    n,
                    &[(1.0, p1), (1.0, p2)],
                    MatrixKind::Projection,
                )),
            )?;
            emit(
                out,
                &Json::Object(vec![
                    ("mode", Json::Str("two".to_string())),
                    ("count", Json::Uint(2)),
                ]),
            )
        }
        SynthMode::Three => {
            let (p1, p2, p3) = synthesize_three_projections(&t, tol)?;
            write_file(
                out_path,
                &render_document(&frame_document_json(
                    n,
                    &[(1.0, p1), (1.0, p2), (1.0, p3)],
                    MatrixKind::Projection,
                )),
            )?;
            emit(
                out,
                &Json::Object(vec![
                    ("mode", Json::Str("three".to_string())),
                    ("count", Json::Uint(3)),
                ]),
            )
        }
        SynthMode::Indefinite => {
            let dec = decompose_indefinite(&t, tol);
            let document = Json::Object(vec![
                ("n", Json::Uint(n)),
                (
                    "positive",
                    Json::Object(vec![
                        ("weight", Json::Float(dec.positive_weight)),
                        (
                            "matrices",
                            Json::Array(vec![
                                docs::matrix_data_json(dec.p1.matrix()),
                                docs::matrix_data_json(dec.p2.matrix()),
                            ]),
                        ),
                    ]),
                ),
                (
                    "negative",
                    Json::Object(vec![
                        ("weight", Json::Float(dec.negative_weight)),
                        (
                            "matrices",
                            Json::Array(vec![
                                docs::matrix_data_json(dec.p3.matrix()),
                                docs::matrix_data_json(dec.p4.matrix()),
                            ]),
                        ),
                    ]),
                ),
            ]);
            write_file(out_path, &render_document(&document))?;
            emit(
                out,
                &Json::Object(vec![
                    ("mode", Json::Str("indefinite".to_string())),
                    ("positive_weight", Json::Float(dec.positive_weight)),
                    ("negative_weight", Json::Float(dec.negative_weight)),
                ]),
            )
        }
    }
}

fn build_sampler(
    doc: &SamplerDocument,
    seed: u64,
    tol: &Tolerance,
) -> Result<ProjectionSampler, CliError> {
    let kind = match doc.kind.as_str() {
        "deterministic" => {
            let matrix = doc.matrix.as_ref().ok_or_else(|| {
                CliError::Parse("deterministic sampler needs a `matrix` field".into())
            })?;
            SamplerKind::Deterministic(matrix.to_projection(tol)?)
        }
        "finite-discrete" => {
            let atoms = doc.atoms.as_ref().ok_or_else(|| {
                CliError::Parse("finite-discrete sampler needs an `atoms` list".into())
            })?;
            let mut converted = Vec::with_capacity(atoms.len());
            for atom in atoms {
                converted.push((atom.probability, atom.matrix.to_projection(tol)?));
            }
            SamplerKind::FiniteDiscrete(converted)
        }
        "haar-orthogonal" => SamplerKind::HaarOrthogonal {
            rank: doc.rank.ok_or_else(|| {
                CliError::Parse("haar-orthogonal sampler needs a `rank` field".into())
            })?,
        },
        "oblique-haar" => SamplerKind::ObliqueHaar {
            rank: doc.rank.ok_or_else(|| {
                CliError::Parse("oblique-haar sampler needs a `rank` field".into())
            })?,
            theta: doc.theta.unwrap_or(0.0),
        },
        other => {
            return Err(CliError::Parse(format!(
                "unknown sampler kind `{other}` (expected deterministic, finite-discrete, \
                 haar-orthogonal, oblique-haar)"
            )))
        }
    };
    Ok(ProjectionSampler::new(doc.n, kind, seed)?)
}

fn random_command<W: Write>(
    config: &Path,
    action: RandomAction,
    seed: u64,
    samples: usize,
    trials: usize,
    tol: &Tolerance,
    out: &mut W,
) -> Result<(), CliError> {
    let text = read_file(config)?;
    match action {
        RandomAction::Estimate => {
            let doc: SamplerDocument =
                serde_json::from_str(&text).map_err(|e| CliError::Parse(e.to_string()))?;
            let sampler = build_sampler(&doc, seed, tol)?;
            let report = exact_or_estimated_frame_operator(&sampler, samples)?;
            let trace_identity = if report.tight {
                let (lhs, rhs) = tight_bound_trace_identity(&report)?;
                Json::Array(vec![Json::Float(lhs), Json::Float(rhs)])
            } else {
                Json::Null
            };
            emit(
                out,
                &Json::Object(vec![
                    ("A", Json::Float(report.lower)),
                    ("B", Json::Float(report.upper)),
                    ("tight", Json::Bool(report.tight)),
                    ("samples_used", Json::Uint(report.samples_used)),
                    ("standard_error", Json::Float(report.standard_error)),
                    ("trace_identity", trace_identity),
                    (
                        "mean_operator",
                        docs::matrix_data_json(report.mean_operator.matrix()),
                    ),
                ]),
            )
        }
        RandomAction::Potential => {
            let doc: SamplerDocument =
                serde_json::from_str(&text).map_err(|e| CliError::Parse(e.to_string()))?;
            let sampler = build_sampler(&doc, seed, tol)?;
            let report = random_potential(&sampler, samples)?;
            emit(
                out,
                &Json::Object(vec![
                    ("potential", Json::Float(report.potential)),
                    ("mean_hs_norm_sq", Json::Float(report.mean_hs_norm_sq)),
                    ("bound", Json::Float(report.bound)),
                    ("equality", Json::Bool(report.equality)),
                    ("mean_rank", Json::Float(report.mean_rank)),
                    ("rank_bound", Json::Float(report.rank_bound)),
                    ("orthogonal_ae", Json::Bool(report.orthogonal_ae)),
                    ("samples_used", Json::Uint(report.samples_used)),
                ]),
            )
        }
        RandomAction::Variance => {
            let doc: VarianceConfigDocument =
                serde_json::from_str(&text).map_err(|e| CliError::Parse(e.to_string()))?;
            let mut samplers = Vec::with_capacity(doc.samplers.len());
            for (i, sampler_doc) in doc.samplers.iter().enumerate() {
                samplers.push(build_sampler(sampler_doc, seed.wrapping_add(i as u64), tol)?);
            }
            let report = variance_experiment(&samplers, trials)?;
            emit(
                out,
                &Json::Object(vec![
                    ("empirical", Json::Float(report.empirical)),
                    ("predicted", Json::Float(report.predicted)),
                    ("stderr", Json::Float(report.stderr)),
                    ("trials", Json::Uint(report.trials)),
                    ("samplers", Json::Uint(doc.samplers.len())),
                ]),
            )
        }
    }
}
