//! Command-line frontend for `rkhs-core`.
//!
//! Every command reads JSON inputs, runs one computation and produces a
//! [`Report`]. Exit codes: 0 pass/feasible/consistent, 1 fail/infeasible/
//! refuted, 2 input or hypothesis error.

pub mod input;
pub mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rkhs_core::cnp::{self, CnpStatus};
use rkhs_core::fock::{self, TruncatedSpace};
use rkhs_core::kernels::{self, KernelSpec, Nodes};
use rkhs_core::linalg::HermitianMatrix;
use rkhs_core::{pick, reconstruct, Complex64};
use serde_json::{json, Value};

pub use report::{Failure, Format, Report, EXIT_ERROR, EXIT_FAIL, EXIT_PASS};

use input::{Parsed, SubspaceSpec};
use report::InputDigest;

#[derive(Debug, Clone, Parser)]
#[command(
    name = "rkhs",
    version,
    about = "Kernel, Pick and Drury-Arveson computations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, PartialEq, clap::Args)]
pub struct Options {
    /// Relative PSD tolerance.
    #[arg(long, global = true, default_value_t = rkhs_core::DEFAULT_TOL)]
    pub tol: f64,
    /// Truncation degree of the Fock space.
    #[arg(long, global = true, default_value_t = 12)]
    pub degree: usize,
    /// Coefficients used for named power-series kernels.
    #[arg(long, global = true, default_value_t = 200)]
    pub terms: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            tol: rkhs_core::DEFAULT_TOL,
            degree: 12,
            terms: 200,
            format: Format::Json,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Sample-level CNP test: positivity of 1 - 1/K~.
    CnpCheck {
        kernel: PathBuf,
        /// Points or labels; defaults to every label of a sampled kernel.
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        base: usize,
    },
    /// Ratio tests on power-series coefficients.
    RatioCheck { coeffs: PathBuf },
    /// Pick matrix feasibility and minimal interpolation norm.
    Pick {
        problem: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        level: f64,
        /// Width of the final bisection bracket.
        #[arg(long, default_value_t = 1e-10)]
        bisection_width: f64,
    },
    /// Embedding of a normalized sample into the Drury-Arveson ball.
    Embed {
        kernel: PathBuf,
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        base: usize,
    },
    /// Classification and (delta, j) recovery.
    Reconstruct {
        kernel: PathBuf,
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        base: usize,
        /// Declared Blaschke family of the full recovered set.
        #[arg(long)]
        family: Option<PathBuf>,
    },
    /// Irreducible partition of a sample.
    Partition {
        kernel: PathBuf,
        #[arg(long)]
        points: Option<PathBuf>,
    },
    /// Blaschke sum of a radius family.
    Blaschke { family: PathBuf },
    /// Membership of K(., z) in the kernel span of a finite set.
    Closure {
        #[arg(long)]
        points: PathBuf,
        /// Point as inline JSON, e.g. `[[0.3, 0], [0, 0]]`.
        #[arg(long)]
        at: String,
    },
    /// Truncated Drury-Arveson computations.
    #[command(subcommand)]
    Fock(FockCommand),
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum FockCommand {
    /// Exact norms for the multiplier z1 z2 at z1 z2.
    Arveson,
    /// Adjoint and forward norms of the multiplier <., z>.
    Lemma32 {
        /// Point as inline JSON.
        #[arg(long)]
        point: String,
        /// Largest power n in the kerpart checks.
        #[arg(long, default_value_t = 10)]
        max_power: usize,
    },
    /// Smallest eigenvalue of the self-commutator of a compressed multiplier.
    Defect { input: PathBuf },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::CnpCheck { .. } => "cnp-check",
            Self::RatioCheck { .. } => "ratio-check",
            Self::Pick { .. } => "pick",
            Self::Embed { .. } => "embed",
            Self::Reconstruct { .. } => "reconstruct",
            Self::Partition { .. } => "partition",
            Self::Blaschke { .. } => "blaschke",
            Self::Closure { .. } => "closure",
            Self::Fock(FockCommand::Arveson) => "fock arveson",
            Self::Fock(FockCommand::Lemma32 { .. }) => "fock lemma32",
            Self::Fock(FockCommand::Defect { .. }) => "fock defect",
        }
    }
}

/// Rendered output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub exit_code: u8,
    /// The text is a usage message rather than a report.
    pub usage: bool,
}

/// Parses arguments and runs the command. Usage errors carry clap's
/// message and exit code 2.
pub fn execute<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => {
            let r = run(&cli.command, &cli.options);
            Output {
                text: r.render(cli.options.format),
                exit_code: r.exit_code,
                usage: false,
            }
        }
        Err(e) => {
            let exit_code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_ERROR,
            };
            Output {
                text: e.render().to_string(),
                exit_code,
                usage: exit_code != 0,
            }
        }
    }
}

/// Collects inputs into the digest as they are read.
struct Ctx<'a> {
    opts: &'a Options,
    digest: InputDigest,
}

impl Ctx<'_> {
    fn flag(&mut self, name: &str, value: impl std::fmt::Display) {
        self.digest.add(format!("{name}={value}").as_bytes());
    }

    fn file(&mut self, path: &Path) -> Parsed<Value> {
        let (v, bytes) = input::read_json(path)?;
        self.digest.add(&bytes);
        Ok(v)
    }

    fn inline(&mut self, name: &str, text: &str) -> Parsed<Value> {
        self.flag(name, text);
        input::parse_inline(name, text)
    }

    fn kernel(&mut self, path: &Path) -> Parsed<KernelSpec> {
        let v = self.file(path)?;
        input::kernel_spec(&v, self.opts.terms, self.opts.tol)
    }

    /// Kernel and Gram matrix at the requested nodes.
    fn sample(&mut self, kernel: &Path, points: Option<&Path>) -> Parsed<(Nodes, HermitianMatrix)> {
        let spec = self.kernel(kernel)?;
        let nodes = match (points, &spec) {
            (Some(p), _) => {
                let v = self.file(p)?;
                input::nodes(&v, "points")?
            }
            (None, KernelSpec::SampledGram { labels, .. }) => Nodes::Labels(labels.clone()),
            (None, _) => return Err(Failure::input("--points is required for this kernel")),
        };
        if nodes.is_empty() {
            return Err(Failure::input("points: at least one point is required"));
        }
        let g = kernels::gram_at(&spec, &nodes)?;
        Ok((nodes, g))
    }
}

/// Runs one command. Never panics on bad input; errors become reports with
/// a nonzero exit code.
pub fn run(command: &Command, opts: &Options) -> Report {
    let mut ctx = Ctx {
        opts,
        digest: InputDigest::default(),
    };
    ctx.flag("command", command.name());
    ctx.flag("tol", opts.tol);
    ctx.flag("degree", opts.degree);
    ctx.flag("terms", opts.terms);
    let mut tolerances = json!({
        "tol": opts.tol,
        "degree": opts.degree,
        "terms": opts.terms,
    });
    let outcome = if opts.tol.is_finite() && opts.tol >= 0.0 {
        dispatch(command, &mut ctx, &mut tolerances)
    } else {
        Err(Failure::input(format!(
            "--tol must be a non-negative number, got {}",
            opts.tol
        )))
    };
    let (verdicts, exit_code) = match outcome {
        Ok(x) => x,
        Err(f) => (json!({ "error": f.message }), f.exit_code),
    };
    Report {
        command: command.name().to_string(),
        inputs_digest: ctx.digest.finish(),
        tolerances,
        verdicts,
        exit_code,
    }
}

fn pass_if(ok: bool) -> u8 {
    if ok {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn dispatch(command: &Command, ctx: &mut Ctx, tolerances: &mut Value) -> Parsed<(Value, u8)> {
    let tol = ctx.opts.tol;
    match command {
        Command::CnpCheck {
            kernel,
            points,
            base,
        } => {
            ctx.flag("base", base);
            let (_, g) = ctx.sample(kernel, points.as_deref())?;
            let v = cnp::cnp_sample_check(&g, *base, tol)?;
            let ok = v.status == CnpStatus::Consistent;
            Ok((
                json!({
                    "status": v.status,
                    "min_eig": v.min_eig,
                    "base": base,
                    "note": if ok {
                        "sample consistent with the complete Nevanlinna-Pick property; not a proof for the full space"
                    } else {
                        "1 - 1/K~ has a negative eigenvalue: the kernel does not have the complete Nevanlinna-Pick property"
                    },
                }),
                pass_if(ok),
            ))
        }
        Command::RatioCheck { coeffs } => {
            let v = ctx.file(coeffs)?;
            let c = input::coefficient_file(&v, ctx.opts.terms)?;
            let exact = matches!(c, cnp::Coefficients::Exact(_));
            if !exact {
                tolerances["ratio_rel_tol"] = json!(cnp::RATIO_REL_TOL);
            }
            let r = cnp::ratio_report(&c)?;
            Ok((
                json!({
                    "arithmetic": if exact { "exact" } else { "float" },
                    "coefficients": c.len(),
                    "hyponormal_ok": r.hyponormal_ok,
                    "np_ok": r.np_ok,
                    "geometric": r.geometric,
                    "hyponormal_violation": r.hyponormal_violation,
                    "np_violation": r.np_violation,
                    "note": "np_ok is a sufficient condition only; its failure does not refute the complete Nevanlinna-Pick property",
                }),
                pass_if(r.geometric),
            ))
        }
        Command::Pick {
            problem,
            level,
            bisection_width,
        } => {
            ctx.flag("level", level);
            ctx.flag("bisection_width", bisection_width);
            tolerances["bisection_width"] = json!(bisection_width);
            tolerances["bisection_psd_tol"] = json!(pick::BISECTION_PSD_TOL);
            let v = ctx.file(problem)?;
            let p = input::pick_problem(&v, ctx.opts.terms, tol)?;
            let f = pick::pick_feasible(&p, *level, tol)?;
            let (t_star, t_err) = match pick::minimal_interpolation_norm(&p, *bisection_width) {
                Ok(t) => (json!(t), Value::Null),
                Err(e) => (Value::Null, json!(e.to_string())),
            };
            Ok((
                json!({
                    "level": level,
                    "feasible": f.is_psd,
                    "min_eig": f.min_eig,
                    "minimal_norm": t_star,
                    "minimal_norm_error": t_err,
                    "note": "Pick positivity is necessary for interpolation; it is sufficient only for kernels with the Nevanlinna-Pick property",
                }),
                pass_if(f.is_psd),
            ))
        }
        Command::Embed {
            kernel,
            points,
            base,
        } => {
            ctx.flag("base", base);
            let (_, g) = ctx.sample(kernel, points.as_deref())?;
            let e = cnp::agler_mccarthy_embed(&g, *base, tol)?;
            Ok((
                json!({
                    "rank": e.rank,
                    "base": e.base_index,
                    "b_points": report::points(&e.b_points),
                    "delta": report::complex_vec(&e.normalized.delta),
                    "residual": e.residual,
                    "kernel_residual": e.kernel_residual,
                }),
                EXIT_PASS,
            ))
        }
        Command::Reconstruct {
            kernel,
            points,
            base,
            family,
        } => {
            ctx.flag("base", base);
            let (_, g) = ctx.sample(kernel, points.as_deref())?;
            let declared = match family {
                Some(path) => {
                    let v = ctx.file(path)?;
                    Some(cnp::blaschke_classify(&input::blaschke_family(&v)?)?)
                }
                None => None,
            };
            let r = reconstruct::classify(&g, *base, tol)?;
            let mut notes = r.notes.clone();
            if let Some(d) = &declared {
                notes.retain(|n| n != reconstruct::FINITE_UNIQUENESS_NOTE);
                notes.push(
                    if d.is_uniqueness_set {
                        "declared family is a set of uniqueness"
                    } else {
                        "declared family is not a set of uniqueness"
                    }
                    .into(),
                );
            }
            Ok((
                json!({
                    "classification": r.classification,
                    "rank": r.rank,
                    "base": r.base_index,
                    "delta": report::complex_vec(&r.delta),
                    "j_values": r.j_values.as_deref().map(report::complex_vec),
                    "b_points": report::points(&r.b_points),
                    "factorization_residual": r.factorization_residual,
                    "declared_family": declared,
                    "notes": notes,
                }),
                EXIT_PASS,
            ))
        }
        Command::Partition { kernel, points } => {
            let (nodes, g) = ctx.sample(kernel, points.as_deref())?;
            let classes = kernels::irreducible_partition(&g, tol);
            let named: Vec<Vec<String>> = match &nodes {
                Nodes::Labels(ls) => classes
                    .iter()
                    .map(|c| c.iter().map(|&i| ls[i].clone()).collect())
                    .collect(),
                Nodes::Points(_) => classes
                    .iter()
                    .map(|c| c.iter().map(usize::to_string).collect())
                    .collect(),
            };
            Ok((
                json!({
                    "classes": classes,
                    "class_members": named,
                    "irreducible": kernels::check_irreducible_sample(&g, tol),
                }),
                EXIT_PASS,
            ))
        }
        Command::Blaschke { family } => {
            let v = ctx.file(family)?;
            let c = cnp::blaschke_classify(&input::blaschke_family(&v)?)?;
            Ok((
                json!({
                    "sum": c.sum,
                    "is_uniqueness_set": c.is_uniqueness_set,
                }),
                EXIT_PASS,
            ))
        }
        Command::Closure { points, at } => {
            let v = ctx.file(points)?;
            let y = input::point_set(&v, "points")?;
            let zv = ctx.inline("at", at)?;
            let z = input::point(&zv, "at")?;
            let m = fock::in_closure(&z, &y, ctx.opts.degree, tol)?;
            Ok((
                json!({
                    "member": m.member,
                    "residual": m.residual,
                    "note": "membership is decided on polynomials of degree at most --degree",
                }),
                pass_if(m.member),
            ))
        }
        Command::Fock(FockCommand::Arveson) => {
            let w = fock::arveson_example();
            let hyponormal = w.norm_sq_fwd >= w.norm_sq_adj;
            Ok((
                json!({
                    "multiplier": "z1 z2",
                    "vector": "z1 z2",
                    "norm_sq_forward": report::rational(&w.norm_sq_fwd),
                    "norm_sq_adjoint": report::rational(&w.norm_sq_adj),
                    "hyponormal": hyponormal,
                }),
                EXIT_PASS,
            ))
        }
        Command::Fock(FockCommand::Lemma32 { point, max_power }) => {
            ctx.flag("max_power", max_power);
            let zv = ctx.inline("point", point)?;
            let z: Vec<Complex64> = input::point(&zv, "point")?;
            let degree = ctx.opts.degree;
            let c = fock::lemma32_identity_check(&z, degree)?;
            let r = rkhs_core::linalg::norm(&z);
            let mut ok = (c.lhs - c.rhs).abs() <= c.tail_bound;
            let mut powers = Vec::new();
            for n in 2..=(*max_power).min(degree) {
                let (adj, fwd) = fock::kerpart_adjoint_norm_check(&z, n, degree)?;
                let expected = r.powi(n as i32);
                let scale = expected.max(f64::MIN_POSITIVE);
                let agree =
                    (adj - expected).abs() <= tol * scale && (fwd - expected).abs() <= tol * scale;
                ok &= agree;
                powers.push(json!({
                    "n": n,
                    "adjoint_norm": adj,
                    "forward_norm": fwd,
                    "expected": expected,
                    "agree": agree,
                }));
            }
            Ok((
                json!({
                    "lhs": c.lhs,
                    "rhs": c.rhs,
                    "difference": (c.lhs - c.rhs).abs(),
                    "tail_bound": c.tail_bound,
                    "within_tail_bound": (c.lhs - c.rhs).abs() <= c.tail_bound,
                    "kerpart_powers": powers,
                }),
                pass_if(ok),
            ))
        }
        Command::Fock(FockCommand::Defect { input: path }) => {
            let v = ctx.file(path)?;
            let d = input::defect_input(&v)?;
            let space = TruncatedSpace::new(d.phi.dim(), ctx.opts.degree)?;
            let f = match &d.subspace {
                SubspaceSpec::Monomials(ms) => space.monomial_subspace(ms)?,
                SubspaceSpec::KernelSpan(y) => fock::kernel_span(&space, y)?,
            };
            let c = fock::compression_defect(&d.phi, &space, &f, tol)?;
            Ok((
                json!({
                    "defect": c.defect,
                    "hyponormal": c.hyponormal,
                    "subspace_dim": f.dim(),
                    "note": "a negative defect refutes hyponormality of the compression; a non-negative one is evidence on this window only",
                }),
                pass_if(c.hyponormal),
            ))
        }
    }
}
