//! Command-line front end: every subcommand reads JSON documents, runs exact (or numeric)
//! checks and writes one JSON report. Exit codes: 0 ok, 1 check failed, 2 input error,
//! 3 internal invariant violation.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use cyclopop::cartan::{orbit_data, CartanData, CartanError, DiagramAut};
use cyclopop::exactalg::CycScalar;
use cyclopop::frame::{
    canonical_lambda0, eigenvalues, is_critical_exact, is_cyclotomic_tuple, is_generic, validate_lambda0, weight_at_infinity, BetheTuple,
    CriticalMode, FrameError, ProblemInstance,
};
use cyclopop::genengine::{cyclotomic_generate, explore_population, ExploreOptions, GenError};
use cyclopop::io::{self, FlagDoc, FrameReportDoc, IoError, SpaceDoc, TupleDoc};
use cyclopop::numerics::{check_numeric, NumericError, Tolerances};
use cyclopop::typea::{
    apply_flow, bilinear_form, cyclotomic_population, dual_of_space, flag_type, frame_conditions_check, generation_parameter_for,
    generator_node, is_cyclotomically_self_dual, isotropy_check, kernel_basis, witt_basis, FlowGenerator, TypeAError, TypeAFrame, WittMode,
    WittOptions,
};

#[derive(Parser, Debug)]
#[command(name = "cyclopop", version, about = "Exact checks for cyclotomic Bethe equations and their populations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Out {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct InstTuple {
    #[arg(long)]
    instance: PathBuf,
    /// Tuple document; defaults to the trivial tuple (1, ..., 1).
    #[arg(long)]
    tuple: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Orbits, linking numbers and the folded Cartan matrix.
    Fold {
        #[arg(long)]
        cartan: String,
        #[arg(long, default_value = "id")]
        sigma: String,
        #[command(flatten)]
        out: Out,
    },
    /// Check the weight at the origin.
    Validate {
        #[arg(long)]
        instance: PathBuf,
        /// Also check the type-A conditions for this p.
        #[arg(long)]
        p: Option<usize>,
        #[command(flatten)]
        out: Out,
    },
    /// Genericity, cyclotomy, criticality and the weight at infinity of a tuple.
    Verify {
        #[command(flatten)]
        io: InstTuple,
        #[command(flatten)]
        out: Out,
    },
    /// One cyclotomic generation step.
    Generate {
        #[command(flatten)]
        io: InstTuple,
        /// 1-based orbit representative.
        #[arg(long)]
        direction: usize,
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[command(flatten)]
        out: Out,
    },
    /// Breadth-first catalog of the population.
    Populate {
        #[command(flatten)]
        io: InstTuple,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        /// Comma-separated parameter values.
        #[arg(long, allow_hyphen_values = true)]
        samples: Option<String>,
        #[arg(long, default_value_t = 3)]
        retry_budget: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Spaces of quasi-polynomials in type A.
    Typea {
        #[command(subcommand)]
        cmd: TypeaCmd,
    },
    /// Exact eigenvalues of both Gaudin models.
    Eigenvalues {
        #[command(flatten)]
        io: InstTuple,
        #[command(flatten)]
        out: Out,
    },
    /// Canonical weight at the origin for type A_R.
    Lambda0 {
        #[arg(long)]
        rank: usize,
        #[arg(long, default_value_t = 2)]
        m: u32,
        #[command(flatten)]
        out: Out,
    },
    /// Float roots, residuals and gradient checks.
    CheckNumeric {
        #[command(flatten)]
        io: InstTuple,
        /// Residual tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Subcommand, Debug)]
enum TypeaCmd {
    /// Kernel space, frame clauses, exponents, self-duality, B matrix, Witt basis, flag report.
    Analyze {
        #[command(flatten)]
        io: InstTuple,
        #[arg(long)]
        p: Option<usize>,
        /// Allow square roots for the middle Witt vector.
        #[arg(long)]
        quadratic_extension: bool,
        #[command(flatten)]
        out: Out,
    },
    /// Apply exp(c X) to the flag of the tuple and compare with generation.
    Flow {
        #[command(flatten)]
        io: InstTuple,
        #[arg(long)]
        p: Option<usize>,
        /// X1, ..., Y1, ..., Ytilde, Z1, ...
        #[arg(long)]
        direction: String,
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        /// Population samples instead of a single flow.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Out,
    },
}

/// Failure classes mapped to exit codes.
enum Failure {
    Input(String, String),
    Internal(String, String),
}

impl Failure {
    fn input(kind: &str, e: impl std::fmt::Display) -> Self {
        Failure::Input(kind.into(), e.to_string())
    }
    fn internal(kind: &str, e: impl std::fmt::Display) -> Self {
        Failure::Internal(kind.into(), e.to_string())
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::input("io", e)
    }
}

impl From<CartanError> for Failure {
    fn from(e: CartanError) -> Self {
        Failure::input("cartan", e)
    }
}

impl From<FrameError> for Failure {
    fn from(e: FrameError) -> Self {
        match e {
            FrameError::Alg(_) => Failure::internal("frame", e),
            _ => Failure::input("frame", e),
        }
    }
}

impl From<GenError> for Failure {
    fn from(e: GenError) -> Self {
        match e {
            GenError::Frame(f) => f.into(),
            GenError::Internal(_) | GenError::Verification(_) => Failure::internal("genengine", e),
            _ => Failure::input("genengine", e),
        }
    }
}

impl From<TypeAError> for Failure {
    fn from(e: TypeAError) -> Self {
        match e {
            TypeAError::Frame(f) => f.into(),
            TypeAError::Verification(_) | TypeAError::Alg(_) => Failure::internal("typea", e),
            _ => Failure::input("typea", e),
        }
    }
}

impl From<NumericError> for Failure {
    fn from(e: NumericError) -> Self {
        match e {
            NumericError::Frame(f) => f.into(),
            _ => Failure::input("numerics", e),
        }
    }
}

type Res<T> = Result<T, Failure>;

fn read(path: &PathBuf) -> Res<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::input("io", format!("{}: {e}", path.display())))
}

fn load(io: &InstTuple) -> Res<(ProblemInstance, BetheTuple)> {
    let inst = io::instance_from_json(&read(&io.instance)?)?;
    let y = match &io.tuple {
        Some(p) => io::tuple_from_json(&read(p)?, inst.order())?,
        None => BetheTuple::trivial(inst.rank()),
    };
    if y.len() != inst.rank() {
        return Err(FrameError::WrongLength(y.len(), inst.rank()).into());
    }
    Ok((inst, y))
}

fn scalar(s: &str, order: u32) -> Res<CycScalar> {
    Ok(io::parse_scalar(s, order)?)
}

fn strs(v: &[CycScalar]) -> Vec<String> {
    v.iter().map(io::scalar_string).collect()
}

/// Report plus whether every requested check passed.
struct Report {
    body: Value,
    ok: bool,
}

fn verify_report(inst: &ProblemInstance, y: &BetheTuple) -> Res<Report> {
    let generic = is_generic(inst, y)?;
    let cyclotomic = is_cyclotomic_tuple(inst, y)?;
    let critical = match &generic {
        None => Some(is_critical_exact(inst, y, CriticalMode::Extended)?),
        Some(_) => None,
    };
    let lam = weight_at_infinity(inst, y)?;
    let ok = generic.is_none() && cyclotomic && critical.as_ref().is_some_and(|c| c.critical);
    Ok(Report {
        body: json!({
            "generic": generic.is_none(),
            "generic_failure": generic.map(|g| format!("{g:?}")),
            "cyclotomic": cyclotomic,
            "critical": critical.as_ref().map(|c| c.critical),
            "critical_per_colour": critical.as_ref().map(|c| c.per_colour.clone()),
            "lambda_infinity": lam.to_strings(),
        }),
        ok,
    })
}

fn run(cmd: &Cmd) -> Res<(Report, Option<PathBuf>)> {
    match cmd {
        Cmd::Fold { cartan, sigma, out } => {
            let c = CartanData::parse(cartan)?;
            let aut = DiagramAut::parse(&c, sigma)?;
            let body = match orbit_data(&c, &aut) {
                Ok(f) => Report {
                    body: json!({
                        "order": aut.order,
                        "representatives": f.reps.iter().map(|r| r + 1).collect::<Vec<_>>(),
                        "orbit_lengths": f.orbit_len,
                        "linking": f.linking,
                        "folded_cartan": f.a_fold,
                        "admissible": true,
                    }),
                    ok: true,
                },
                Err(CartanError::LinkingViolation(i, l)) => Report {
                    body: json!({"order": aut.order, "admissible": false, "violating_node": i + 1, "linking_number": l}),
                    ok: false,
                },
                Err(e) => return Err(e.into()),
            };
            Ok((body, out.out.clone()))
        }
        Cmd::Validate { instance, p, out } => {
            let inst = io::instance_from_json(&read(instance)?)?;
            let rep = validate_lambda0(&inst, *p)?;
            let v: Vec<String> = rep.violations.iter().map(|x| format!("{x:?}")).collect();
            Ok((Report { body: json!({"ok": rep.ok(), "violations": v}), ok: rep.ok() }, out.out.clone()))
        }
        Cmd::Verify { io, out } => {
            let (inst, y) = load(io)?;
            Ok((verify_report(&inst, &y)?, out.out.clone()))
        }
        Cmd::Generate { io, direction, c, out } => {
            let (inst, y) = load(io)?;
            let fold = inst.fold()?;
            if *direction == 0 || *direction > inst.rank() {
                return Err(Failure::input("args", format!("direction {direction} out of range")));
            }
            let c = scalar(c, inst.order())?;
            let (t, step) = cyclotomic_generate(&inst, &fold, &y, direction - 1, &c)?;
            let v = verify_report(&inst, &t)?;
            Ok((
                Report {
                    body: json!({
                        "direction": direction,
                        "c": io::scalar_string(&c),
                        "kind": format!("{:?}", step.kind),
                        "tuple": TupleDoc::from_tuple(&t),
                        "verification": v.body,
                    }),
                    ok: v.ok,
                },
                out.out.clone(),
            ))
        }
        Cmd::Populate { io, depth, samples, retry_budget, out } => {
            let (inst, y) = load(io)?;
            let fold = inst.fold()?;
            let mut opts = ExploreOptions { depth: *depth, retry_budget: *retry_budget, ..Default::default() };
            if let Some(s) = samples {
                opts.samples = s.split(',').map(|x| scalar(x.trim(), inst.order())).collect::<Res<_>>()?;
            }
            let g = explore_population(&inst, &fold, &y, &opts)?;
            let ok = g.nodes.iter().all(|n| n.flags.generic && n.flags.cyclotomic && n.flags.critical);
            let cat = io::catalog(&g);
            Ok((Report { body: serde_json::to_value(cat).unwrap(), ok }, out.out.clone()))
        }
        Cmd::Typea { cmd } => run_typea(cmd),
        Cmd::Eigenvalues { io, out } => {
            let (inst, y) = load(io)?;
            let e = eigenvalues(&inst, &y)?;
            Ok((
                Report {
                    body: json!({
                        "cyclotomic": strs(&e.cyclotomic),
                        "extended": strs(&e.extended),
                        "matches": e.matches,
                        "origin_zero": e.origin_zero,
                    }),
                    ok: e.matches && e.origin_zero,
                },
                out.out.clone(),
            ))
        }
        Cmd::Lambda0 { rank, m, out } => {
            let w = canonical_lambda0(*rank, *m)?;
            Ok((Report { body: json!({"rank": rank, "M": m, "lambda0": w.to_strings()}), ok: true }, out.out.clone()))
        }
        Cmd::CheckNumeric { io, tol, out } => {
            let (inst, y) = load(io)?;
            let mut t = Tolerances::default();
            if let Some(x) = tol {
                t.critical = *x;
            }
            let r = check_numeric(&inst, &y, &t)?;
            Ok((Report { ok: r.passed, body: serde_json::to_value(r).unwrap() }, out.out.clone()))
        }
    }
}

fn run_typea(cmd: &TypeaCmd) -> Res<(Report, Option<PathBuf>)> {
    match cmd {
        TypeaCmd::Analyze { io, p, quadratic_extension, out } => {
            let (inst, y) = load(io)?;
            let frame = TypeAFrame::for_tuple(&inst, *p, &y)?;
            let (space, flag) = kernel_basis(&frame, &y)?;
            let report = frame_conditions_check(&space);
            let dual = dual_of_space(&space)?;
            let self_dual = is_cyclotomically_self_dual(&space)?;
            let mut body = json!({
                "space": SpaceDoc::from_space(&space, None),
                "tuple_flag": FlagDoc::from_flag(&flag),
                "frame_check": FrameReportDoc::from(&report),
                "dual_basis": dual.iter().map(io::QuasiPolyDoc::from_qp).collect::<Vec<_>>(),
                "self_dual": self_dual,
            });
            let mut ok = report.ok() && self_dual;
            if self_dual {
                let form = bilinear_form(&space)?;
                let mode = if *quadratic_extension { WittMode::Normalized } else { WittMode::Reduced };
                let witt = witt_basis(&space, WittOptions { mode, quadratic: *quadratic_extension })?;
                let isotropic = isotropy_check(&space, &flag)?;
                let ty = flag_type(&space, &flag)?;
                ok &= isotropic && ty == frame.type_s();
                body["b_matrix"] = json!(io::matrix_strings(&form.gram));
                body["witt_basis"] = json!({
                    "mode": format!("{mode:?}"),
                    "vectors": witt.vectors.iter().map(io::QuasiPolyDoc::from_qp).collect::<Vec<_>>(),
                    "constants": strs(&witt.constants),
                    "middle_square": witt.middle_square.as_ref().map(io::scalar_string),
                    "top_wronskian": io::scalar_string(&witt.top_wronskian),
                });
                body["flag"] = json!({"isotropic": isotropic, "type": ty, "expected_type": frame.type_s()});
            }
            Ok((Report { body, ok }, out.clone().out))
        }
        TypeaCmd::Flow { io, p, direction, c, samples, seed, out } => {
            let (inst, y) = load(io)?;
            let gen: FlowGenerator = direction.parse().map_err(|e: String| Failure::input("args", e))?;
            let c = scalar(c, inst.order())?;
            let frame = TypeAFrame::for_tuple(&inst, *p, &y)?;
            let (space, flag) = kernel_basis(&frame, &y)?;
            let res = apply_flow(&space, &flag, gen, &c)?;
            let v = verify_report(&inst, &res.tuple)?;
            let fold = inst.fold()?;
            let node = generator_node(gen, frame.r, frame.p)?;
            let matched = generation_parameter_for(&inst, &fold, &y, node, &res.tuple).ok().flatten();
            let mut body = json!({
                "generator": gen.to_string(),
                "c": io::scalar_string(&c),
                "tuple": TupleDoc::from_tuple(&res.tuple),
                "flag": FlagDoc::from_flag(&res.flag),
                "verification": v.body,
                "generation_direction": node + 1,
                "generation_parameter": matched.as_ref().map(io::scalar_string),
            });
            let mut ok = v.ok;
            if let Some(n) = samples {
                let pop = cyclotomic_population(&inst, *p, &y)?;
                let s = pop.sample(&inst, *n, *seed, 4 * n + 10)?;
                ok &= s.members.iter().all(|m| m.critical && m.cyclotomic);
                body["population"] = json!({
                    "description": pop.description(),
                    "generators": pop.generators.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
                    "members": s.members.iter().map(|m| json!({
                        "params": strs(&m.params),
                        "tuple": TupleDoc::from_tuple(&m.tuple),
                        "critical": m.critical,
                        "cyclotomic": m.cyclotomic,
                    })).collect::<Vec<_>>(),
                    "skipped": s.skipped.len(),
                });
            }
            Ok((Report { body, ok }, out.out.clone()))
        }
    }
}

fn emit(v: &Value, path: Option<&PathBuf>) -> Result<(), String> {
    let s = serde_json::to_string_pretty(v).expect("reports serialize");
    match path {
        Some(p) => std::fs::write(p, s + "\n").map_err(|e| format!("{}: {e}", p.display())),
        None => {
            use std::io::Write;
            // a closed pipe is not an error for a report writer
            let _ = writeln!(std::io::stdout(), "{s}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.cmd) {
        Ok((rep, path)) => match emit(&rep.body, path.as_ref()) {
            Ok(()) => ExitCode::from(if rep.ok { 0 } else { 1 }),
            Err(e) => {
                eprintln!("{}", json!({"error": "io", "message": e}));
                ExitCode::from(2)
            }
        },
        Err(Failure::Input(kind, msg)) => {
            eprintln!("{}", json!({"error": kind, "message": msg, "class": "input"}));
            ExitCode::from(2)
        }
        Err(Failure::Internal(kind, msg)) => {
            eprintln!("{}", json!({"error": kind, "message": msg, "class": "internal"}));
            ExitCode::from(3)
        }
    }
}
