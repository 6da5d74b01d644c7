//! Argument parsing, command dispatch, and the JSON envelope.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use polyopt::morse::{morse_report, zeros_on_set, MorseConfig, MorseVerdict};
use polyopt::nondegen::{compactness_certificate, khovanskii_nondegenerate, Conclusion, SearchConfig, Status};
use polyopt::polytope::GlobalNewtonPolytope;
use polyopt::relax::{
    gradient_moment, kkt_relaxation, lasserre_relaxation, membership_probe, minimize_ladder, ConeMode, MinimizeMode, ProbeMode,
    ProbeOutcome, RelaxConfig, RelaxationProblem,
};
use polyopt::sdp::{eliminate_equalities, parse_sdpa, solve_lmi, split_equalities, write_sdpa, SdpStatus};

use crate::problem::{parse_order_range, Problem, ProblemError, ProblemFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VERDICT: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

/// Version of the JSON result envelope.
pub const RESULT_VERSION: u32 = 1;

const DEFAULT_RADIUS: f64 = 10.0;

#[derive(Parser, Debug)]
#[command(name = "polyopt", version, about = "Compactness certificates, Morse checks and SOS/moment relaxations for polynomial optimization")]
pub struct Cli {
    #[command(flatten)]
    pub tol: TolArgs,
    /// Indent the JSON output.
    #[arg(long, global = true)]
    pub pretty: bool,
    #[command(subcommand)]
    pub command: Command,
}

/// Every numerical tolerance, with the library defaults in brackets.
#[derive(Args, Debug, Default, Clone)]
pub struct TolArgs {
    /// SDP duality gap target [1e-8].
    #[arg(long, global = true, value_name = "X")]
    pub tol_gap: Option<f64>,
    /// SDP primal/dual feasibility [1e-8].
    #[arg(long, global = true, value_name = "X")]
    pub tol_feas: Option<f64>,
    /// Residual bound for accepting infeasibility certificates [1e-7].
    #[arg(long, global = true, value_name = "X")]
    pub tol_cert: Option<f64>,
    /// Eigenvalue ratio for rank-one extraction [1e-5].
    #[arg(long, global = true, value_name = "X")]
    pub tol_rank: Option<f64>,
    /// Allowed decrease between ladder bounds [1e-7].
    #[arg(long, global = true, value_name = "X")]
    pub tol_ladder: Option<f64>,
    /// Gradient norm at accepted critical points [1e-8].
    #[arg(long, global = true, value_name = "X")]
    pub tol_gradient: Option<f64>,
    /// Relative Hessian eigenvalue threshold [1e-6].
    #[arg(long, global = true, value_name = "X")]
    pub tol_hessian: Option<f64>,
    /// |f| at accepted zeros [1e-8].
    #[arg(long, global = true, value_name = "X")]
    pub tol_zero: Option<f64>,
    /// Slack for interior tests [1e-7].
    #[arg(long, global = true, value_name = "X")]
    pub tol_interior: Option<f64>,
    /// Residual for accepting a torus witness [1e-6].
    #[arg(long, global = true, value_name = "X")]
    pub tol_witness: Option<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Gradient,
    Lasserre,
    Kkt,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ConeArg {
    Qm,
    Preordering,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ProbeArg {
    Sos,
    Qm,
    Preordering,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum SolverArg {
    Internal,
    External,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum EqualityArg {
    Eliminate,
    Split,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Newton polytope at infinity, convenience and the Khovanskii verdict.
    Analyze { file: PathBuf },
    /// Both compactness certificate routes with their face logs.
    Compactness { file: PathBuf },
    /// Critical points of the objective and the Morse verdict.
    Morse {
        file: PathBuf,
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Zeros of the objective on the constraint set.
    Zeros {
        file: PathBuf,
        #[arg(long)]
        radius: Option<f64>,
    },
    /// A ladder of relaxations with bounds and minimizer extraction.
    Minimize {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "gradient")]
        mode: ModeArg,
        /// `N` or `N..M`.
        #[arg(long)]
        order: Option<String>,
        #[arg(long, value_enum, default_value = "qm")]
        cone: ConeArg,
        /// Also solve the SOS side of the gradient relaxation.
        #[arg(long)]
        both_sides: bool,
        #[arg(long, value_enum, default_value = "internal")]
        solver: SolverArg,
        /// Program run as `<command> <input.dat-s> <output>` for `--solver external`;
        /// its output must contain `objValPrimal = <value>`.
        #[arg(long)]
        external_command: Option<String>,
    },
    /// Truncated membership of the objective in Σ, M_G or T_G.
    Probe {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "sos")]
        mode: ProbeArg,
        /// `N` or `N..M`.
        #[arg(long)]
        order: Option<String>,
    },
    /// Writes a relaxation in SDPA sparse format.
    ExportSdpa {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "lasserre")]
        mode: ModeArg,
        #[arg(long)]
        order: Option<u32>,
        #[arg(long, value_enum, default_value = "qm")]
        cone: ConeArg,
        #[arg(long, value_enum, default_value = "eliminate")]
        equalities: EqualityArg,
        /// Output path; the SDPA text goes to standard output when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solves an SDPA file with the internal solver and writes `objValPrimal`.
    #[command(hide = true)]
    SolveSdpa { input: PathBuf, output: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Analyze { .. } => "analyze",
            Command::Compactness { .. } => "compactness",
            Command::Morse { .. } => "morse",
            Command::Zeros { .. } => "zeros",
            Command::Minimize { .. } => "minimize",
            Command::Probe { .. } => "probe",
            Command::ExportSdpa { .. } => "export-sdpa",
            Command::SolveSdpa { .. } => "solve-sdpa",
        }
    }
}

/// A failed command: exit code plus a JSON diagnostic.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    fn parse(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_PARSE,
            kind: "parse",
            message: message.into(),
        }
    }

    fn solver(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_SOLVER,
            kind: "solver",
            message: message.into(),
        }
    }
}

impl From<ProblemError> for Failure {
    fn from(e: ProblemError) -> Self {
        Failure::parse(e.to_string())
    }
}

impl From<polyopt::Error> for Failure {
    fn from(e: polyopt::Error) -> Self {
        use polyopt::Error as E;
        let kind = match e {
            E::Syntax { .. } | E::UnknownVariable { .. } | E::NegativeExponent { .. } | E::InvalidVariables(_) | E::SdpaParse { .. } => "parse",
            _ => "input",
        };
        Failure {
            code: EXIT_PARSE,
            kind,
            message: e.to_string(),
        }
    }
}

/// What a command produced: stdout text and an exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

struct Done {
    code: i32,
    result: Value,
    warnings: Vec<String>,
    /// Raw text printed instead of the envelope (SDPA export to stdout).
    raw: Option<String>,
}

fn done(code: i32, result: impl Serialize) -> Result<Done, Failure> {
    Ok(Done {
        code,
        result: serde_json::to_value(result).map_err(|e| Failure::solver(e.to_string()))?,
        warnings: Vec::new(),
        raw: None,
    })
}

/// Runs one invocation; never panics on bad input.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                let code = if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand { EXIT_PARSE } else { EXIT_OK };
                return Outcome {
                    code,
                    stdout: e.render().to_string(),
                };
            }
            let fail = Failure::parse(e.render().to_string().trim().to_string());
            return envelope(None, false, Err(fail));
        }
    };
    let name = cli.command.name();
    let pretty = cli.pretty;
    let res = dispatch(&cli);
    envelope(Some(name), pretty, res)
}

fn envelope(command: Option<&str>, pretty: bool, res: Result<Done, Failure>) -> Outcome {
    let (code, value) = match res {
        Ok(Done { raw: Some(text), code, .. }) => return Outcome { code, stdout: text },
        Ok(d) => (
            d.code,
            json!({
                "command": command,
                "version": RESULT_VERSION,
                "exit_code": d.code,
                "warnings": d.warnings,
                "result": d.result,
            }),
        ),
        Err(f) => (
            f.code,
            json!({
                "command": command,
                "version": RESULT_VERSION,
                "exit_code": f.code,
                "error": { "kind": f.kind, "message": f.message },
            }),
        ),
    };
    let mut stdout = if pretty {
        serde_json::to_string_pretty(&value)
    } else {
        serde_json::to_string(&value)
    }
    .expect("JSON values always serialize");
    stdout.push('\n');
    Outcome { code, stdout }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s).map_err(|e| Failure::parse(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Problem, Failure> {
    Ok(ProblemFile::from_json(&read_text(path)?)?.parse()?)
}

fn positive(name: &str, v: Option<f64>) -> Result<Option<f64>, Failure> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(Failure::parse(format!("--{name} must be a positive number"))),
        _ => Ok(v),
    }
}

/// Tolerances from the file, overridden by flags.
struct Configs {
    relax: RelaxConfig,
    morse: MorseConfig,
    search: SearchConfig,
}

fn configs(tol: &TolArgs, p: Option<&Problem>) -> Result<Configs, Failure> {
    let t = p.map(|p| p.options.tolerances.clone()).unwrap_or_default();
    let pick = |name: &str, flag: Option<f64>, file: Option<f64>| positive(name, flag.or(file));
    let mut relax = RelaxConfig::default();
    let mut morse = MorseConfig::default();
    let mut search = SearchConfig::default();
    if let Some(v) = pick("tol-gap", tol.tol_gap, t.gap)? {
        relax.sdp.gap_tolerance = v;
        relax.sdp.acceptable_gap = relax.sdp.acceptable_gap.max(v);
    }
    if let Some(v) = pick("tol-feas", tol.tol_feas, t.feasibility)? {
        relax.sdp.feasibility_tolerance = v;
    }
    if let Some(v) = pick("tol-cert", tol.tol_cert, t.certificate)? {
        relax.certificate_tolerance = v;
    }
    if let Some(v) = pick("tol-rank", tol.tol_rank, t.rank)? {
        relax.rank_tolerance = v;
    }
    if let Some(v) = pick("tol-ladder", tol.tol_ladder, t.ladder)? {
        relax.ladder_tolerance = v;
    }
    if let Some(v) = pick("tol-gradient", tol.tol_gradient, t.gradient)? {
        morse.gradient_tolerance = v;
    }
    if let Some(v) = pick("tol-hessian", tol.tol_hessian, t.hessian)? {
        morse.hessian_tolerance = v;
    }
    if let Some(v) = pick("tol-zero", tol.tol_zero, t.zero)? {
        morse.zero_tolerance = v;
    }
    if let Some(v) = pick("tol-interior", tol.tol_interior, t.interior)? {
        morse.interior_tolerance = v;
    }
    if let Some(v) = pick("tol-witness", tol.tol_witness, t.witness)? {
        search.witness_tolerance = v;
    }
    Ok(Configs { relax, morse, search })
}

fn order_range(flag: Option<&String>, p: &Problem) -> Result<(u32, u32), Failure> {
    match flag.or(p.options.order.as_ref()) {
        Some(s) => Ok(parse_order_range(s)?),
        None => Ok((1, 1)),
    }
}

fn with_radius(p: &Problem, radius: Option<f64>) -> Result<polyopt::morse::SearchBox, Failure> {
    positive("radius", radius)?;
    let mut p = p.clone();
    if radius.is_some() {
        p.options.radius = radius;
        p.options.search_box = None;
    }
    Ok(p.search_box(DEFAULT_RADIUS)?)
}

fn dispatch(cli: &Cli) -> Result<Done, Failure> {
    match &cli.command {
        Command::Analyze { file } => {
            let p = load(file)?;
            let cfg = configs(&cli.tol, Some(&p))?;
            let f = &p.objective;
            let gamma = GlobalNewtonPolytope::from_polynomial(f)?;
            let verdict = khovanskii_nondegenerate(f, &cfg.search)?;
            let code = if verdict.status == Status::Degenerate { EXIT_VERDICT } else { EXIT_OK };
            done(
                code,
                json!({
                    "polynomial": f.to_text(&p.variables),
                    "convenient": gamma.is_convenient(),
                    "vertices": gamma.vertices(),
                    "newton_polytope": gamma,
                    "khovanskii": verdict,
                }),
            )
        }
        Command::Compactness { file } => {
            let p = load(file)?;
            let cfg = configs(&cli.tol, Some(&p))?;
            let cert = compactness_certificate(&p.system, None, &cfg.search)?;
            let code = match cert.conclusion {
                Conclusion::CertifiedCompact | Conclusion::LikelyCompact => EXIT_OK,
                Conclusion::Unknown | Conclusion::WitnessNoncompactHint => EXIT_VERDICT,
            };
            done(code, cert)
        }
        Command::Morse { file, radius } => {
            let p = load(file)?;
            let cfg = configs(&cli.tol, Some(&p))?;
            let bx = with_radius(&p, *radius)?;
            let report = morse_report(&p.objective, &bx, &cfg.morse)?;
            let code = if report.verdict == MorseVerdict::NotMorse { EXIT_VERDICT } else { EXIT_OK };
            done(code, report)
        }
        Command::Zeros { file, radius } => {
            let p = load(file)?;
            let cfg = configs(&cli.tol, Some(&p))?;
            let bx = with_radius(&p, *radius)?;
            done(EXIT_OK, zeros_on_set(&p.objective, &p.constraints, &bx, &cfg.morse)?)
        }
        Command::Minimize {
            file,
            mode,
            order,
            cone,
            both_sides,
            solver,
            external_command,
        } => {
            let p = load(file)?;
            let mut cfg = configs(&cli.tol, Some(&p))?;
            cfg.relax.gradient_sos_side = *both_sides;
            let (lo, hi) = order_range(order.as_ref(), &p)?;
            let mode = minimize_mode(*mode);
            let cone = cone_mode(*cone);
            let report = minimize_ladder(&p.objective, &p.constraints, mode, cone, lo, hi, &cfg.relax)?;
            let mut code = EXIT_OK;
            for s in &report.steps {
                code = code.max(match s.result.status {
                    SdpStatus::Optimal => EXIT_OK,
                    SdpStatus::PrimalInfeasible | SdpStatus::DualInfeasible => EXIT_VERDICT,
                    SdpStatus::MaxIterations | SdpStatus::NumericalFailure => EXIT_SOLVER,
                });
            }
            let mut result = serde_json::to_value(&report).map_err(|e| Failure::solver(e.to_string()))?;
            if *solver == SolverArg::External {
                let cmd = external_command
                    .as_deref()
                    .ok_or_else(|| Failure::parse("--solver external needs --external-command"))?;
                let mut checks = Vec::new();
                for s in &report.steps {
                    if s.requested_order != s.order {
                        continue;
                    }
                    let problem = build(&p, mode, cone, s.order)?;
                    let bound = external_bound(&problem, cmd)?;
                    let diff = match s.result.lower_bound {
                        Some(b) => Some((b - bound).abs()),
                        None => None,
                    };
                    checks.push(json!({
                        "order": s.order,
                        "external_bound": bound,
                        "internal_bound": s.result.lower_bound,
                        "difference": diff,
                        "agrees": diff.map(|d| d <= 1e-6 * (1.0 + bound.abs())),
                    }));
                }
                result["external"] = json!({ "command": cmd, "checks": checks });
            }
            Ok(Done {
                code,
                result,
                warnings: report.warnings.clone(),
                raw: None,
            })
        }
        Command::Probe { file, mode, order } => {
            let p = load(file)?;
            let cfg = configs(&cli.tol, Some(&p))?;
            let (lo, hi) = order_range(order.as_ref(), &p)?;
            let mode = match mode {
                ProbeArg::Sos => ProbeMode::Sos,
                ProbeArg::Qm => ProbeMode::QuadraticModule,
                ProbeArg::Preordering => ProbeMode::Preordering,
            };
            let mut reports = Vec::new();
            let mut warnings = Vec::new();
            let mut code = EXIT_OK;
            let mut n = lo;
            while n <= hi {
                let r = match membership_probe(&p.objective, &p.constraints, n, mode, &cfg.relax) {
                    Err(polyopt::Error::OrderTooSmall { order, floor }) => {
                        warnings.push(format!("order {order} raised to the degree floor {floor}"));
                        n = floor;
                        continue;
                    }
                    r => r?,
                };
                n += 1;
                code = code.max(match r.outcome {
                    ProbeOutcome::Feasible { .. } => EXIT_OK,
                    ProbeOutcome::Infeasible { .. } => EXIT_VERDICT,
                    ProbeOutcome::Inconclusive { .. } => EXIT_SOLVER,
                });
                reports.push(r);
            }
            let mut d = done(code, json!({ "probes": reports }))?;
            d.warnings = warnings;
            Ok(d)
        }
        Command::ExportSdpa {
            file,
            mode,
            order,
            cone,
            equalities,
            output,
        } => {
            let p = load(file)?;
            let (lo, _) = match order {
                Some(n) => (*n, *n),
                None => order_range(None, &p)?,
            };
            let (problem, warnings) = build_raised(&p, minimize_mode(*mode), cone_mode(*cone), lo)?;
            let (lmi, note) = match equalities {
                EqualityArg::Eliminate => {
                    let e = eliminate_equalities(&problem.lmi)?;
                    let note = json!({
                        "equalities": "eliminated",
                        "objective_constant": e.objective_constant,
                        "offset": e.offset,
                        "map": e.map,
                    });
                    (e.problem, note)
                }
                EqualityArg::Split => (split_equalities(&problem.lmi), json!({ "equalities": "split" })),
            };
            let text = write_sdpa(&lmi)?;
            match output {
                None => Ok(Done {
                    code: EXIT_OK,
                    result: Value::Null,
                    warnings: Vec::new(),
                    raw: Some(text),
                }),
                Some(path) => {
                    std::fs::write(path, &text).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
                    let mut d = done(
                        EXIT_OK,
                        json!({
                            "path": path,
                            "kind": problem.kind,
                            "order": problem.order,
                            "value_sign": problem.value_sign,
                            "variables": lmi.num_vars,
                            "block_sizes": lmi.blocks.iter().map(|b| b.size).collect::<Vec<_>>(),
                            "variable_labels": problem.variable_labels,
                            "block_labels": problem.block_labels,
                            "transform": note,
                        }),
                    )?;
                    d.warnings = warnings;
                    Ok(d)
                }
            }
        }
        Command::SolveSdpa { input, output } => {
            let cfg = configs(&cli.tol, None)?;
            let lmi = parse_sdpa(&read_text(input)?)?;
            let sol = solve_lmi(&lmi, &cfg.relax.sdp)?;
            let code = match sol.status {
                SdpStatus::Optimal => EXIT_OK,
                SdpStatus::PrimalInfeasible | SdpStatus::DualInfeasible => EXIT_VERDICT,
                _ => EXIT_SOLVER,
            };
            // SDPA minimizes c·x with x = −z.
            let text = format!("phase.value = {:?}\nobjValPrimal = {:.16e}\nobjValDual = {:.16e}\n", sol.status, -sol.objective, -sol.dual_objective);
            std::fs::write(output, text).map_err(|e| Failure::parse(format!("{}: {e}", output.display())))?;
            done(code, sol)
        }
    }
}

fn minimize_mode(m: ModeArg) -> MinimizeMode {
    match m {
        ModeArg::Gradient => MinimizeMode::Gradient,
        ModeArg::Lasserre => MinimizeMode::Lasserre,
        ModeArg::Kkt => MinimizeMode::Kkt,
    }
}

fn cone_mode(c: ConeArg) -> ConeMode {
    match c {
        ConeArg::Qm => ConeMode::QuadraticModule,
        ConeArg::Preordering => ConeMode::Preordering,
    }
}

fn build(p: &Problem, mode: MinimizeMode, cone: ConeMode, order: u32) -> Result<RelaxationProblem, Failure> {
    if mode == MinimizeMode::Gradient && !p.constraints.is_empty() {
        return Err(Failure::parse("the gradient relaxation takes no constraints"));
    }
    Ok(assemble(p, mode, cone, order)?)
}

fn assemble(p: &Problem, mode: MinimizeMode, cone: ConeMode, order: u32) -> polyopt::Result<RelaxationProblem> {
    match mode {
        MinimizeMode::Gradient => gradient_moment(&p.objective, order),
        MinimizeMode::Lasserre => lasserre_relaxation(&p.objective, &p.constraints, order),
        MinimizeMode::Kkt => kkt_relaxation(&p.objective, &p.constraints, order, cone),
    }
}

/// [`build`], retried at the degree floor when `order` is below it.
fn build_raised(p: &Problem, mode: MinimizeMode, cone: ConeMode, order: u32) -> Result<(RelaxationProblem, Vec<String>), Failure> {
    if mode == MinimizeMode::Gradient && !p.constraints.is_empty() {
        return build(p, mode, cone, order).map(|r| (r, Vec::new()));
    }
    match assemble(p, mode, cone, order) {
        Err(polyopt::Error::OrderTooSmall { floor, .. }) => Ok((
            assemble(p, mode, cone, floor)?,
            vec![format!("order {order} raised to the degree floor {floor}")],
        )),
        r => Ok((r?, Vec::new())),
    }
}

/// Writes the relaxation to SDPA, runs the external command and converts its
/// `objValPrimal` back into a relaxation bound.
fn external_bound(problem: &RelaxationProblem, cmd: &str) -> Result<f64, Failure> {
    let e = eliminate_equalities(&problem.lmi)?;
    let text = write_sdpa(&e.problem)?;
    let dir = std::env::temp_dir().join(format!("polyopt-{}-{}", std::process::id(), problem.order));
    std::fs::create_dir_all(&dir).map_err(|err| Failure::solver(err.to_string()))?;
    let input = dir.join("relaxation.dat-s");
    let output = dir.join("relaxation.out");
    std::fs::write(&input, text).map_err(|err| Failure::solver(err.to_string()))?;
    let mut parts = cmd.split_whitespace();
    let program = parts.next().ok_or_else(|| Failure::parse("empty --external-command"))?;
    let status = std::process::Command::new(program)
        .args(parts)
        .arg(&input)
        .arg(&output)
        .stdout(std::process::Stdio::null())
        .status()
        .map_err(|err| Failure::solver(format!("{program}: {err}")))?;
    let out = std::fs::read_to_string(&output).map_err(|err| Failure::solver(format!("external solver output: {err} ({status})")))?;
    let _ = std::fs::remove_dir_all(&dir);
    let value = out
        .lines()
        .find_map(|l| {
            let (k, v) = l.split_once('=')?;
            (k.trim() == "objValPrimal").then(|| v.trim().parse::<f64>().ok()).flatten()
        })
        .ok_or_else(|| Failure::solver("external solver output has no objValPrimal"))?;
    Ok(problem.value_sign * (-value + e.objective_constant))
}
