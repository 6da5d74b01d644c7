//! Moment and SOS relaxations: gradient ideal, Lasserre `Q^N_G`, KKT, and
//! truncated cone membership probes.

mod assemble;
pub mod basis;
mod extract;
pub mod kkt;
mod probe;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::morse::{halton, SearchBox};
use crate::polyring::{Constraint, Polynomial, Sense};
use crate::sdp::{solve_lmi, LmiProblem, SdpConfig, SdpSolution, SdpStatus};
use crate::{Error, Result};

pub use assemble::{degree_floor, gradient_moment, gradient_sos, kkt_relaxation, lasserre_relaxation};
pub use basis::{localizing_matrix, moment_matrix, MomentBasis, MomentMatrixSpec, Moments};
pub use extract::{extract_minimizer, Candidate, Extraction};
pub use kkt::{generator_residual, kkt_points, kkt_system, KktPoint, KktPoints, KktSystem};
pub use probe::{membership_probe, GramFactor, ProbeMode, ProbeOutcome, ProbeReport, SeparatingFunctional};

/// Preordering mode enumerates `2^m − 1` products; refuse beyond this many generators.
pub const MAX_PREORDERING_GENERATORS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeMode {
    QuadraticModule,
    Preordering,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelaxationKind {
    GradientMoment,
    GradientSos,
    Lasserre,
    Kkt,
}

/// An assembled relaxation. The LMI maximizes `c·z`; the relaxation value is
/// `value_sign · c·z`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelaxationProblem {
    pub kind: RelaxationKind,
    pub order: u32,
    /// Variables of the moment space (`n + m` for KKT).
    pub nvars: usize,
    /// Index map of the LMI variables when they are moments.
    pub moments: Option<MomentBasis>,
    pub variable_labels: Vec<String>,
    pub block_labels: Vec<String>,
    pub lmi: LmiProblem,
    pub value_sign: f64,
    pub source: Vec<String>,
    pub notes: Vec<String>,
}

/// Both sides of the gradient relaxation at one order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradientRelaxation {
    pub moment: RelaxationProblem,
    pub sos: RelaxationProblem,
}

pub fn gradient_relaxation(f: &Polynomial, order: u32) -> Result<GradientRelaxation> {
    Ok(GradientRelaxation {
        moment: gradient_moment(f, order)?,
        sos: gradient_sos(f, order)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RelaxConfig {
    pub sdp: SdpConfig,
    /// Second over first eigenvalue of `M_N(y)` below which it counts as rank one.
    pub rank_tolerance: f64,
    /// Residual bound for accepting a separating functional.
    pub certificate_tolerance: f64,
    pub feasibility_tolerance: f64,
    /// Half-width of the cube sampled by the ladder's sanity check.
    pub sanity_box_radius: f64,
    pub sanity_samples: usize,
    /// Allowed decrease between consecutive ladder values.
    pub ladder_tolerance: f64,
    /// Also solve the SOS side of the gradient relaxation.
    pub gradient_sos_side: bool,
}

impl Default for RelaxConfig {
    fn default() -> Self {
        RelaxConfig {
            sdp: SdpConfig::default(),
            rank_tolerance: 1e-5,
            certificate_tolerance: 1e-7,
            feasibility_tolerance: 1e-6,
            sanity_box_radius: 10.0,
            sanity_samples: 4096,
            ladder_tolerance: 1e-7,
            gradient_sos_side: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelaxationResult {
    pub kind: RelaxationKind,
    pub order: u32,
    pub status: SdpStatus,
    /// `None` unless the solve is optimal.
    pub lower_bound: Option<f64>,
    pub gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    pub moment_vector: Option<Moments>,
    pub extraction: Option<Extraction>,
    pub notes: Vec<String>,
}

/// Solves an assembled relaxation and, for moment relaxations, tries rank-one
/// extraction against `f` and `constraints`.
pub fn solve_relaxation(problem: &RelaxationProblem, f: &Polynomial, constraints: &[Constraint], cfg: &RelaxConfig) -> Result<RelaxationResult> {
    let sol = solve_lmi(&problem.lmi, &cfg.sdp)?;
    finish(problem, &sol, f, constraints, cfg)
}

fn finish(problem: &RelaxationProblem, sol: &SdpSolution, f: &Polynomial, constraints: &[Constraint], cfg: &RelaxConfig) -> Result<RelaxationResult> {
    let optimal = sol.status == SdpStatus::Optimal;
    let lower_bound = optimal.then(|| problem.value_sign * sol.objective + 0.0);
    let mut moment_vector = None;
    let mut extraction = None;
    if let (true, Some(basis)) = (optimal, &problem.moments) {
        let y = Moments::new(basis.clone(), sol.z.clone())?;
        extraction = Some(extract_minimizer(
            &y,
            problem.order,
            f,
            constraints,
            lower_bound.unwrap_or(f64::NAN),
            cfg.rank_tolerance,
            cfg.feasibility_tolerance,
        )?);
        moment_vector = Some(y);
    }
    let mut notes = problem.notes.clone();
    notes.extend(sol.notes.iter().cloned());
    Ok(RelaxationResult {
        kind: problem.kind,
        order: problem.order,
        status: sol.status,
        lower_bound,
        gap: sol.gap,
        primal_residual: sol.primal_residual,
        dual_residual: sol.dual_residual,
        iterations: sol.iterations,
        moment_vector,
        extraction,
        notes,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinimizeMode {
    Gradient,
    Lasserre,
    Kkt,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LadderStep {
    pub requested_order: u32,
    pub order: u32,
    pub result: RelaxationResult,
    /// Value of the SOS side (gradient mode, when requested).
    pub sos_bound: Option<f64>,
    pub sos_status: Option<SdpStatus>,
    /// Wall time of the solve; left out of the JSON so reruns compare equal.
    #[serde(skip)]
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LadderReport {
    pub mode: MinimizeMode,
    pub steps: Vec<LadderStep>,
    pub bounds: Vec<Option<f64>>,
    pub monotone: bool,
    /// Smallest sampled value of `f` over the sanity region intersected with `K`.
    pub sampled_minimum: Option<f64>,
    pub warnings: Vec<String>,
}

fn build(f: &Polynomial, constraints: &[Constraint], mode: MinimizeMode, cone: ConeMode, order: u32) -> Result<RelaxationProblem> {
    match mode {
        MinimizeMode::Gradient => gradient_moment(f, order),
        MinimizeMode::Lasserre => lasserre_relaxation(f, constraints, order),
        MinimizeMode::Kkt => kkt_relaxation(f, constraints, order, cone),
    }
}

/// Solves the relaxation at every order of `lo..=hi` (in parallel) and checks
/// the ladder. Orders below the degree floor are raised to it.
pub fn minimize_ladder(
    f: &Polynomial,
    constraints: &[Constraint],
    mode: MinimizeMode,
    cone: ConeMode,
    lo: u32,
    hi: u32,
    cfg: &RelaxConfig,
) -> Result<LadderReport> {
    if lo > hi {
        return Err(Error::Invalid(format!("empty order range {lo}..{hi}")));
    }
    if mode == MinimizeMode::Gradient && !constraints.is_empty() {
        return Err(Error::Invalid("the gradient relaxation takes no constraints".into()));
    }
    let floor = match build(f, constraints, mode, cone, lo) {
        Err(Error::OrderTooSmall { floor, .. }) => floor,
        Err(e) => return Err(e),
        Ok(_) => lo,
    };
    let mut warnings = Vec::new();
    for n in lo..floor.min(hi + 1) {
        warnings.push(format!("order {n} raised to the degree floor {floor}"));
    }
    let orders: Vec<u32> = (lo.max(floor)..=hi.max(floor)).collect();
    let solved: Vec<Result<(RelaxationResult, Option<(Option<f64>, SdpStatus)>, f64)>> = orders
        .par_iter()
        .map(|&n| {
            let start = std::time::Instant::now();
            let problem = build(f, constraints, mode, cone, n)?;
            let result = solve_relaxation(&problem, f, constraints, cfg)?;
            let sos = if mode == MinimizeMode::Gradient && cfg.gradient_sos_side {
                let p = gradient_sos(f, n)?;
                let s = solve_lmi(&p.lmi, &cfg.sdp)?;
                Some(((s.status == SdpStatus::Optimal).then_some(s.objective), s.status))
            } else {
                None
            };
            Ok((result, sos, start.elapsed().as_secs_f64()))
        })
        .collect();
    let mut by_order = Vec::with_capacity(solved.len());
    for s in solved {
        by_order.push(s?);
    }
    let steps: Vec<LadderStep> = (lo..=hi)
        .map(|req| {
            let order = req.max(floor);
            let (result, sos, seconds) = by_order[(order - orders[0]) as usize].clone();
            LadderStep {
                requested_order: req,
                order,
                result,
                sos_bound: sos.and_then(|s| s.0),
                sos_status: sos.map(|s| s.1),
                seconds,
            }
        })
        .collect();
    let bounds: Vec<Option<f64>> = steps.iter().map(|s| s.result.lower_bound).collect();

    let mut monotone = true;
    let mut prev: Option<(u32, f64)> = None;
    for s in &steps {
        if let Some(b) = s.result.lower_bound {
            if let Some((n0, b0)) = prev {
                if b < b0 - cfg.ladder_tolerance {
                    monotone = false;
                    warnings.push(format!("bound decreases from order {n0} to order {}: {b0:.9} > {b:.9}", s.order));
                }
            }
            prev = Some((s.order, b));
        } else {
            warnings.push(format!("order {} not solved: {:?}", s.order, s.result.status));
        }
    }

    let sampled_minimum = sample_minimum(f, constraints, cfg)?;
    if let (Some(m), Some((_, b))) = (sampled_minimum, prev) {
        if m < b - 1e-6 * (1.0 + b.abs()) {
            warnings.push("minimum not attained on searched region".into());
        }
    }
    Ok(LadderReport {
        mode,
        steps,
        bounds,
        monotone,
        sampled_minimum,
        warnings,
    })
}

/// `min f` over Halton points of the sanity cube that satisfy the constraints.
fn sample_minimum(f: &Polynomial, constraints: &[Constraint], cfg: &RelaxConfig) -> Result<Option<f64>> {
    let n = f.nvars();
    if n == 0 || cfg.sanity_samples == 0 {
        return Ok(None);
    }
    let bx = SearchBox::cube(n, cfg.sanity_box_radius)?;
    let fc = f.compile();
    let gc: Vec<_> = constraints.iter().map(|c| (c.poly.compile(), c.sense)).collect();
    let mut best: Option<f64> = None;
    for k in 0..cfg.sanity_samples {
        let x = bx.map_unit(&halton(k, n));
        let inside = gc.iter().all(|(g, s)| match s {
            Sense::Geq => g.eval(&x) >= 0.0,
            Sense::Eq => g.eval(&x).abs() <= cfg.feasibility_tolerance,
        });
        if inside {
            let v = fc.eval(&x);
            best = Some(best.map_or(v, |b: f64| b.min(v)));
        }
    }
    Ok(best)
}
