//! Dense semidefinite programming: problem data, an exact presolve, an
//! interior point solver, certificate checks, and SDPA text I/O.

pub mod certificate;
mod hsde;
mod presolve;
mod problem;
mod sdpa;

use serde::{Deserialize, Serialize};

use crate::linalg::dense::{symmetric_eigen, Mat};
use crate::Result;

pub use certificate::Certificate;
pub use problem::{Block, LmiProblem, SymSparse, MAX_TOTAL_DIM};
pub use sdpa::{eliminate_equalities, parse_sdpa, split_equalities, write_sdpa};

use hsde::HsdeStatus;
use presolve::Presolve;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SdpConfig {
    pub max_iterations: usize,
    pub gap_tolerance: f64,
    /// Gap accepted from the best feasible iterate when the iteration breaks
    /// down before reaching `gap_tolerance`.
    pub acceptable_gap: f64,
    pub feasibility_tolerance: f64,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_fraction: f64,
    /// Relative tolerance used when verifying certificates.
    pub certificate_tolerance: f64,
}

impl Default for SdpConfig {
    fn default() -> Self {
        SdpConfig {
            max_iterations: 200,
            gap_tolerance: 1e-8,
            acceptable_gap: 1e-7,
            feasibility_tolerance: 1e-8,
            step_fraction: 0.98,
            certificate_tolerance: 1e-6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SdpStatus {
    Optimal,
    PrimalInfeasible,
    /// The dual is infeasible; with a feasible primal this means unbounded.
    DualInfeasible,
    MaxIterations,
    NumericalFailure,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PresolveSummary {
    pub original_vars: usize,
    pub remaining_vars: usize,
    /// Block rows removed because their diagonal entry is identically zero.
    pub removed_rows: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SdpSolution {
    pub status: SdpStatus,
    /// Primal point in the original variables.
    pub z: Vec<f64>,
    pub objective: f64,
    pub dual_objective: f64,
    pub gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    /// Smallest block eigenvalue at `z`.
    pub min_eigenvalue: f64,
    pub equality_residual: f64,
    /// Dual blocks, zero-padded to the original sizes.
    pub dual: Vec<Vec<Vec<f64>>>,
    pub certificate: Option<Certificate>,
    pub presolve: PresolveSummary,
    pub notes: Vec<String>,
}

impl SdpSolution {
    fn empty(p: &LmiProblem, status: SdpStatus) -> Self {
        SdpSolution {
            status,
            z: vec![0.0; p.num_vars],
            objective: f64::NAN,
            dual_objective: f64::NAN,
            gap: f64::NAN,
            primal_residual: f64::NAN,
            dual_residual: f64::NAN,
            iterations: 0,
            min_eigenvalue: f64::NAN,
            equality_residual: f64::NAN,
            dual: Vec::new(),
            certificate: None,
            presolve: PresolveSummary {
                original_vars: p.num_vars,
                ..PresolveSummary::default()
            },
            notes: Vec::new(),
        }
    }
}

fn pad_blocks(p: &LmiProblem, reduced: &presolve::Reduced, z: &[Mat]) -> Vec<Mat> {
    let mut out: Vec<Mat> = p.blocks.iter().map(|b| Mat::zeros(b.size, b.size)).collect();
    for (rb, zb) in reduced.blocks.iter().zip(z) {
        for (a, &i) in rb.kept.iter().enumerate() {
            for (c, &j) in rb.kept.iter().enumerate() {
                out[rb.original][(i, j)] = zb[(a, c)];
            }
        }
    }
    out
}

/// Solves `maximize c·z  s.t.  A0 + Σ z_j A_j ⪰ 0` per block and `B z = b`.
pub fn solve_lmi(problem: &LmiProblem, cfg: &SdpConfig) -> Result<SdpSolution> {
    let mut p = problem.clone();
    p.validate()?;
    let tol = cfg.certificate_tolerance;
    let reduced = match presolve::presolve(&p) {
        Presolve::Reduced(r) => r,
        Presolve::Infeasible { farkas, reason } => {
            let mut sol = SdpSolution::empty(&p, SdpStatus::PrimalInfeasible);
            sol.notes.push(reason);
            sol.certificate = farkas.map(|u| certificate::farkas(&p, u, tol));
            return Ok(sol);
        }
        Presolve::NegativeDiagonal { block, index, value } => {
            let mut sol = SdpSolution::empty(&p, SdpStatus::PrimalInfeasible);
            sol.certificate = Some(Certificate::NegativeDiagonal {
                block,
                index,
                value,
                verified: value < 0.0,
            });
            return Ok(sol);
        }
        Presolve::Unbounded { ray } => {
            let mut sol = SdpSolution::empty(&p, SdpStatus::DualInfeasible);
            sol.certificate = Some(certificate::ray(&p, ray, tol));
            return Ok(sol);
        }
    };
    let summary = PresolveSummary {
        original_vars: p.num_vars,
        remaining_vars: reduced.objective.len(),
        removed_rows: reduced.removed_rows,
    };

    let mut reduced_accuracy = false;
    let (status, s, zblocks, stats) = if reduced.objective.is_empty() {
        // Nothing left to optimize: the constant blocks decide.
        let mut worst: Option<(usize, f64, Vec<f64>)> = None;
        for (bi, b) in reduced.blocks.iter().enumerate() {
            let (vals, vecs) = symmetric_eigen(&b.constant);
            if let Some(&l) = vals.first() {
                if worst.as_ref().map_or(true, |w| l < w.1) {
                    worst = Some((bi, l, (0..vals.len()).map(|r| vecs[(r, 0)]).collect()));
                }
            }
        }
        let scale = reduced.blocks.iter().map(|b| b.constant.max_abs()).fold(1.0, f64::max);
        match worst {
            Some((bi, l, v)) if l < -cfg.feasibility_tolerance * scale => {
                let mut z: Vec<Mat> = reduced.blocks.iter().map(|b| Mat::zeros(b.kept.len(), b.kept.len())).collect();
                z[bi] = Mat::from_fn(v.len(), v.len(), |i, j| v[i] * v[j] / -l);
                (HsdeStatus::PrimalInfeasible, Vec::new(), z, (0, 0.0, 0.0, 0.0, f64::NAN))
            }
            _ => {
                let z = reduced.blocks.iter().map(|b| Mat::zeros(b.kept.len(), b.kept.len())).collect();
                (HsdeStatus::Optimal, Vec::new(), z, (0, 0.0, 0.0, 0.0, reduced.objective_constant))
            }
        }
    } else {
        let r = hsde::solve(&reduced.blocks, &reduced.objective, cfg);
        reduced_accuracy = r.reduced_accuracy;
        let dobj = r.dual_objective + reduced.objective_constant;
        (r.status, r.x, r.z, (r.iterations, r.primal_residual, r.dual_residual, r.gap, dobj))
    };
    let (iterations, pres, dres, gap, dobj) = stats;
    let dual = pad_blocks(&p, &reduced, &zblocks);
    let mut sol = SdpSolution {
        status: match status {
            HsdeStatus::Optimal => SdpStatus::Optimal,
            HsdeStatus::PrimalInfeasible => SdpStatus::PrimalInfeasible,
            HsdeStatus::DualInfeasible => SdpStatus::DualInfeasible,
            HsdeStatus::MaxIterations => SdpStatus::MaxIterations,
            HsdeStatus::NumericalFailure => SdpStatus::NumericalFailure,
        },
        z: vec![0.0; p.num_vars],
        objective: f64::NAN,
        dual_objective: dobj,
        gap,
        primal_residual: pres,
        dual_residual: dres,
        iterations,
        min_eigenvalue: f64::NAN,
        equality_residual: f64::NAN,
        dual: dual.iter().map(Mat::to_rows).collect(),
        certificate: None,
        presolve: summary,
        notes: Vec::new(),
    };
    if reduced_accuracy {
        sol.notes.push(format!("stopped at reduced accuracy: gap {gap:.3e} above {:.1e}", cfg.gap_tolerance));
    }
    match status {
        HsdeStatus::PrimalInfeasible => {
            sol.certificate = Some(certificate::infeasibility(&p, &reduced.implied_equalities, dual, tol));
        }
        HsdeStatus::DualInfeasible => {
            let dir: Vec<f64> = reduced
                .map
                .iter()
                .map(|row| row.iter().zip(&s).map(|(a, b)| a * b).sum())
                .collect();
            sol.certificate = Some(certificate::ray(&p, dir, tol));
        }
        _ => {
            let z = reduced.lift(&s);
            sol.objective = p.objective_value(&z);
            sol.min_eigenvalue = p.min_eigenvalue(&z);
            sol.equality_residual = p.equality_residual(&z);
            sol.z = z;
        }
    }
    Ok(sol)
}
