//! Rank-one minimizer extraction from an optimal moment vector.

use serde::Serialize;

use super::basis::{moment_matrix, MomentMatrixSpec, Moments};
use crate::linalg::dense::symmetric_eigenvalues;
use crate::polyring::{Constraint, Polynomial, Sense};
use crate::Result;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Candidate {
    /// All coordinates of the moment space (for KKT relaxations, `x` then `λ`).
    pub point: Vec<f64>,
    pub objective: f64,
    /// `|f(x*) − bound|`.
    pub bound_gap: f64,
    pub constraint_values: Vec<f64>,
    pub feasible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Extraction {
    /// Eigenvalues of `M_N(y)`, descending.
    pub eigenvalues: Vec<f64>,
    /// Second eigenvalue over the first.
    pub rank_ratio: f64,
    pub rank_one: bool,
    pub candidates: Vec<Candidate>,
    pub diagnostic: String,
}

/// Reads `x*_i = y_{e_i} / y_0` when `M_N(y)` is numerically rank one. `f` and the
/// constraints live on the first `f.nvars()` coordinates.
pub fn extract_minimizer(
    y: &Moments,
    order: u32,
    f: &Polynomial,
    constraints: &[Constraint],
    bound: f64,
    rank_tolerance: f64,
    feasibility_tolerance: f64,
) -> Result<Extraction> {
    let n = y.basis.nvars();
    let spec = MomentMatrixSpec::new(n, order);
    let m = moment_matrix(&spec, y)?;
    let mut eigenvalues = symmetric_eigenvalues(&m);
    eigenvalues.reverse();
    let top = eigenvalues.first().copied().unwrap_or(0.0);
    let second = eigenvalues.get(1).copied().unwrap_or(0.0).max(0.0);
    let rank_ratio = if top > 0.0 { second / top } else { f64::INFINITY };
    let rank_one = rank_ratio <= rank_tolerance;
    if !rank_one {
        return Ok(Extraction {
            diagnostic: format!(
                "moment matrix is not numerically rank one: eigenvalue ratio {rank_ratio:.3e} exceeds {rank_tolerance:.1e}"
            ),
            eigenvalues,
            rank_ratio,
            rank_one,
            candidates: Vec::new(),
        });
    }
    let y0 = y.values[0];
    let point: Vec<f64> = (0..n).map(|i| y.values[1 + i] / y0).collect();
    let xs = &point[..f.nvars()];
    let objective = f.evaluate(xs)?;
    let mut constraint_values = Vec::with_capacity(constraints.len());
    let mut feasible = true;
    for c in constraints {
        let v = c.poly.evaluate(xs)?;
        feasible &= match c.sense {
            Sense::Geq => v >= -feasibility_tolerance,
            Sense::Eq => v.abs() <= feasibility_tolerance,
        };
        constraint_values.push(v);
    }
    let bound_gap = (objective - bound).abs();
    Ok(Extraction {
        diagnostic: format!("rank one (eigenvalue ratio {rank_ratio:.3e}); |f(x*) - bound| = {bound_gap:.3e}"),
        eigenvalues,
        rank_ratio,
        rank_one,
        candidates: vec![Candidate {
            point,
            objective,
            bound_gap,
            constraint_values,
            feasible,
        }],
    })
}
