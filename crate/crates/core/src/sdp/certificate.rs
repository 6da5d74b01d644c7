//! Independent checks of infeasibility and unboundedness certificates against
//! the original problem data.

use serde::Serialize;

use super::problem::LmiProblem;
use crate::linalg::dense::{lu_solve, symmetric_eigenvalues, Mat};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// `Y ⪰ 0` and multipliers `u` with `<A_j, Y> + (E^T u)_j ≈ 0` and
    /// `<A0, Y> - e·u < 0`, where `E z = e` stacks the equalities and those
    /// implied by zero diagonals.
    Infeasibility {
        dual_blocks: Vec<Vec<Vec<f64>>>,
        multipliers: Vec<f64>,
        value: f64,
        residual: f64,
        verified: bool,
    },
    /// `B^T u = 0` and `b·u = 1`, found in exact arithmetic.
    Farkas { multipliers: Vec<f64>, verified: bool },
    /// A diagonal entry of a block is a negative constant after presolve.
    NegativeDiagonal {
        block: usize,
        index: usize,
        value: f64,
        verified: bool,
    },
    /// `d` with `B d = 0`, `Σ d_j A_j ⪰ 0` and `c·d = 1`.
    Ray {
        direction: Vec<f64>,
        min_eigenvalue: f64,
        residual: f64,
        verified: bool,
    },
}

impl Certificate {
    pub fn verified(&self) -> bool {
        match self {
            Certificate::Infeasibility { verified, .. }
            | Certificate::Farkas { verified, .. }
            | Certificate::NegativeDiagonal { verified, .. }
            | Certificate::Ray { verified, .. } => *verified,
        }
    }
}

fn block_min_eig(m: &Mat) -> f64 {
    if m.rows() == 0 {
        0.0
    } else {
        symmetric_eigenvalues(m)[0]
    }
}

/// Checks a dual infeasibility witness; `implied` holds extra valid equalities
/// `(row, rhs)`.
pub fn infeasibility(p: &LmiProblem, implied: &[(Vec<f64>, f64)], y: Vec<Mat>, tol: f64) -> Certificate {
    let k = p.num_vars;
    let a: Vec<f64> = (0..k)
        .map(|j| {
            p.blocks
                .iter()
                .zip(&y)
                .map(|(b, yb)| b.coeffs[j].to_dense(b.size).dot(yb))
                .sum()
        })
        .collect();
    let a0: f64 = p.blocks.iter().zip(&y).map(|(b, yb)| b.constant.to_dense(b.size).dot(yb)).sum();
    let rows: Vec<(&Vec<f64>, f64)> = p
        .eq_matrix
        .iter()
        .zip(p.eq_rhs.iter().copied())
        .chain(implied.iter().map(|(r, e)| (r, *e)))
        .collect();
    // Least squares for u in E^T u = -a.
    let m = rows.len();
    let mut u = vec![0.0; m];
    if m > 0 {
        let mut g = Mat::from_fn(m, m, |i, l| rows[i].0.iter().zip(rows[l].0).map(|(x, y)| x * y).sum());
        let delta = 1e-13 * (1.0 + g.trace());
        for i in 0..m {
            g[(i, i)] += delta;
        }
        let rhs: Vec<f64> = rows.iter().map(|(r, _)| -r.iter().zip(&a).map(|(x, y)| x * y).sum::<f64>()).collect();
        if let Some(sol) = lu_solve(&g, &rhs) {
            u = sol;
        }
    }
    let mut res = a.clone();
    for ((row, _), ui) in rows.iter().zip(&u) {
        for (r, v) in res.iter_mut().zip(row.iter()) {
            *r += ui * v;
        }
    }
    let residual = res.iter().map(|v| v * v).sum::<f64>().sqrt();
    let value = a0 - rows.iter().zip(&u).map(|((_, e), ui)| e * ui).sum::<f64>();
    let scale = y.iter().map(|m| m.max_abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let psd = y.iter().all(|m| block_min_eig(m) >= -tol * scale);
    let verified = psd && value < 0.0 && residual <= tol * value.abs();
    Certificate::Infeasibility {
        dual_blocks: y.iter().map(Mat::to_rows).collect(),
        multipliers: u,
        value,
        residual,
        verified,
    }
}

/// Checks that the original equalities alone are inconsistent.
pub fn farkas(p: &LmiProblem, u: Vec<f64>, tol: f64) -> Certificate {
    let k = p.num_vars;
    let bu: f64 = p.eq_rhs.iter().zip(&u).map(|(b, x)| b * x).sum();
    let btu = (0..k)
        .map(|j| p.eq_matrix.iter().zip(&u).map(|(r, x)| r[j] * x).sum::<f64>().abs())
        .fold(0.0, f64::max);
    let verified = (bu - 1.0).abs() <= tol && btu <= tol;
    Certificate::Farkas { multipliers: u, verified }
}

/// Checks an improving recession direction.
pub fn ray(p: &LmiProblem, d: Vec<f64>, tol: f64) -> Certificate {
    let gain = p.objective_value(&d);
    let d: Vec<f64> = if gain > 0.0 { d.iter().map(|v| v / gain).collect() } else { d };
    let scale = d.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let min_eigenvalue = p
        .blocks
        .iter()
        .filter(|b| b.size > 0)
        .map(|b| {
            let mut m = b.evaluate(&d);
            m.axpy(-1.0, &b.constant.to_dense(b.size));
            block_min_eig(&m)
        })
        .fold(f64::INFINITY, f64::min);
    let residual = p
        .eq_matrix
        .iter()
        .map(|r| r.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>().abs())
        .fold(0.0, f64::max);
    let verified = gain > 0.0 && min_eigenvalue >= -tol * scale && residual <= tol * scale;
    Certificate::Ray {
        direction: d,
        min_eigenvalue,
        residual,
        verified,
    }
}
