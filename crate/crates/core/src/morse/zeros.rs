use rayon::prelude::*;
use serde::Serialize;

use super::critical::{critical_points, newton_critical, Derivatives};
use super::{check_box, halton, MorseConfig, SearchBox};
use crate::linalg::dense::{lu_solve, Mat};
use crate::polyring::{CompiledPoly, Constraint, Polynomial, Sense};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Ternary {
    True,
    False,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroPoint {
    pub location: Vec<f64>,
    pub value: f64,
    /// Values of the inequality constraints at the point.
    pub constraint_values: Vec<f64>,
    pub interior: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZerosReport {
    pub zeros: Vec<ZeroPoint>,
    pub all_interior: Ternary,
    /// `false` when the zeros look like a curve rather than isolated points.
    pub finite_heuristic: bool,
    /// Equality constraints were given: interiority is then judged against
    /// the inequalities only, since the set itself has empty interior.
    pub equality_constraints: bool,
    pub starts_converged: usize,
}

/// Gauss-Newton on the underdetermined system `eqs(x) = 0` using minimum-norm steps.
fn gauss_newton(eqs: &[(CompiledPoly, Vec<CompiledPoly>)], mut x: Vec<f64>, cfg: &MorseConfig, escape: f64) -> Option<Vec<f64>> {
    let n = x.len();
    let m = eqs.len();
    let residual = |x: &[f64]| -> Vec<f64> { eqs.iter().map(|(p, _)| p.eval(x)).collect() };
    let mut r = residual(&x);
    let mut rn = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    for _ in 0..cfg.max_iterations {
        if rn <= 1e-3 * cfg.zero_tolerance {
            break;
        }
        let j = Mat::from_fn(m, n, |i, k| eqs[i].1[k].eval(&x));
        let mut jjt = j.matmul(&j.transpose());
        let mu = 1e-14 * (1.0 + jjt.trace());
        for i in 0..m {
            jjt[(i, i)] += mu;
        }
        let Some(y) = lu_solve(&jjt, &r) else { break };
        let step = j.transpose().matvec(&y);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a - t * s).collect();
            let tr = residual(&trial);
            let tn = tr.iter().map(|v| v * v).sum::<f64>().sqrt();
            if tn.is_finite() && tn < rn {
                x = trial;
                r = tr;
                rn = tn;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted || x.iter().map(|v| v * v).sum::<f64>().sqrt() > escape {
            break;
        }
    }
    Some(x)
}

/// Zeros of `f` on `K = {g ≥ 0, h = 0}` inside the box, with interiority
/// relative to the inequalities.
pub fn zeros_on_set(f: &Polynomial, constraints: &[Constraint], bx: &SearchBox, cfg: &MorseConfig) -> Result<ZerosReport> {
    let n = f.nvars();
    check_box(n, bx)?;
    let ineqs: Vec<CompiledPoly> = constraints
        .iter()
        .filter(|c| c.sense == Sense::Geq)
        .map(|c| c.poly.compile())
        .collect();
    let eq_polys: Vec<&Polynomial> = constraints.iter().filter(|c| c.sense == Sense::Eq).map(|c| &c.poly).collect();
    let mut system: Vec<(CompiledPoly, Vec<CompiledPoly>)> = vec![(f.compile(), f.gradient().iter().map(Polynomial::compile).collect())];
    for h in &eq_polys {
        system.push((h.compile(), h.gradient().iter().map(Polynomial::compile).collect()));
    }
    let fc = f.compile();
    let width = bx.lower.iter().zip(&bx.upper).map(|(a, b)| b - a).fold(0.0, f64::max);
    let escape = 10.0 * (width + bx.upper.iter().chain(&bx.lower).fold(0.0f64, |m, v| m.max(v.abs())));
    let slack = 1e-6 * width;
    let in_k = |x: &[f64]| -> bool {
        ineqs.iter().all(|g| g.eval(x) >= -cfg.interior_tolerance)
            && eq_polys.iter().all(|h| h.evaluate(x).map_or(false, |v| v.abs() <= cfg.zero_tolerance))
    };
    let is_zero = |x: &[f64]| fc.eval(x).abs() <= cfg.zero_tolerance;

    let derivs = (!f.is_constant()).then(|| Derivatives::new(f));
    let polish = |x: Vec<f64>| -> Vec<f64> {
        // Zeros of a nonnegative f are critical points; Newton on the gradient
        // sharpens the slow Gauss-Newton convergence at such points.
        let Some(d) = &derivs else { return x };
        if !eq_polys.is_empty() {
            return x;
        }
        match newton_critical(d, x.clone(), cfg, escape) {
            Some(y) if is_zero(&y) && dist(&x, &y) <= 1e-3 * (1.0 + norm(&x)) => y,
            _ => x,
        }
    };

    let found: Vec<Vec<f64>> = (0..cfg.starts.max(1))
        .into_par_iter()
        .filter_map(|k| gauss_newton(&system, bx.map_unit(&halton(k, n)), cfg, escape))
        .filter(|x| is_zero(x))
        .map(polish)
        .filter(|x| bx.contains(x, slack) && in_k(x))
        .collect();
    let converged = found.len();
    let mut candidates = found;
    if derivs.is_some() {
        if eq_polys.is_empty() {
            for c in critical_points(f, bx, cfg)? {
                if is_zero(&c.location) && bx.contains(&c.location, slack) && in_k(&c.location) {
                    candidates.push(c.location);
                }
            }
        }
    }
    candidates.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut zeros: Vec<Vec<f64>> = Vec::new();
    for c in candidates {
        if let Some(z) = zeros.iter_mut().find(|z| dist(z, &c) <= cfg.dedup_radius) {
            if fc.eval(&c).abs() < fc.eval(z).abs() {
                *z = c;
            }
        } else {
            zeros.push(c);
        }
    }
    let finite_heuristic = !(zeros.len() >= 8 && 2 * zeros.len() > converged);
    let zeros: Vec<ZeroPoint> = zeros
        .into_iter()
        .map(|x| {
            let constraint_values: Vec<f64> = ineqs.iter().map(|g| g.eval(&x)).collect();
            let interior = constraint_values.iter().all(|&v| v > cfg.interior_tolerance);
            ZeroPoint {
                value: fc.eval(&x),
                location: x,
                constraint_values,
                interior,
            }
        })
        .collect();
    let all_interior = if zeros.iter().any(|z| !z.interior) {
        Ternary::False
    } else if !finite_heuristic {
        Ternary::Unknown
    } else {
        Ternary::True
    };
    Ok(ZerosReport {
        zeros,
        all_interior,
        finite_heuristic,
        equality_constraints: !eq_polys.is_empty(),
        starts_converged: converged,
    })
}

/// Real solutions of a square or underdetermined polynomial system found
/// inside a box.
#[derive(Clone, Debug, Serialize)]
pub struct SolutionsReport {
    pub points: Vec<Vec<f64>>,
    /// Largest `|p_i|` at each point.
    pub residuals: Vec<f64>,
    /// `false` when the solutions look like a positive-dimensional set.
    pub finite_heuristic: bool,
    pub starts_converged: usize,
}

/// Multi-start minimum-norm Gauss-Newton on `system = 0` from Halton points of the box.
pub fn real_solutions(system: &[Polynomial], bx: &SearchBox, cfg: &MorseConfig) -> Result<SolutionsReport> {
    let n = bx.dim();
    if let Some(p) = system.iter().find(|p| p.nvars() != n) {
        return Err(crate::Error::DimensionMismatch {
            expected: n,
            found: p.nvars(),
        });
    }
    let eqs: Vec<(CompiledPoly, Vec<CompiledPoly>)> = system
        .iter()
        .map(|h| (h.compile(), h.gradient().iter().map(Polynomial::compile).collect()))
        .collect();
    let width = bx.lower.iter().zip(&bx.upper).map(|(a, b)| b - a).fold(0.0, f64::max);
    let escape = 10.0 * (width + bx.upper.iter().chain(&bx.lower).fold(0.0f64, |m, v| m.max(v.abs())));
    let slack = 1e-6 * width;
    let residual = |x: &[f64]| eqs.iter().map(|(p, _)| p.eval(x).abs()).fold(0.0, f64::max);
    let mut found: Vec<Vec<f64>> = (0..cfg.starts.max(1))
        .into_par_iter()
        .filter_map(|k| gauss_newton(&eqs, bx.map_unit(&halton(k, n)), cfg, escape))
        .filter(|x| residual(x) <= cfg.zero_tolerance && bx.contains(x, slack))
        .collect();
    let converged = found.len();
    found.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut points: Vec<Vec<f64>> = Vec::new();
    for c in found {
        if let Some(z) = points.iter_mut().find(|z| dist(z, &c) <= cfg.dedup_radius) {
            if residual(&c) < residual(z) {
                *z = c;
            }
        } else {
            points.push(c);
        }
    }
    Ok(SolutionsReport {
        residuals: points.iter().map(|x| residual(x)).collect(),
        finite_heuristic: !(points.len() >= 8 && 2 * points.len() > converged),
        points,
        starts_converged: converged,
    })
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
