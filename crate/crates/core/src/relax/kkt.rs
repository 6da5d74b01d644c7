//! The KKT system `∇f − Σ λ_j ∇g_j = 0`, `λ_j g_j = 0` in the variables `(x, λ)`.

use serde::Serialize;

use crate::morse::{real_solutions, MorseConfig, SearchBox};
use crate::polyring::{Constraint, Polynomial, Sense};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KktSystem {
    pub base_dim: usize,
    pub multiplier_dim: usize,
    /// `L_1, .., L_n, λ_1 g_1, .., λ_m g_m` in `n + m` variables.
    pub generators: Vec<Polynomial>,
    /// The constraints `g_j` lifted to `n + m` variables, with their senses.
    pub inequality_parts: Vec<Constraint>,
    /// `f` lifted to `n + m` variables.
    pub objective: Polynomial,
}

fn lift(p: &Polynomial, total: usize) -> Polynomial {
    let map: Vec<usize> = (0..p.nvars()).collect();
    p.remap_variables(total, &map)
}

/// Builds the KKT generators with one multiplier per constraint, appended
/// after the `x` block. Multipliers are unsigned.
pub fn kkt_system(f: &Polynomial, constraints: &[Constraint]) -> Result<KktSystem> {
    let n = f.nvars();
    if let Some(c) = constraints.iter().find(|c| c.poly.nvars() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: c.poly.nvars(),
        });
    }
    let m = constraints.len();
    let total = n + m;
    let fl = lift(f, total);
    let gl: Vec<Polynomial> = constraints.iter().map(|c| lift(&c.poly, total)).collect();
    let mut generators = Vec::with_capacity(n + m);
    for i in 0..n {
        let mut li = fl.differentiate(i)?;
        for (j, g) in gl.iter().enumerate() {
            let lam = Polynomial::variable(total, n + j);
            li = &li - &(&lam * &g.differentiate(i)?);
        }
        generators.push(li);
    }
    for (j, (g, c)) in gl.iter().zip(constraints).enumerate() {
        // An equality constraint contributes `g_j` itself: the multiplier is free
        // and `λ_j g_j` would lose the constraint.
        if c.sense == Sense::Eq {
            generators.push(g.clone());
        } else {
            generators.push(&Polynomial::variable(total, n + j) * g);
        }
    }
    Ok(KktSystem {
        base_dim: n,
        multiplier_dim: m,
        generators,
        inequality_parts: gl
            .into_iter()
            .zip(constraints)
            .map(|(poly, c)| Constraint { poly, sense: c.sense })
            .collect(),
        objective: fl,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KktPoint {
    pub x: Vec<f64>,
    pub lambda: Vec<f64>,
    pub objective: f64,
    /// Largest generator magnitude at the point.
    pub generator_residual: f64,
    /// Whether `x` satisfies the constraints within the interior tolerance.
    pub in_k: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KktPoints {
    pub points: Vec<KktPoint>,
    /// `false` when the real KKT variety looks positive-dimensional.
    pub finite_heuristic: bool,
    /// `min f` over the points found in `K`.
    pub best_objective: Option<f64>,
}

/// Real KKT points inside a box of the `(x, λ)` space.
pub fn kkt_points(sys: &KktSystem, bx: &SearchBox, cfg: &MorseConfig) -> Result<KktPoints> {
    let rep = real_solutions(&sys.generators, bx, cfg)?;
    let f = sys.objective.compile();
    let points: Vec<KktPoint> = rep
        .points
        .iter()
        .zip(&rep.residuals)
        .map(|(p, &r)| {
            let in_k = sys.inequality_parts.iter().all(|c| {
                let v = c.poly.compile().eval(p);
                match c.sense {
                    Sense::Geq => v >= -cfg.interior_tolerance,
                    Sense::Eq => v.abs() <= cfg.zero_tolerance,
                }
            });
            KktPoint {
                x: p[..sys.base_dim].to_vec(),
                lambda: p[sys.base_dim..].to_vec(),
                objective: f.eval(p),
                generator_residual: r,
                in_k,
            }
        })
        .collect();
    let best_objective = points.iter().filter(|p| p.in_k).map(|p| p.objective).reduce(f64::min);
    Ok(KktPoints {
        points,
        finite_heuristic: rep.finite_heuristic,
        best_objective,
    })
}

/// Largest generator magnitude at a point of the `(x, λ)` space.
pub fn generator_residual(sys: &KktSystem, point: &[f64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for g in &sys.generators {
        worst = worst.max(g.evaluate(point)?.abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::parse_polynomial;

    fn p(text: &str, vars: &[&str]) -> Polynomial {
        let names: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        parse_polynomial(text, &names).unwrap()
    }

    #[test]
    fn generators_for_the_interval() {
        let sys = kkt_system(&p("x", &["x"]), &[Constraint::geq(p("1 - x^2", &["x"]))]).unwrap();
        let names = ["x".to_string(), "l".to_string()];
        assert_eq!(sys.generators[0], parse_polynomial("1 + 2*l*x", &names).unwrap());
        assert_eq!(sys.generators[1], parse_polynomial("l*(1 - x^2)", &names).unwrap());
        let pts = kkt_points(&sys, &SearchBox::cube(2, 3.0).unwrap(), &MorseConfig::default()).unwrap();
        assert_eq!(pts.points.len(), 2);
        assert!((pts.points[0].x[0] + 1.0).abs() < 1e-9 && (pts.points[0].lambda[0] - 0.5).abs() < 1e-9);
        assert!((pts.points[1].x[0] - 1.0).abs() < 1e-9 && (pts.points[1].lambda[0] + 0.5).abs() < 1e-9);
        assert_eq!(pts.best_objective.map(|v| (v + 1.0).abs() < 1e-9), Some(true));
        assert!(generator_residual(&sys, &[-1.0, 0.5]).unwrap() == 0.0);
    }

    #[test]
    fn circle_of_kkt_points_is_flagged() {
        let v = ["x", "y"];
        let sys = kkt_system(&p("x^2 + y^2", &v), &[Constraint::geq(p("1 - x^2 - y^2", &v))]).unwrap();
        let pts = kkt_points(&sys, &SearchBox::cube(3, 2.0).unwrap(), &MorseConfig::default()).unwrap();
        assert!(!pts.finite_heuristic);
        assert!(pts.points.iter().any(|q| q.x.iter().all(|c| c.abs() < 1e-9)));
    }
}
