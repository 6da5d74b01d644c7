//! Does a polynomial system have a zero with every coordinate nonzero?
//!
//! Structural fast paths certify the absence of such zeros; otherwise a
//! multi-start Levenberg-Marquardt search in logarithmic coordinates looks for
//! one in every sign orthant.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::dense::{lu_solve, Mat};
use crate::polyring::{CompiledPoly, Polynomial};

/// Knobs for the numerical torus-zero search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub starts_per_orthant: usize,
    pub witness_tolerance: f64,
    pub residual_tolerance: f64,
    pub max_iterations: usize,
    pub seed: u64,
    /// Bound on `|log |x_i||` during the search.
    pub log_bound: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            starts_per_orthant: 64,
            witness_tolerance: 1e-6,
            residual_tolerance: 1e-9,
            max_iterations: 500,
            seed: 0x5eed,
            log_bound: 12.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TorusOutcome {
    /// No torus zero, proven by the named structural argument.
    Certified(&'static str),
    /// A checked torus zero.
    Zero(Vec<f64>),
    /// Search exhausted without finding a zero.
    NotFound { starts: usize, best_residual: f64 },
}

/// Structural reason why `system` has no zero on the torus, if any applies.
pub fn fast_path(system: &[Polynomial]) -> Option<&'static str> {
    for p in system {
        if p.is_zero() {
            continue;
        }
        if p.is_constant() {
            return Some("nonzero constant");
        }
        if p.is_monomial() {
            return Some("monomial");
        }
        if p.is_even_definite() {
            return Some("even powers with same-sign coefficients");
        }
    }
    None
}

/// Machine check of a torus witness: every coordinate is away from zero and
/// every component is small relative to its coefficients.
pub fn check_witness(system: &[Polynomial], x: &[f64], cfg: &SearchConfig) -> bool {
    if x.iter().any(|v| !(v.abs() > cfg.witness_tolerance) || !v.is_finite()) {
        return false;
    }
    let xmax = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    system.iter().all(|p| {
        let Ok(v) = p.evaluate(x) else { return false };
        let deg = p.degree().unwrap_or(0) as i32;
        v.abs() <= cfg.residual_tolerance * (1.0 + p.max_abs_coefficient() * xmax.powi(deg))
    })
}

pub fn torus_zero(system: &[Polynomial], nvars: usize, cfg: &SearchConfig) -> TorusOutcome {
    let live: Vec<&Polynomial> = system.iter().filter(|p| !p.is_zero()).collect();
    if live.is_empty() {
        return TorusOutcome::Zero(vec![1.0; nvars]);
    }
    if let Some(reason) = fast_path(system) {
        return TorusOutcome::Certified(reason);
    }
    let compiled: Vec<CompiledPoly> = live.iter().map(|p| p.compile()).collect();
    let owned: Vec<Polynomial> = live.iter().map(|p| (*p).clone()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best = f64::INFINITY;
    let mut starts = 0;
    for orthant in 0..(1usize << nvars) {
        let signs: Vec<f64> = (0..nvars).map(|j| if orthant >> j & 1 == 1 { -1.0 } else { 1.0 }).collect();
        for s in 0..cfg.starts_per_orthant.max(1) {
            let u0: Vec<f64> = if s == 0 {
                vec![0.0; nvars]
            } else {
                (0..nvars).map(|_| rng.gen_range(-2.0..2.0)).collect()
            };
            starts += 1;
            let (x, res) = levenberg_marquardt(&compiled, &signs, u0, cfg, &owned);
            best = best.min(res);
            if check_witness(&owned, &x, cfg) {
                return TorusOutcome::Zero(x);
            }
        }
    }
    TorusOutcome::NotFound {
        starts,
        best_residual: best,
    }
}

/// Relative residuals `p_i(x) / Σ|c x^α|` and their derivatives in `u`, where
/// `x_j = s_j exp(u_j)`.
fn residuals(sys: &[CompiledPoly], x: &[f64], r: &mut [f64], jac: &mut Mat) {
    let n = x.len();
    let mut dp = vec![0.0; n];
    let mut ds = vec![0.0; n];
    let mut g = vec![0.0; n];
    for (k, p) in sys.iter().enumerate() {
        let v = p.eval_grad(x, &mut g);
        let scale = p.abs_scale(x).max(f64::MIN_POSITIVE);
        for j in 0..n {
            dp[j] = g[j] * x[j];
        }
        abs_scale_log_grad(p, x, &mut ds);
        r[k] = v / scale;
        for j in 0..n {
            jac[(k, j)] = (dp[j] * scale - v * ds[j]) / (scale * scale);
        }
    }
}

fn abs_scale_log_grad(p: &CompiledPoly, x: &[f64], out: &mut [f64]) {
    // d/du_j Σ|c x^α| = Σ α_j |c x^α|; recovered from the gradient of the
    // polynomial with absolute coefficients evaluated at |x|.
    let ax: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    let mut g = vec![0.0; x.len()];
    p.abs_eval_grad(&ax, &mut g);
    for j in 0..x.len() {
        out[j] = g[j] * ax[j];
    }
}

fn levenberg_marquardt(
    sys: &[CompiledPoly],
    signs: &[f64],
    mut u: Vec<f64>,
    cfg: &SearchConfig,
    polys: &[Polynomial],
) -> (Vec<f64>, f64) {
    let n = u.len();
    let m = sys.len();
    let to_x = |u: &[f64]| -> Vec<f64> { u.iter().zip(signs).map(|(ui, s)| s * ui.exp()).collect() };
    let mut r = vec![0.0; m];
    let mut jac = Mat::zeros(m, n);
    let mut x = to_x(&u);
    residuals(sys, &x, &mut r, &mut jac);
    let mut cost: f64 = r.iter().map(|v| v * v).sum();
    let mut mu = 1e-3;
    for _ in 0..cfg.max_iterations {
        if check_witness(polys, &x, cfg) {
            break;
        }
        let jt = jac.transpose();
        let mut a = jt.matmul(&jac);
        let grad = jt.matvec(&r);
        let gnorm = grad.iter().map(|g| g.abs()).fold(0.0, f64::max);
        if gnorm < 1e-300 {
            break;
        }
        let mut improved = false;
        for _ in 0..30 {
            for i in 0..n {
                a[(i, i)] += mu * (1.0 + a[(i, i)]);
            }
            let step = lu_solve(&a, &grad.iter().map(|g| -g).collect::<Vec<_>>());
            for i in 0..n {
                a[(i, i)] = (a[(i, i)] - mu) / (1.0 + mu);
            }
            let Some(step) = step else {
                mu *= 10.0;
                continue;
            };
            let trial: Vec<f64> = u
                .iter()
                .zip(&step)
                .map(|(ui, si)| (ui + si).clamp(-cfg.log_bound, cfg.log_bound))
                .collect();
            let tx = to_x(&trial);
            let mut tr = vec![0.0; m];
            let mut tj = Mat::zeros(m, n);
            residuals(sys, &tx, &mut tr, &mut tj);
            let tcost: f64 = tr.iter().map(|v| v * v).sum();
            if tcost.is_finite() && tcost < cost {
                u = trial;
                x = tx;
                r = tr;
                jac = tj;
                cost = tcost;
                mu = (mu / 3.0).max(1e-12);
                improved = true;
                break;
            }
            mu *= 4.0;
            if mu > 1e12 {
                break;
            }
        }
        if !improved {
            break;
        }
    }
    (x, cost.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::parse_polynomial;

    fn xy(text: &str) -> Polynomial {
        parse_polynomial(text, &["x".to_string(), "y".to_string()]).unwrap()
    }

    #[test]
    fn fast_paths() {
        assert_eq!(fast_path(&[xy("x^2*y")]), Some("monomial"));
        assert!(fast_path(&[xy("x^2 + y^4")]).is_some());
        assert_eq!(fast_path(&[xy("x^2 - y^2")]), None);
        assert_eq!(fast_path(&[xy("0"), xy("3")]), Some("nonzero constant"));
    }

    #[test]
    fn finds_diagonal_zero() {
        let cfg = SearchConfig::default();
        match torus_zero(&[xy("(x - y)^2")], 2, &cfg) {
            TorusOutcome::Zero(x) => assert!((x[0] - x[1]).abs() < 1e-4),
            other => panic!("expected a zero, got {other:?}"),
        }
        match torus_zero(&[xy("x^2 - 4*y^2"), xy("x + 2*y")], 2, &cfg) {
            TorusOutcome::Zero(x) => assert!((x[0] + 2.0 * x[1]).abs() < 1e-6),
            other => panic!("expected a zero, got {other:?}"),
        }
    }

    #[test]
    fn exhausts_without_zero() {
        let cfg = SearchConfig {
            starts_per_orthant: 8,
            ..SearchConfig::default()
        };
        // x^2 - x*y + y^2 has no real zero off the origin.
        match torus_zero(&[xy("x^2 - x*y + y^2")], 2, &cfg) {
            TorusOutcome::NotFound { starts, best_residual } => {
                assert_eq!(starts, 32);
                assert!(best_residual > 0.1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn all_zero_system_vanishes_everywhere() {
        assert_eq!(torus_zero(&[xy("0")], 2, &SearchConfig::default()), TorusOutcome::Zero(vec![1.0, 1.0]));
    }
}
