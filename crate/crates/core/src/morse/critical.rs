use rayon::prelude::*;
use serde::Serialize;

use super::univariate::{real_roots, Univariate};
use super::{check_box, halton, MorseConfig, SearchBox};
use crate::linalg::dense::{jacobi_eigen, lu_solve, Mat};
use crate::polyring::{CompiledPoly, Polynomial};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    NondegenerateMin,
    NondegenerateSaddle,
    NondegenerateMax,
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub location: Vec<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    /// Ascending.
    pub hessian_eigenvalues: Vec<f64>,
    pub classification: Classification,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MorseVerdict {
    Morse,
    NotMorse,
    MorseOnSearchedRegion,
}

#[derive(Clone, Debug, Serialize)]
pub struct MorseReport {
    pub points: Vec<CriticalPoint>,
    pub verdict: MorseVerdict,
    /// `None` when the search ignored the box (one variable, exact isolation).
    pub search_box: Option<SearchBox>,
    pub dedup_radius: f64,
    /// Whether the point list is provably complete.
    pub complete: bool,
}

/// First and second derivatives lowered to `f64`.
pub(crate) struct Derivatives {
    pub f: CompiledPoly,
    pub grad: Vec<CompiledPoly>,
    pub hess: Vec<Vec<CompiledPoly>>,
}

impl Derivatives {
    pub fn new(f: &Polynomial) -> Self {
        Derivatives {
            f: f.compile(),
            grad: f.gradient().iter().map(Polynomial::compile).collect(),
            hess: f
                .hessian()
                .iter()
                .map(|row| row.iter().map(Polynomial::compile).collect())
                .collect(),
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.grad.iter().map(|g| g.eval(x)).collect()
    }

    pub fn hessian(&self, x: &[f64]) -> Mat {
        let n = x.len();
        Mat::from_fn(n, n, |i, j| self.hess[i][j].eval(x))
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Classifies a point from its Hessian eigenvalues.
pub fn classify(eigs: &[f64], cfg: &MorseConfig) -> Classification {
    classify_with_floor(eigs, 0.0, cfg)
}

/// As [`classify`], but eigenvalues at or below `floor` also count as zero.
fn classify_with_floor(eigs: &[f64], floor: f64, cfg: &MorseConfig) -> Classification {
    let scale = eigs.iter().fold(1.0f64, |m, e| m.max(e.abs()));
    let tol = (cfg.hessian_tolerance * scale).max(floor);
    if eigs.iter().any(|e| e.abs() <= tol) {
        Classification::Degenerate
    } else if eigs.iter().all(|&e| e > tol) {
        Classification::NondegenerateMin
    } else if eigs.iter().all(|&e| e < -tol) {
        Classification::NondegenerateMax
    } else {
        Classification::NondegenerateSaddle
    }
}

/// Pure Newton steps while they shrink the gradient. Nondegenerate points
/// converge quadratically; degenerate ones only linearly.
fn polish(d: &Derivatives, mut x: Vec<f64>) -> Vec<f64> {
    let mut gn = norm(&d.gradient(&x));
    for _ in 0..8 {
        if gn == 0.0 {
            break;
        }
        let g = d.gradient(&x);
        let Some(step) = lu_solve(&d.hessian(&x), &g) else { break };
        let y: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a - b).collect();
        let gy = norm(&d.gradient(&y));
        if !(gy < gn) {
            break;
        }
        x = y;
        gn = gy;
    }
    x
}

pub(crate) fn describe(d: &Derivatives, x: Vec<f64>, cfg: &MorseConfig) -> CriticalPoint {
    let x = polish(d, x);
    let g = d.gradient(&x);
    let gn = norm(&g);
    let (eigs, _) = jacobi_eigen(&d.hessian(&x));
    let scale = eigs.iter().fold(1.0f64, |m, e| m.max(e.abs()));
    // Near a degenerate point with a cubic term, |∇f| ~ λ², so an eigenvalue
    // of order sqrt(|∇f|) is indistinguishable from zero.
    let floor = 10.0 * (gn * scale).sqrt();
    CriticalPoint {
        value: d.f.eval(&x),
        gradient_norm: gn,
        classification: classify_with_floor(&eigs, floor, cfg),
        hessian_eigenvalues: eigs,
        location: x,
    }
}

/// Damped Newton iteration on `∇f = 0`; returns the point once the gradient
/// norm drops below the tolerance.
pub(crate) fn newton_critical(d: &Derivatives, mut x: Vec<f64>, cfg: &MorseConfig, escape: f64) -> Option<Vec<f64>> {
    let n = x.len();
    let mut g = d.gradient(&x);
    let mut gn = norm(&g);
    for _ in 0..cfg.max_iterations {
        if gn <= cfg.gradient_tolerance {
            return Some(x);
        }
        let h = d.hessian(&x);
        let rhs: Vec<f64> = g.iter().map(|v| -v).collect();
        let step = lu_solve(&h, &rhs).unwrap_or_else(|| {
            let ht = h.transpose();
            let mut a = ht.matmul(&h);
            let mu = 1e-8 * (1.0 + a.max_abs());
            for i in 0..n {
                a[(i, i)] += mu;
            }
            lu_solve(&a, &ht.matvec(&rhs)).unwrap_or(rhs.clone())
        });
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a + t * s).collect();
            let tg = d.gradient(&trial);
            let tn = norm(&tg);
            if tn.is_finite() && tn < gn * (1.0 - 1e-4 * t) {
                x = trial;
                g = tg;
                gn = tn;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted || norm(&x) > escape {
            break;
        }
    }
    (gn <= cfg.gradient_tolerance).then_some(x)
}

/// Merges points closer than `radius`, keeping the one with the smaller
/// gradient norm; output sorted lexicographically by location.
pub(crate) fn dedup_points(mut pts: Vec<CriticalPoint>, radius: f64) -> Vec<CriticalPoint> {
    pts.sort_by(|a, b| {
        a.location
            .iter()
            .zip(&b.location)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut out: Vec<CriticalPoint> = Vec::new();
    for p in pts {
        let near = out.iter().position(|q| {
            let d: f64 = q.location.iter().zip(&p.location).map(|(a, b)| (a - b) * (a - b)).sum();
            d.sqrt() <= radius
        });
        match near {
            Some(i) if p.gradient_norm < out[i].gradient_norm => out[i] = p,
            Some(_) => {}
            None => out.push(p),
        }
    }
    out
}

/// Critical points of `f`. In one variable all real critical points are found
/// by exact root isolation and the box is ignored; otherwise a multi-start
/// Newton search inside the box returns the points it reaches.
pub fn critical_points(f: &Polynomial, bx: &SearchBox, cfg: &MorseConfig) -> Result<Vec<CriticalPoint>> {
    if f.is_constant() {
        return Err(Error::ConstantPolynomial);
    }
    let n = f.nvars();
    let d = Derivatives::new(f);
    if n == 1 {
        let df = Univariate::from_polynomial(&f.differentiate(0)?);
        let (roots, _) = real_roots(&df);
        return Ok(roots.into_iter().map(|r| describe(&d, vec![r], cfg)).collect());
    }
    check_box(n, bx)?;
    let width = bx.lower.iter().zip(&bx.upper).map(|(a, b)| b - a).fold(0.0, f64::max);
    let escape = 10.0 * (width + norm(&bx.upper).max(norm(&bx.lower)));
    let slack = 1e-6 * width;
    let found: Vec<Vec<f64>> = (0..cfg.starts.max(1))
        .into_par_iter()
        .filter_map(|k| newton_critical(&d, bx.map_unit(&halton(k, n)), cfg, escape))
        .filter(|x| bx.contains(x, slack))
        .collect();
    let pts = found.into_iter().map(|x| describe(&d, x, cfg)).collect();
    Ok(dedup_points(pts, cfg.dedup_radius))
}

pub fn morse_verdict(f: &Polynomial, points: Vec<CriticalPoint>, bx: Option<&SearchBox>, cfg: &MorseConfig) -> MorseReport {
    let complete = f.nvars() == 1;
    let verdict = if points.iter().any(|p| p.classification == Classification::Degenerate) {
        MorseVerdict::NotMorse
    } else if complete {
        MorseVerdict::Morse
    } else {
        MorseVerdict::MorseOnSearchedRegion
    };
    MorseReport {
        points,
        verdict,
        search_box: if complete { None } else { bx.cloned() },
        dedup_radius: cfg.dedup_radius,
        complete,
    }
}

pub fn morse_report(f: &Polynomial, bx: &SearchBox, cfg: &MorseConfig) -> Result<MorseReport> {
    let pts = critical_points(f, bx, cfg)?;
    Ok(morse_verdict(f, pts, Some(bx), cfg))
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
    fn double_well() {
        let f = p("(x^2 - 1)^2", &["x"]);
        let cfg = MorseConfig::default();
        let bx = SearchBox::cube(1, 1.0).unwrap();
        let r = morse_report(&f, &bx, &cfg).unwrap();
        let locs: Vec<f64> = r.points.iter().map(|c| c.location[0]).collect();
        assert_eq!(locs.len(), 3);
        for (a, b) in locs.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(r.verdict, MorseVerdict::Morse);
        assert!((r.points[1].hessian_eigenvalues[0] + 4.0).abs() < 1e-9);
        assert!((r.points[0].hessian_eigenvalues[0] - 8.0).abs() < 1e-9);
    }

    #[test]
    fn cube_is_not_morse() {
        let f = p("x^3", &["x"]);
        let r = morse_report(&f, &SearchBox::cube(1, 1.0).unwrap(), &MorseConfig::default()).unwrap();
        assert_eq!(r.points.len(), 1);
        assert_eq!(r.verdict, MorseVerdict::NotMorse);
    }

    #[test]
    fn paraboloid_and_quartic() {
        let cfg = MorseConfig::default();
        let bx = SearchBox::cube(2, 2.0).unwrap();
        let r = morse_report(&p("x1^2 + x2^2", &["x1", "x2"]), &bx, &cfg).unwrap();
        assert_eq!(r.points.len(), 1);
        assert_eq!(r.points[0].classification, Classification::NondegenerateMin);
        assert_eq!(r.verdict, MorseVerdict::MorseOnSearchedRegion);
        let q = p("x1^4 + x2^4 - 2*x1^2 - 2*x2^2 + 2", &["x1", "x2"]);
        let r = morse_report(&q, &bx, &cfg).unwrap();
        assert_eq!(r.points.len(), 9);
        let mins = r.points.iter().filter(|c| c.classification == Classification::NondegenerateMin).count();
        assert_eq!(mins, 4);
    }

    #[test]
    fn constant_rejected() {
        let f = p("3", &["x"]);
        assert_eq!(
            critical_points(&f, &SearchBox::cube(1, 1.0).unwrap(), &MorseConfig::default()).unwrap_err(),
            Error::ConstantPolynomial
        );
    }
}
