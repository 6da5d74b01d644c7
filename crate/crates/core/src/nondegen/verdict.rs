use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use super::principal::{coordinate_restriction, euler_component};
use super::torus::{torus_zero, SearchConfig, TorusOutcome};
use crate::polyring::{default_variable_names, rat, Exponent, Polynomial, PolynomialSystem, Rational};
use crate::polytope::{
    exponent_point, g_transform_data, point_exponent, GlobalNewtonPolytope, Hull,
};
use crate::{Error, Result};

/// Ambient dimension bound for the at-infinity checks.
pub const MAX_NVARS: usize = 8;
/// Ambient dimension bound for the subset enumeration of g-adaptedness.
pub const MAX_NVARS_G_ADAPTED: usize = 6;
const MAX_SUBSETS: usize = 1 << 16;
const MAX_MINKOWSKI_POINTS: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Degenerate,
    LikelyNondegenerate,
    CertifiedNondegenerate,
}

/// One principal-part system tested for torus zeros.
#[derive(Clone, Debug, Serialize)]
pub struct FaceCheck {
    /// Zero-based coordinates set to zero before the test (g-adaptedness only).
    pub removed: Vec<usize>,
    #[serde(serialize_with = "crate::ser::rational_vecs")]
    pub supporting_vectors: Vec<Vec<Rational>>,
    /// Exponents of the face (of the polyhedron the check enumerates).
    pub face: Vec<Exponent>,
    pub system: Vec<String>,
    pub status: Status,
    pub method: String,
    pub witness: Option<Vec<f64>>,
    pub starts: usize,
    pub best_residual: Option<f64>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SearchReport {
    pub faces_checked: usize,
    pub starts_attempted: usize,
    pub best_residual: Option<f64>,
    pub notes: Vec<String>,
    pub faces: Vec<FaceCheck>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NondegeneracyVerdict {
    pub status: Status,
    pub witness: Option<Vec<f64>>,
    pub report: SearchReport,
}

impl NondegeneracyVerdict {
    fn certified(note: String) -> Self {
        NondegeneracyVerdict {
            status: Status::CertifiedNondegenerate,
            witness: None,
            report: SearchReport {
                notes: vec![note],
                ..SearchReport::default()
            },
        }
    }

    fn aggregate(faces: Vec<FaceCheck>, notes: Vec<String>) -> Self {
        let status = faces.iter().map(|f| f.status).min().unwrap_or(Status::CertifiedNondegenerate);
        let witness = faces.iter().find(|f| f.status == Status::Degenerate).and_then(|f| f.witness.clone());
        let best_residual = faces.iter().filter_map(|f| f.best_residual).fold(None, |acc: Option<f64>, r| {
            Some(acc.map_or(r, |a| a.min(r)))
        });
        NondegeneracyVerdict {
            status,
            witness,
            report: SearchReport {
                faces_checked: faces.len(),
                starts_attempted: faces.iter().map(|f| f.starts).sum(),
                best_residual,
                notes,
                faces,
            },
        }
    }
}

struct Job {
    removed: Vec<usize>,
    ws: Vec<Vec<Rational>>,
    face: Vec<Exponent>,
    system: Vec<Polynomial>,
    nvars: usize,
    /// Original names of the kept coordinates, for the log.
    names: Vec<String>,
}

fn run_jobs(jobs: Vec<Job>, cfg: &SearchConfig) -> Vec<FaceCheck> {
    jobs.into_par_iter()
        .map(|job| {
            let outcome = torus_zero(&job.system, job.nvars, cfg);
            let (status, method, witness, starts, best) = match outcome {
                TorusOutcome::Certified(why) => (Status::CertifiedNondegenerate, why.to_string(), None, 0, None),
                TorusOutcome::Zero(x) => (Status::Degenerate, "torus zero found".to_string(), Some(x), 0, Some(0.0)),
                TorusOutcome::NotFound { starts, best_residual } => (
                    Status::LikelyNondegenerate,
                    "search exhausted".to_string(),
                    None,
                    starts,
                    Some(best_residual),
                ),
            };
            FaceCheck {
                removed: job.removed,
                supporting_vectors: job.ws,
                face: job.face,
                system: job.system.iter().map(|p| p.to_text(&job.names)).collect(),
                status,
                method,
                witness,
                starts,
                best_residual: best,
            }
        })
        .collect()
}

fn check_system(f: &PolynomialSystem, max: usize) -> Result<()> {
    if f.nvars() > max {
        return Err(Error::DimensionTooLarge { dim: f.nvars(), max });
    }
    if f.components().iter().any(Polynomial::is_zero) {
        return Err(Error::ZeroPolynomial);
    }
    Ok(())
}

/// Vertices of `conv(supp f)` as integer points.
fn support_vertices(f: &Polynomial) -> Result<Vec<Vec<i64>>> {
    let pts: Vec<Vec<i64>> = f.support().iter().map(exponent_point).collect();
    let hull = Hull::new(f.nvars(), &pts)?;
    Ok(hull.vertices().into_iter().map(|i| hull.point(i).to_vec()).collect())
}

/// Whether, in the plane, no edge of the boundary at infinity of one component
/// is parallel to an edge of another. Requires convenient components.
fn plane_edges_not_parallel(f: &PolynomialSystem) -> Result<bool> {
    if f.nvars() != 2 || f.len() < 2 {
        return Ok(false);
    }
    let mut directions: Vec<BTreeSet<(i64, i64)>> = Vec::new();
    for p in f.components() {
        let gamma = GlobalNewtonPolytope::from_polynomial(p)?;
        if !gamma.is_convenient() {
            return Ok(false);
        }
        let hull = gamma.hull();
        let origin = hull.index_of(&[0, 0]);
        let mut dirs = BTreeSet::new();
        for face in hull.faces().iter().filter(|fc| fc.dim == 1) {
            if origin.is_some_and(|o| face.points.contains(&o)) {
                continue;
            }
            let ends: Vec<&[i64]> = face
                .points
                .iter()
                .map(|&i| hull.point(i))
                .collect();
            let a = ends[0];
            let b = ends[ends.len() - 1];
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            let g = gcd(dx.abs(), dy.abs()).max(1);
            let (dx, dy) = (dx / g, dy / g);
            dirs.insert(if dx < 0 || (dx == 0 && dy < 0) { (-dx, -dy) } else { (dx, dy) });
        }
        directions.push(dirs);
    }
    for i in 0..directions.len() {
        for j in i + 1..directions.len() {
            if !directions[i].is_disjoint(&directions[j]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Non-degeneracy at infinity: for every `w` with `max_i w_i > 0`, the
/// principal parts `(f_1)_w, .., (f_m)_w` have no common zero on the torus.
///
/// The principal-part tuple only depends on the face of the Minkowski sum of
/// the component Newton polytopes that `w` selects, so the faces of that sum
/// with a positive selector are enumerated.
pub fn nondegenerate_at_infinity(f: &PolynomialSystem, cfg: &SearchConfig) -> Result<NondegeneracyVerdict> {
    check_system(f, MAX_NVARS)?;
    let n = f.nvars();
    if let Some(i) = f.components().iter().position(Polynomial::is_monomial) {
        return Ok(NondegeneracyVerdict::certified(format!("component {} is a monomial", i + 1)));
    }
    if plane_edges_not_parallel(f)? {
        return Ok(NondegeneracyVerdict::certified(
            "convenient plane components with no parallel edges at infinity".to_string(),
        ));
    }
    let mut sum: BTreeSet<Vec<i64>> = [vec![0; n]].into_iter().collect();
    for p in f.components() {
        let verts = support_vertices(p)?;
        let mut next = BTreeSet::new();
        for a in &sum {
            for b in &verts {
                next.insert(a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<i64>>());
            }
        }
        if next.len() > MAX_MINKOWSKI_POINTS {
            return Err(Error::Invalid(format!(
                "Minkowski sum of the Newton polytopes has more than {MAX_MINKOWSKI_POINTS} points"
            )));
        }
        sum = next;
    }
    let sum: Vec<Vec<i64>> = sum.into_iter().collect();
    let hull = Hull::new(n, &sum)?;
    let mut jobs = Vec::new();
    for face in hull.faces() {
        let Some(w) = hull.positive_selector(face) else { continue };
        let system = f
            .components()
            .iter()
            .map(|p| super::principal_part_global(p, std::slice::from_ref(&w)))
            .collect::<Result<Vec<_>>>()?;
        jobs.push(Job {
            removed: Vec::new(),
            ws: vec![w],
            face: face.points.iter().map(|&i| point_exponent(hull.point(i))).collect(),
            system,
            nvars: n,
            names: default_variable_names(n),
        });
    }
    let faces = run_jobs(jobs, cfg);
    Ok(NondegeneracyVerdict::aggregate(faces, Vec::new()))
}

/// Khovanskii non-degeneracy: for every face `Δ` of `Γ̃(f)` not containing the
/// origin, `f_Δ = x_1 ∂f_Δ/∂x_1 = .. = x_n ∂f_Δ/∂x_n = 0` has no torus solution.
pub fn khovanskii_nondegenerate(f: &Polynomial, cfg: &SearchConfig) -> Result<NondegeneracyVerdict> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let n = f.nvars();
    if n > MAX_NVARS {
        return Err(Error::DimensionTooLarge { dim: n, max: MAX_NVARS });
    }
    let gamma = GlobalNewtonPolytope::from_polynomial(f)?;
    let hull = gamma.hull();
    let origin = hull.index_of(&vec![0; n]);
    let mut jobs = Vec::new();
    for face in hull.faces() {
        if origin.is_some_and(|o| face.points.contains(&o)) {
            continue;
        }
        let exps: Vec<Exponent> = face.points.iter().map(|&i| point_exponent(hull.point(i))).collect();
        let set: BTreeSet<&Exponent> = exps.iter().collect();
        let f_delta = f.filter_terms(|e| set.contains(e));
        let mut system = vec![f_delta.clone()];
        system.extend((0..n).map(|i| euler_component(&f_delta, i)).filter(|p| !p.is_zero()));
        jobs.push(Job {
            removed: Vec::new(),
            ws: vec![hull.normal_cone_center(face)],
            face: exps,
            system,
            nvars: n,
            names: default_variable_names(n),
        });
    }
    let faces = run_jobs(jobs, cfg);
    Ok(NondegeneracyVerdict::aggregate(faces, Vec::new()))
}

/// Strong g-adaptedness of `f` to the convenient polyhedron `gamma`: for every
/// proper coordinate subset `I`, the restriction `F_I` is g-adapted to `(Γ̃)_I`.
pub fn strongly_g_adapted(
    f: &PolynomialSystem,
    gamma: &GlobalNewtonPolytope,
    cfg: &SearchConfig,
) -> Result<NondegeneracyVerdict> {
    check_system(f, MAX_NVARS_G_ADAPTED)?;
    let n = f.nvars();
    if gamma.nvars() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: gamma.nvars(),
        });
    }
    if !gamma.is_convenient() {
        return Err(Error::NotConvenient);
    }
    let deg = f.degree().unwrap_or(0);
    if deg > gamma.max_degree() {
        return Err(Error::DegreeExceedsBound {
            degree: deg,
            bound: gamma.max_degree(),
        });
    }
    let mut jobs = Vec::new();
    let mut visited = 0usize;
    for mask in 0..(1usize << n) - 1 {
        let removed: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let gamma_i = gamma.coordinate_image(&removed)?;
        let comps: Vec<Polynomial> = f
            .components()
            .iter()
            .map(|p| coordinate_restriction(p, &removed))
            .collect::<Result<_>>()?;
        let ni = n - removed.len();
        let kept_names: Vec<String> = default_variable_names(n)
            .into_iter()
            .enumerate()
            .filter(|(i, _)| !removed.contains(i))
            .map(|(_, s)| s)
            .collect();
        let gt = g_transform_data(&gamma_i)?;
        let family: Vec<Vec<Rational>> = gt
            .w_vectors
            .iter()
            .map(|(_, w)| w.iter().map(|&x| rat(x)).collect())
            .collect();
        let faces: Vec<BTreeSet<usize>> = family.iter().map(|w| gamma_i.hull().support(w).1.into_iter().collect()).collect();
        let origin = gamma_i.hull().index_of(&vec![0; ni]).expect("origin is a polytope point");
        let mut seen: BTreeMap<Vec<String>, ()> = BTreeMap::new();
        // Depth-first over subsets in index order; intersections only shrink, so
        // an empty one prunes the branch.
        let mut stack: Vec<(Vec<usize>, BTreeSet<usize>)> =
            (0..family.len()).map(|k| (vec![k], faces[k].clone())).rev().collect();
        while let Some((subset, inter)) = stack.pop() {
            visited += 1;
            if visited > MAX_SUBSETS {
                return Err(Error::Invalid(format!("more than {MAX_SUBSETS} subsets in the g-adapted enumeration")));
            }
            if inter.is_empty() {
                continue;
            }
            let last = *subset.last().expect("nonempty subset");
            for k in (last + 1..family.len()).rev() {
                let next: BTreeSet<usize> = inter.intersection(&faces[k]).copied().collect();
                let mut s = subset.clone();
                s.push(k);
                stack.push((s, next));
            }
            if inter.contains(&origin) {
                continue;
            }
            let ws: Vec<Vec<Rational>> = subset.iter().map(|&k| family[k].clone()).collect();
            let system = comps
                .iter()
                .map(|p| super::principal_part_global(p, &ws))
                .collect::<Result<Vec<_>>>()?;
            let key: Vec<String> = system.iter().map(|p| p.to_string()).collect();
            if seen.insert(key, ()).is_some() {
                continue;
            }
            jobs.push(Job {
                removed: removed.clone(),
                ws,
                face: inter.iter().map(|&i| point_exponent(gamma_i.hull().point(i))).collect(),
                system,
                nvars: ni,
                names: kept_names.clone(),
            });
        }
    }
    let faces = run_jobs(jobs, cfg);
    Ok(NondegeneracyVerdict::aggregate(faces, Vec::new()))
}

