use std::collections::BTreeSet;

use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::global::{exponent_point, FaceData};
use super::hull::{next_combination, MAX_DIM};
use crate::linalg::rational::{nullspace, primitive_integer};
use crate::polyring::{rat, Exponent, Polynomial, Rational};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalFacet {
    /// Primitive, entrywise nonnegative normal.
    pub normal: Vec<i64>,
    /// `l(normal, Γ)`, the minimum of `<normal, ·>` over the polyhedron.
    pub offset: i64,
}

/// Local Newton polyhedron: the convex hull of `α + R^n_+` over the generators.
#[derive(Clone, Debug, Serialize)]
pub struct LocalNewtonPolytope {
    nvars: usize,
    generators: Vec<Exponent>,
    facets: Vec<LocalFacet>,
}

impl LocalNewtonPolytope {
    pub fn from_polynomial(f: &Polynomial) -> Result<Self> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Self::from_generators(f.nvars(), f.support())
    }

    pub fn from_generators(nvars: usize, mut generators: Vec<Exponent>) -> Result<Self> {
        if nvars > MAX_DIM {
            return Err(Error::DimensionTooLarge { dim: nvars, max: MAX_DIM });
        }
        if generators.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        if let Some(g) = generators.iter().find(|g| g.nvars() != nvars) {
            return Err(Error::DimensionMismatch {
                expected: nvars,
                found: g.nvars(),
            });
        }
        generators.sort();
        generators.dedup();
        let facets = local_facets(nvars, &generators)?;
        Ok(LocalNewtonPolytope {
            nvars,
            generators,
            facets,
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn generators(&self) -> &[Exponent] {
        &self.generators
    }

    pub fn facets(&self) -> &[LocalFacet] {
        &self.facets
    }

    /// `F(Γ)`: the primitive normals of the facets.
    pub fn facet_normals(&self) -> Vec<Vec<i64>> {
        self.facets.iter().map(|f| f.normal.clone()).collect()
    }

    /// Generators that are not dominated coordinatewise by another generator.
    pub fn minimal_generators(&self) -> Vec<Exponent> {
        minimal(&self.generators)
    }

    /// `l(v, Γ)` and `Δ(v, Γ)` as the generators attaining the minimum.
    pub fn face(&self, v: &[Rational]) -> Result<FaceData> {
        if v.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: v.len(),
            });
        }
        if v.iter().any(|x| *x < Rational::zero()) {
            return Err(Error::NegativeSupport);
        }
        let values: Vec<Rational> = self.generators.iter().map(|g| g.pairing(v)).collect();
        let value = values.iter().min().cloned().unwrap_or_else(Rational::zero);
        let face_exponents = self
            .generators
            .iter()
            .zip(&values)
            .filter(|(_, x)| **x == value)
            .map(|(g, _)| g.clone())
            .collect();
        Ok(FaceData {
            supporting_vector: v.to_vec(),
            value,
            face_exponents,
        })
    }

    /// Whether `∩_{v ∈ V} Δ(v, Γ)` is a nonempty bounded face.
    pub fn is_compact_intersection(&self, vs: &[Vec<Rational>]) -> Result<bool> {
        if vs.is_empty() {
            return Ok(false);
        }
        let mut common: Option<BTreeSet<Exponent>> = None;
        for v in vs {
            let face: BTreeSet<Exponent> = self.face(v)?.face_exponents.into_iter().collect();
            common = Some(match common {
                None => face,
                Some(c) => c.intersection(&face).cloned().collect(),
            });
        }
        let nonempty = common.is_some_and(|c| !c.is_empty());
        // The recession cone of the intersection is spanned by the e_j with v_j = 0 for all v.
        let bounded = (0..self.nvars).all(|j| vs.iter().any(|v| v[j] > Rational::zero()));
        Ok(nonempty && bounded)
    }

    /// Meets every coordinate axis.
    pub fn is_convenient(&self) -> bool {
        (0..self.nvars).all(|i| {
            self.generators
                .iter()
                .any(|g| g.entries().iter().enumerate().all(|(j, &a)| j == i || a == 0))
        })
    }
}

fn minimal(gens: &[Exponent]) -> Vec<Exponent> {
    gens.iter()
        .filter(|a| {
            !gens.iter().any(|b| {
                b != *a && b.entries().iter().zip(a.entries()).all(|(x, y)| x <= y)
            })
        })
        .cloned()
        .collect()
}

fn local_facets(n: usize, generators: &[Exponent]) -> Result<Vec<LocalFacet>> {
    let mins = minimal(generators);
    let pts: Vec<Vec<i64>> = mins.iter().map(exponent_point).collect();
    let all: Vec<Vec<i64>> = generators.iter().map(exponent_point).collect();
    let mut seen = BTreeSet::new();
    let mut facets = Vec::new();
    for k in 1..=n.min(pts.len()) {
        let mut pc: Vec<usize> = (0..k).collect();
        loop {
            let mut dc: Vec<usize> = (0..n - k).collect();
            loop {
                let mut rows: Vec<Vec<Rational>> = pc[1..]
                    .iter()
                    .map(|&i| pts[i].iter().zip(&pts[pc[0]]).map(|(a, b)| rat(a - b)).collect())
                    .collect();
                for &j in &dc {
                    let mut e = vec![Rational::zero(); n];
                    e[j] = rat(1);
                    rows.push(e);
                }
                let ns = nullspace(&rows, n);
                if ns.len() == 1 {
                    let v: Vec<i64> = primitive_integer(&ns[0])
                        .iter()
                        .map(|x| x.to_i64().ok_or_else(|| Error::Invalid("facet normal overflow".into())))
                        .collect::<Result<_>>()?;
                    let v = if v.iter().all(|&x| x <= 0) { v.iter().map(|x| -x).collect() } else { v };
                    if v.iter().all(|&x| x >= 0) {
                        let base = dot(&v, &pts[pc[0]]);
                        if all.iter().all(|p| dot(&v, p) >= base) && seen.insert(v.clone()) {
                            facets.push(LocalFacet { normal: v, offset: base });
                        }
                    }
                }
                if !next_combination(&mut dc, n) {
                    break;
                }
            }
            if !next_combination(&mut pc, pts.len()) {
                break;
            }
        }
    }
    facets.sort_by(|a, b| b.normal.cmp(&a.normal));
    Ok(facets)
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::parse_polynomial;

    fn poly(text: &str, names: &[&str]) -> Polynomial {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        parse_polynomial(text, &names).unwrap()
    }

    fn normals(p: &LocalNewtonPolytope) -> BTreeSet<Vec<i64>> {
        p.facet_normals().into_iter().collect()
    }

    #[test]
    fn plane_curve_with_one_compact_edge() {
        let p = LocalNewtonPolytope::from_polynomial(&poly("x^2 + y^3", &["x", "y"])).unwrap();
        let expected: BTreeSet<Vec<i64>> = [vec![3, 2], vec![1, 0], vec![0, 1]].into_iter().collect();
        assert_eq!(normals(&p), expected);
        let f = p.face(&[rat(3), rat(2)]).unwrap();
        assert_eq!(f.value, rat(6));
        assert_eq!(f.face_exponents.len(), 2);
        assert!(p.is_compact_intersection(&[vec![rat(3), rat(2)]]).unwrap());
        assert!(!p.is_compact_intersection(&[vec![rat(1), rat(0)]]).unwrap());
        assert!(p.is_convenient());
    }

    #[test]
    fn one_variable_and_constant() {
        let p = LocalNewtonPolytope::from_polynomial(&poly("x", &["x"])).unwrap();
        assert_eq!(p.facet_normals(), vec![vec![1]]);
        assert_eq!(p.facets()[0].offset, 1);
        let p = LocalNewtonPolytope::from_polynomial(&poly("1", &["x", "y", "z"])).unwrap();
        let expected: BTreeSet<Vec<i64>> = [vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]].into_iter().collect();
        assert_eq!(normals(&p), expected);
    }

    #[test]
    fn negative_support_rejected() {
        let p = LocalNewtonPolytope::from_polynomial(&poly("x + y", &["x", "y"])).unwrap();
        assert_eq!(p.face(&[rat(-1), rat(1)]).unwrap_err(), Error::NegativeSupport);
    }
}
