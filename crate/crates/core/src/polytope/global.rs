use serde::Serialize;

use super::hull::{support_over, Hull};
use crate::polyring::{Exponent, Polynomial, PolynomialSystem, Rational};
use crate::{Error, Result};

/// Newton polyhedron at infinity: the convex hull of a support together with
/// the origin.
#[derive(Clone, Debug)]
pub struct GlobalNewtonPolytope {
    nvars: usize,
    generating_support: Vec<Exponent>,
    hull: Hull,
}

/// A face selected by a supporting vector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FaceData {
    #[serde(serialize_with = "crate::ser::rationals")]
    pub supporting_vector: Vec<Rational>,
    #[serde(serialize_with = "crate::ser::rational")]
    pub value: Rational,
    pub face_exponents: Vec<Exponent>,
}

/// Which point set a supporting vector is maximized over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceVariant {
    /// `m(w, f)` and `Δ(w, f)` over `supp(f)`.
    Support,
    /// `m(w, Γ̃)` and `Δ(w, Γ̃)` over `supp(f) ∪ {0}`.
    Polytope,
}

pub(crate) fn exponent_point(e: &Exponent) -> Vec<i64> {
    e.entries().iter().map(|&a| i64::from(a)).collect()
}

pub(crate) fn point_exponent(p: &[i64]) -> Exponent {
    Exponent::new(p.iter().map(|&a| a as u32).collect())
}

impl GlobalNewtonPolytope {
    pub fn from_polynomial(f: &Polynomial) -> Result<Self> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Self::from_points(f.nvars(), f.support())
    }

    /// Hull of the union of the component supports and the origin.
    pub fn from_system(f: &PolynomialSystem) -> Result<Self> {
        if f.components().iter().all(Polynomial::is_zero) {
            return Err(Error::ZeroPolynomial);
        }
        let support = f.components().iter().flat_map(Polynomial::support).collect();
        Self::from_points(f.nvars(), support)
    }

    /// Hull of `points ∪ {0}`.
    pub fn from_points(nvars: usize, mut points: Vec<Exponent>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| p.nvars() != nvars) {
            return Err(Error::DimensionMismatch {
                expected: nvars,
                found: p.nvars(),
            });
        }
        points.sort();
        points.dedup();
        let mut pts: Vec<Vec<i64>> = points.iter().map(exponent_point).collect();
        pts.push(vec![0; nvars]);
        let hull = Hull::new(nvars, &pts)?;
        Ok(GlobalNewtonPolytope {
            nvars,
            generating_support: points,
            hull,
        })
    }

    /// Hull of `{0, d*e_1, .., d*e_n}`.
    pub fn simplex(nvars: usize, d: u32) -> Result<Self> {
        let pts = (0..nvars)
            .map(|i| {
                let mut e = vec![0; nvars];
                e[i] = d;
                Exponent::new(e)
            })
            .collect();
        Self::from_points(nvars, pts)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn hull(&self) -> &Hull {
        &self.hull
    }

    pub fn generating_support(&self) -> &[Exponent] {
        &self.generating_support
    }

    pub fn vertices(&self) -> Vec<Exponent> {
        self.hull.vertices().into_iter().map(|i| point_exponent(self.hull.point(i))).collect()
    }

    /// Facet inequalities `<normal, x> <= offset`.
    pub fn facet_inequalities(&self) -> Vec<(Vec<i64>, i64)> {
        self.hull.facets().iter().map(|f| (f.normal.clone(), f.offset)).collect()
    }

    /// Meets every coordinate axis at a point other than the origin.
    pub fn is_convenient(&self) -> bool {
        (0..self.nvars).all(|i| {
            self.generating_support.iter().any(|e| {
                let a = e.entries();
                a[i] > 0 && a.iter().enumerate().all(|(j, &v)| j == i || v == 0)
            })
        })
    }

    /// `M`: the largest total degree of a point of the polytope.
    pub fn max_degree(&self) -> u32 {
        self.generating_support.iter().map(Exponent::degree).max().unwrap_or(0)
    }

    /// `m(w, Γ̃)` and `Δ(w, Γ̃)`, as polytope points.
    pub fn face(&self, w: &[Rational]) -> FaceData {
        let (value, idx) = self.hull.support(w);
        FaceData {
            supporting_vector: w.to_vec(),
            value,
            face_exponents: idx.into_iter().map(|i| point_exponent(self.hull.point(i))).collect(),
        }
    }

    /// `(Γ̃)_I`: the slice by `x_i = 0` for `i ∈ I`, in the surviving coordinates.
    /// Indices are zero-based.
    pub fn coordinate_image(&self, removed: &[usize]) -> Result<Self> {
        check_index_set(self.nvars, removed)?;
        let pts = self
            .generating_support
            .iter()
            .filter(|e| removed.iter().all(|&i| e.entries()[i] == 0))
            .map(|e| e.project_out(removed))
            .collect();
        Self::from_points(self.nvars - removed.len(), pts)
    }
}

pub(crate) fn check_index_set(nvars: usize, removed: &[usize]) -> Result<()> {
    for &i in removed {
        if i >= nvars {
            return Err(Error::IndexOutOfRange { index: i, nvars });
        }
    }
    let mut s = removed.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.len() >= nvars {
        return Err(Error::FullIndexSet);
    }
    Ok(())
}

/// `m(w, ·)` and `Δ(w, ·)` for a polynomial, over its support or over its
/// Newton polyhedron at infinity.
pub fn face_support(f: &Polynomial, w: &[Rational], variant: FaceVariant) -> Result<FaceData> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if w.len() != f.nvars() {
        return Err(Error::DimensionMismatch {
            expected: f.nvars(),
            found: w.len(),
        });
    }
    let mut pts: Vec<Vec<i64>> = f.support().iter().map(exponent_point).collect();
    if variant == FaceVariant::Polytope && !pts.iter().any(|p| p.iter().all(|&a| a == 0)) {
        pts.push(vec![0; f.nvars()]);
    }
    let (value, idx) = support_over(pts.iter().map(Vec::as_slice), w);
    let mut face_exponents: Vec<Exponent> = idx.into_iter().map(|i| point_exponent(&pts[i])).collect();
    face_exponents.sort();
    Ok(FaceData {
        supporting_vector: w.to_vec(),
        value,
        face_exponents,
    })
}

#[derive(Serialize)]
struct GlobalView<'a> {
    nvars: usize,
    vertices: Vec<Exponent>,
    facets: Vec<FacetView>,
    generating_support: &'a [Exponent],
    convenient: bool,
    max_degree: u32,
}

#[derive(Serialize)]
struct FacetView {
    normal: Vec<i64>,
    offset: i64,
}

impl Serialize for GlobalNewtonPolytope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GlobalView {
            nvars: self.nvars,
            vertices: self.vertices(),
            facets: self
                .facet_inequalities()
                .into_iter()
                .map(|(normal, offset)| FacetView { normal, offset })
                .collect(),
            generating_support: &self.generating_support,
            convenient: self.is_convenient(),
            max_degree: self.max_degree(),
        }
        .serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::{parse_polynomial, rat};

    fn xy(text: &str) -> Polynomial {
        parse_polynomial(text, &["x".to_string(), "y".to_string()]).unwrap()
    }

    fn exps(v: &[[u32; 2]]) -> Vec<Exponent> {
        v.iter().map(|e| Exponent::new(e.to_vec())).collect()
    }

    #[test]
    fn cubic_with_cross_term() {
        let p = GlobalNewtonPolytope::from_polynomial(&xy("x^3 + y^3 + x*y")).unwrap();
        let mut v = p.vertices();
        v.sort();
        assert_eq!(v, exps(&[[0, 0], [3, 0], [0, 3]]));
        assert!(p.is_convenient());
        assert_eq!(p.max_degree(), 3);
    }

    #[test]
    fn segment_and_constant_are_not_convenient() {
        let p = GlobalNewtonPolytope::from_polynomial(&xy("x^2*y")).unwrap();
        assert_eq!(p.vertices().len(), 2);
        assert!(!p.is_convenient());
        let p = GlobalNewtonPolytope::from_polynomial(&xy("1")).unwrap();
        assert_eq!(p.vertices(), exps(&[[0, 0]]));
        assert!(!p.is_convenient());
        assert!(GlobalNewtonPolytope::from_polynomial(&xy("0")).is_err());
    }

    #[test]
    fn face_support_examples() {
        let f = xy("x^3 + y^3 + x*y");
        let d = face_support(&f, &[rat(1), rat(1)], FaceVariant::Support).unwrap();
        assert_eq!(d.value, rat(3));
        assert_eq!(d.face_exponents, exps(&[[3, 0], [0, 3]]));
        let d = face_support(&f, &[rat(-1), rat(-1)], FaceVariant::Support).unwrap();
        assert_eq!(d.value, rat(-2));
        assert_eq!(d.face_exponents, exps(&[[1, 1]]));
        let d = face_support(&f, &[rat(0), rat(0)], FaceVariant::Support).unwrap();
        assert_eq!(d.value, rat(0));
        assert_eq!(d.face_exponents.len(), 3);
        let d = face_support(&f, &[rat(-1), rat(-1)], FaceVariant::Polytope).unwrap();
        assert_eq!(d.value, rat(0));
        assert_eq!(d.face_exponents, exps(&[[0, 0]]));
    }

    #[test]
    fn coordinate_images() {
        let p = GlobalNewtonPolytope::simplex(2, 2).unwrap();
        let s = p.coordinate_image(&[0]).unwrap();
        assert_eq!(s.nvars(), 1);
        let mut v = s.vertices();
        v.sort();
        assert_eq!(v, vec![Exponent::new(vec![0]), Exponent::new(vec![2])]);
        assert_eq!(p.coordinate_image(&[]).unwrap().vertices().len(), 3);
        assert_eq!(p.coordinate_image(&[0, 1]).unwrap_err(), Error::FullIndexSet);
        let q = GlobalNewtonPolytope::from_polynomial(&xy("x^2*y")).unwrap();
        assert_eq!(q.coordinate_image(&[1]).unwrap().vertices(), vec![Exponent::new(vec![0])]);
    }
}
