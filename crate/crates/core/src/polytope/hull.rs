//! Exact convex hulls of small integer point sets.
//!
//! Facets are found by brute force over affinely independent subsets, which is
//! adequate for the desk-scale supports this crate handles. Faces are the
//! closure of the facet point sets under intersection.

use std::collections::{BTreeSet, HashSet};

use num_traits::{ToPrimitive, Zero};

use crate::linalg::rational::{nullspace, primitive_integer, rank};
use crate::polyring::{rat, Rational};
use crate::{Error, Result};

/// Largest ambient dimension accepted by the hull routines.
pub const MAX_DIM: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Facet {
    /// Primitive outward normal, orthogonal to the lineality directions.
    pub normal: Vec<i64>,
    /// `max <normal, p>` over the hull.
    pub offset: i64,
    /// Indices of the hull points lying on the facet.
    pub points: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub points: Vec<usize>,
    /// Facets containing this face; empty only for the hull itself.
    pub facets: Vec<usize>,
    pub dim: usize,
}

#[derive(Clone, Debug)]
pub struct Hull {
    dim: usize,
    points: Vec<Vec<i64>>,
    affine_dim: usize,
    orthogonal: Vec<Vec<i64>>,
    facets: Vec<Facet>,
    faces: Vec<Face>,
}

impl Hull {
    /// Hull of the given points; duplicates are merged and points sorted.
    pub fn new(dim: usize, pts: &[Vec<i64>]) -> Result<Self> {
        if dim > MAX_DIM {
            return Err(Error::DimensionTooLarge { dim, max: MAX_DIM });
        }
        if pts.is_empty() {
            return Err(Error::Invalid("convex hull of an empty point set".into()));
        }
        for p in pts {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
        }
        let points: Vec<Vec<i64>> = pts.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let diffs = differences(&points, &(0..points.len()).collect::<Vec<_>>());
        let orth_rat = nullspace(&diffs, dim);
        let orthogonal: Vec<Vec<i64>> = orth_rat.iter().map(|v| to_i64(&primitive_integer(v))).collect::<Result<_>>()?;
        let affine_dim = dim - orthogonal.len();
        let mut hull = Hull {
            dim,
            points,
            affine_dim,
            orthogonal,
            facets: Vec::new(),
            faces: Vec::new(),
        };
        hull.facets = hull.find_facets()?;
        hull.faces = hull.close_faces();
        Ok(hull)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn affine_dim(&self) -> usize {
        self.affine_dim
    }

    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[i64] {
        &self.points[i]
    }

    pub fn index_of(&self, p: &[i64]) -> Option<usize> {
        self.points.binary_search_by(|q| q.as_slice().cmp(p)).ok()
    }

    /// Primitive basis of the directions orthogonal to the affine hull.
    pub fn orthogonal(&self) -> &[Vec<i64>] {
        &self.orthogonal
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// All nonempty faces, including the hull itself, sorted by dimension and
    /// then by point indices.
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// Indices of the vertices.
    pub fn vertices(&self) -> Vec<usize> {
        self.faces
            .iter()
            .filter(|f| f.dim == 0)
            .map(|f| f.points[0])
            .collect()
    }

    /// `max <w, p>` over the hull and the points attaining it.
    pub fn support(&self, w: &[Rational]) -> (Rational, Vec<usize>) {
        support_over(self.points.iter().map(|p| p.as_slice()), w)
    }

    /// A vector in the relative interior of the normal cone of `face`.
    pub fn normal_cone_center(&self, face: &Face) -> Vec<Rational> {
        let mut w = vec![Rational::zero(); self.dim];
        for &f in &face.facets {
            for (wi, ni) in w.iter_mut().zip(&self.facets[f].normal) {
                *wi += rat(*ni);
            }
        }
        w
    }

    /// A vector `w` with `max_i w_i > 0` whose maximizing face is exactly
    /// `face`, if one exists.
    pub fn positive_selector(&self, face: &Face) -> Option<Vec<Rational>> {
        let base = self.normal_cone_center(face);
        let dir: Vec<i64> = if let Some(u) = self.orthogonal.first() {
            if u.iter().any(|&x| x > 0) {
                u.clone()
            } else {
                u.iter().map(|x| -x).collect()
            }
        } else {
            face.facets
                .iter()
                .map(|&f| &self.facets[f].normal)
                .find(|n| n.iter().any(|&x| x > 0))?
                .clone()
        };
        let (j, dj) = dir
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > 0)
            .max_by_key(|(_, &x)| x)
            .map(|(j, &x)| (j, x))?;
        // Pick K so that coordinate j becomes positive.
        let need = -base[j].clone() / rat(dj);
        let k = need.floor() + rat(1);
        let k = if k < rat(1) { rat(1) } else { k };
        Some(base.iter().zip(&dir).map(|(b, d)| b + &k * rat(*d)).collect())
    }

    fn find_facets(&self) -> Result<Vec<Facet>> {
        let d = self.affine_dim;
        if d == 0 {
            return Ok(Vec::new());
        }
        let npts = self.points.len();
        let mut seen: HashSet<Vec<i64>> = HashSet::new();
        let mut facets = Vec::new();
        let mut combo: Vec<usize> = (0..d).collect();
        loop {
            if let Some(normal) = self.candidate_normal(&combo)? {
                let values: Vec<i128> = self.points.iter().map(|p| dot_i(&normal, p)).collect();
                let v0 = values[combo[0]];
                let above = values.iter().any(|&v| v > v0);
                let below = values.iter().any(|&v| v < v0);
                if !(above && below) {
                    let normal: Vec<i64> = if above { normal.iter().map(|x| -x).collect() } else { normal };
                    if seen.insert(normal.clone()) {
                        let offset = dot_i(&normal, &self.points[combo[0]]);
                        let points: Vec<usize> = (0..npts).filter(|&i| dot_i(&normal, &self.points[i]) == offset).collect();
                        let offset = i64::try_from(offset).map_err(|_| overflow())?;
                        facets.push(Facet { normal, offset, points });
                    }
                }
            }
            if !next_combination(&mut combo, npts) {
                break;
            }
        }
        facets.sort_by(|a, b| a.points.cmp(&b.points).then_with(|| a.normal.cmp(&b.normal)));
        Ok(facets)
    }

    fn candidate_normal(&self, combo: &[usize]) -> Result<Option<Vec<i64>>> {
        let mut rows = differences(&self.points, combo);
        for u in &self.orthogonal {
            rows.push(u.iter().map(|&x| rat(x)).collect());
        }
        let ns = nullspace(&rows, self.dim);
        if ns.len() != 1 {
            return Ok(None);
        }
        Ok(Some(to_i64(&primitive_integer(&ns[0]))?))
    }

    fn close_faces(&self) -> Vec<Face> {
        let all: Vec<usize> = (0..self.points.len()).collect();
        let mut sets: BTreeSet<Vec<usize>> = BTreeSet::new();
        sets.insert(all);
        let mut frontier: Vec<Vec<usize>> = self.facets.iter().map(|f| f.points.clone()).collect();
        for f in &frontier {
            sets.insert(f.clone());
        }
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for s in &frontier {
                for f in &self.facets {
                    let inter: Vec<usize> = s.iter().copied().filter(|i| f.points.binary_search(i).is_ok()).collect();
                    if !inter.is_empty() && sets.insert(inter.clone()) {
                        next.push(inter);
                    }
                }
            }
            frontier = next;
        }
        let mut faces: Vec<Face> = sets
            .into_iter()
            .map(|points| {
                let facets: Vec<usize> = if points.len() == self.points.len() {
                    Vec::new()
                } else {
                    (0..self.facets.len())
                        .filter(|&k| points.iter().all(|i| self.facets[k].points.binary_search(i).is_ok()))
                        .collect()
                };
                let dim = if points.len() == 1 { 0 } else { rank(&differences(&self.points, &points), self.dim) };
                Face { points, facets, dim }
            })
            .collect();
        faces.sort_by(|a, b| a.dim.cmp(&b.dim).then_with(|| a.points.cmp(&b.points)));
        faces
    }
}

/// `max <w, p>` over `points` and the indices attaining it.
pub fn support_over<'a, I>(points: I, w: &[Rational]) -> (Rational, Vec<usize>)
where
    I: IntoIterator<Item = &'a [i64]>,
{
    let mut best: Option<Rational> = None;
    let mut arg = Vec::new();
    for (i, p) in points.into_iter().enumerate() {
        let v: Rational = p.iter().zip(w).map(|(&a, b)| b * rat(a)).sum();
        match &best {
            Some(b) if v < *b => {}
            Some(b) if v == *b => arg.push(i),
            _ => {
                best = Some(v);
                arg = vec![i];
            }
        }
    }
    (best.unwrap_or_else(Rational::zero), arg)
}

fn differences(points: &[Vec<i64>], idx: &[usize]) -> Vec<Vec<Rational>> {
    let Some(&first) = idx.first() else {
        return Vec::new();
    };
    let p0 = &points[first];
    idx[1..]
        .iter()
        .map(|&i| points[i].iter().zip(p0).map(|(a, b)| rat(a - b)).collect())
        .collect()
}

fn dot_i(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| i128::from(x) * i128::from(y)).sum()
}

fn to_i64(v: &[num_bigint::BigInt]) -> Result<Vec<i64>> {
    v.iter().map(|x| x.to_i64().ok_or_else(overflow)).collect()
}

fn overflow() -> Error {
    Error::Invalid("facet normal does not fit in 64 bits".into())
}

/// Advances `combo` to the next `k`-subset of `0..n` in lexicographic order.
pub fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    if k == 0 || k > n {
        return false;
    }
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_faces() {
        let h = Hull::new(2, &[vec![0, 0], vec![3, 0], vec![0, 3], vec![1, 1]]).unwrap();
        assert_eq!(h.affine_dim(), 2);
        assert_eq!(h.facets().len(), 3);
        let verts: Vec<&[i64]> = h.vertices().iter().map(|&i| h.point(i)).collect();
        assert_eq!(verts, vec![&[0, 0][..], &[0, 3][..], &[3, 0][..]]);
        // 3 vertices, 3 edges, the triangle itself
        assert_eq!(h.faces().len(), 7);
        let top = h.facets().iter().find(|f| f.normal == vec![1, 1]).unwrap();
        assert_eq!(top.offset, 3);
    }

    #[test]
    fn segment_in_the_plane() {
        let h = Hull::new(2, &[vec![0, 0], vec![2, 1]]).unwrap();
        assert_eq!(h.affine_dim(), 1);
        assert_eq!(h.orthogonal().len(), 1);
        assert_eq!(h.facets().len(), 2);
        assert_eq!(h.vertices().len(), 2);
        for face in h.faces() {
            assert!(h.positive_selector(face).is_some());
        }
    }

    #[test]
    fn single_point() {
        let h = Hull::new(3, &[vec![0, 0, 0]]).unwrap();
        assert_eq!(h.affine_dim(), 0);
        assert_eq!(h.faces().len(), 1);
        assert_eq!(h.vertices(), vec![0]);
    }

    #[test]
    fn cube_face_lattice() {
        let mut pts = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    pts.push(vec![a, b, c]);
                }
            }
        }
        let h = Hull::new(3, &pts).unwrap();
        assert_eq!(h.facets().len(), 6);
        let count = |d| h.faces().iter().filter(|f| f.dim == d).count();
        assert_eq!((count(0), count(1), count(2), count(3)), (8, 12, 6, 1));
    }

    #[test]
    fn selector_picks_the_face() {
        let h = Hull::new(2, &[vec![0, 0], vec![2, 0], vec![0, 2]]).unwrap();
        for face in h.faces() {
            match h.positive_selector(face) {
                Some(w) => {
                    assert!(w.iter().any(|x| *x > rat(0)));
                    let (_, arg) = h.support(&w);
                    assert_eq!(arg, face.points);
                }
                None => {
                    // only the origin vertex, the two axis edges and the whole triangle
                    assert!(face.points.contains(&0));
                }
            }
        }
    }

    #[test]
    fn combinations_enumerate_all_subsets() {
        let mut c = vec![0, 1];
        let mut n = 1;
        while next_combination(&mut c, 4) {
            n += 1;
        }
        assert_eq!(n, 6);
    }
}
