#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use polyopt::linalg::Mat;
use polyopt::polyring::{rat, Exponent, Polynomial, Rational};
use proptest::prelude::*;

pub fn names(n: usize) -> Vec<String> {
    polyopt::polyring::default_variable_names(n)
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn coefficient() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=4).prop_filter_map("nonzero", |(p, q)| (p != 0).then(|| ratio(p, q)))
}

pub fn exponent(nvars: usize, max: u32) -> impl Strategy<Value = Exponent> {
    proptest::collection::vec(0..=max, nvars).prop_map(Exponent::new)
}

/// Up to `terms` terms with per-variable exponents at most `max`.
pub fn polynomial_in(nvars: usize, terms: usize, max: u32) -> impl Strategy<Value = Polynomial> {
    proptest::collection::vec((exponent(nvars, max), coefficient()), 1..=terms)
        .prop_map(move |ts| Polynomial::from_terms(nvars, ts).unwrap())
}

pub fn nonzero_polynomial_in(nvars: usize, terms: usize, max: u32) -> impl Strategy<Value = Polynomial> {
    polynomial_in(nvars, terms, max).prop_filter("nonzero", |p| !p.is_zero())
}

/// A pair of polynomials in the same ring of 1 to 3 variables.
pub fn polynomial_pair() -> impl Strategy<Value = (Polynomial, Polynomial)> {
    (1usize..=3).prop_flat_map(|n| (polynomial_in(n, 5, 3), polynomial_in(n, 5, 3)))
}

pub fn point(nvars: usize, r: f64) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-r..r, nvars)
}

/// Smallest eigenvalue by Jacobi rotations, independent of the solver's QL path.
pub fn min_eig(m: &polyopt::linalg::Mat) -> f64 {
    let (vals, _) = polyopt::linalg::dense::jacobi_eigen(m);
    vals.into_iter().fold(f64::INFINITY, f64::min)
}

/// Solves `A λ = b` exactly; `None` when inconsistent or not unique.
fn solve_unique(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let (rows, cols) = (a.len(), a[0].len());
    let mut pivot_row = 0;
    for c in 0..cols {
        let Some(r) = (pivot_row..rows).find(|&r| !a[r][c].is_zero()) else {
            return None;
        };
        a.swap(pivot_row, r);
        b.swap(pivot_row, r);
        let inv = Rational::one() / a[pivot_row][c].clone();
        for k in 0..cols {
            a[pivot_row][k] = &a[pivot_row][k] * &inv;
        }
        b[pivot_row] = &b[pivot_row] * &inv;
        for r in 0..rows {
            if r != pivot_row && !a[r][c].is_zero() {
                let factor = a[r][c].clone();
                for k in 0..cols {
                    let v = &a[pivot_row][k] * &factor;
                    a[r][k] = &a[r][k] - &v;
                }
                let v = &b[pivot_row] * &factor;
                b[r] = &b[r] - &v;
            }
        }
        pivot_row += 1;
    }
    if (pivot_row..rows).any(|r| !b[r].is_zero()) {
        return None;
    }
    Some(b[..cols].to_vec())
}

/// Whether `p` is a convex combination of `others`, by Carathéodory: some at most
/// `n + 1` affinely independent points carry it with nonnegative weights.
pub fn in_convex_hull(p: &[i64], others: &[Vec<i64>]) -> bool {
    let n = p.len();
    let m = others.len();
    for size in 1..=(n + 1).min(m) {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            let mut a = vec![vec![Rational::zero(); size]; n + 1];
            for (k, &idx) in combo.iter().enumerate() {
                for i in 0..n {
                    a[i][k] = rat(others[idx][i]);
                }
                a[n][k] = Rational::one();
            }
            let mut b: Vec<Rational> = p.iter().map(|&v| rat(v)).collect();
            b.push(Rational::one());
            if let Some(l) = solve_unique(a, b) {
                if l.iter().all(|v| !v.is_negative()) {
                    return true;
                }
            }
            if !polyopt::polytope::hull::next_combination(&mut combo, m) {
                break;
            }
        }
    }
    false
}

pub fn brute_force_vertices(points: &[Vec<i64>]) -> BTreeSet<Vec<i64>> {
    let pts: Vec<Vec<i64>> = points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    pts.iter()
        .enumerate()
        .filter(|(i, p)| {
            let others: Vec<Vec<i64>> = pts.iter().enumerate().filter(|(j, _)| j != i).map(|(_, q)| q.clone()).collect();
            !in_convex_hull(p, &others)
        })
        .map(|(_, p)| p.clone())
        .collect()
}

/// Extreme eigenvalues of a symmetric 2×2 or 3×3 matrix in closed form.
pub fn extreme_eigenvalues(a: &Mat) -> (f64, f64) {
    if a.rows() == 2 {
        let (p, q, r) = (a[(0, 0)], a[(1, 1)], a[(0, 1)]);
        let mid = 0.5 * (p + q);
        let rad = (0.25 * (p - q) * (p - q) + r * r).sqrt();
        return (mid - rad, mid + rad);
    }
    let off = a[(0, 1)].powi(2) + a[(0, 2)].powi(2) + a[(1, 2)].powi(2);
    let q = a.trace() / 3.0;
    let p2 = (0..3).map(|i| (a[(i, i)] - q).powi(2)).sum::<f64>() + 2.0 * off;
    if p2 == 0.0 {
        return (q, q);
    }
    let p = (p2 / 6.0).sqrt();
    let b = Mat::from_fn(3, 3, |i, j| (a[(i, j)] - if i == j { q } else { 0.0 }) / p);
    let det = b[(0, 0)] * (b[(1, 1)] * b[(2, 2)] - b[(1, 2)] * b[(2, 1)]) - b[(0, 1)] * (b[(1, 0)] * b[(2, 2)] - b[(1, 2)] * b[(2, 0)])
        + b[(0, 2)] * (b[(1, 0)] * b[(2, 1)] - b[(1, 1)] * b[(2, 0)]);
    let phi = (det / 2.0).clamp(-1.0, 1.0).acos() / 3.0;
    let hi = q + 2.0 * p * phi.cos();
    let lo = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    (lo, hi)
}
