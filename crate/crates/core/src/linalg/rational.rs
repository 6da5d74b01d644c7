//! Exact Gaussian elimination over the rationals.

use num_traits::{One, Zero};

use crate::polyring::Rational;

/// Reduces `rows` in place to reduced row echelon form over the first `ncols`
/// columns and returns the pivot columns. Columns beyond `ncols` are carried
/// along as augmented data.
pub fn rref(rows: &mut Vec<Vec<Rational>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::one() / &rows[r][c];
        for v in rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(mat: &[Vec<Rational>], ncols: usize) -> usize {
    let mut m = mat.to_vec();
    rref(&mut m, ncols).len()
}

/// Basis of `{x : A x = 0}`; one vector per free column, with a 1 in that column.
pub fn nullspace(mat: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut m = mat.to_vec();
    let pivots = rref(&mut m, ncols);
    free_basis(&m, &pivots, ncols)
}

fn free_basis(reduced: &[Vec<Rational>], pivots: &[usize], ncols: usize) -> Vec<Vec<Rational>> {
    let mut basis = Vec::new();
    for f in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rational::zero(); ncols];
        v[f] = Rational::one();
        for (row, &pc) in reduced.iter().zip(pivots) {
            v[pc] = -row[f].clone();
        }
        basis.push(v);
    }
    basis
}

/// Outcome of solving `A x = b` exactly.
#[derive(Clone, Debug)]
pub enum LinearSolution {
    /// `x = particular + sum_k t_k * nullspace[k]`.
    Solved {
        particular: Vec<Rational>,
        nullspace: Vec<Vec<Rational>>,
    },
    /// `u` with `A^T u = 0` and `b . u = 1`.
    Inconsistent { certificate: Vec<Rational> },
}

/// Solves `A x = b` with exact arithmetic, returning the affine solution set or
/// a Farkas-style inconsistency witness.
pub fn solve_affine(a: &[Vec<Rational>], b: &[Rational], ncols: usize) -> LinearSolution {
    let nrows = a.len();
    // [A | b | I] tracks the row combinations so a zero row yields a certificate.
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(i, (row, bi))| {
            let mut r = Vec::with_capacity(ncols + 1 + nrows);
            r.extend(row.iter().cloned());
            r.push(bi.clone());
            r.extend((0..nrows).map(|k| if k == i { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut m, ncols);
    for row in m.iter().skip(pivots.len()) {
        let rhs = &row[ncols];
        if !rhs.is_zero() {
            let certificate = row[ncols + 1..].iter().map(|u| u / rhs).collect();
            return LinearSolution::Inconsistent { certificate };
        }
    }
    let mut particular = vec![Rational::zero(); ncols];
    for (row, &pc) in m.iter().zip(&pivots) {
        particular[pc] = row[ncols].clone();
    }
    let reduced: Vec<Vec<Rational>> = m
        .iter()
        .take(pivots.len())
        .map(|r| r[..ncols].to_vec())
        .collect();
    let nullspace = free_basis(&reduced, &pivots, ncols);
    LinearSolution::Solved {
        particular,
        nullspace,
    }
}

/// Scales a rational vector to the primitive integer vector with the same direction.
pub fn primitive_integer(v: &[Rational]) -> Vec<num_bigint::BigInt> {
    use num_integer::Integer;
    let lcm = v
        .iter()
        .fold(num_bigint::BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<num_bigint::BigInt> = v.iter().map(|x| (x * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints
        .iter()
        .fold(num_bigint::BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::rat;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&v| rat(v)).collect()).collect()
    }

    #[test]
    fn nullspace_of_rank_deficient_matrix() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for row in &a {
                let dot: Rational = row.iter().zip(v).map(|(x, y)| x * y).sum();
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn affine_solve_and_certificate() {
        let a = m(&[&[1, 1], &[1, -1]]);
        match solve_affine(&a, &[rat(2), rat(0)], 2) {
            LinearSolution::Solved { particular, nullspace } => {
                assert_eq!(particular, vec![rat(1), rat(1)]);
                assert!(nullspace.is_empty());
            }
            _ => panic!("expected a solution"),
        }
        let a = m(&[&[1, 1], &[2, 2]]);
        match solve_affine(&a, &[rat(1), rat(3)], 2) {
            LinearSolution::Inconsistent { certificate } => {
                for j in 0..2 {
                    let s: Rational = a.iter().zip(&certificate).map(|(r, u)| &r[j] * u).sum();
                    assert!(s.is_zero());
                }
                let bu = rat(1) * &certificate[0] + rat(3) * &certificate[1];
                assert_eq!(bu, rat(1));
            }
            _ => panic!("expected inconsistency"),
        }
    }

    #[test]
    fn primitive_vectors() {
        let v = vec![crate::polyring::ratio(3, 2), rat(1)];
        let p = primitive_integer(&v);
        assert_eq!(p, vec![3.into(), 2.into()]);
        let p = primitive_integer(&[rat(-4), rat(6), rat(0)]);
        assert_eq!(p, vec![(-2).into(), 3.into(), 0.into()]);
    }
}
