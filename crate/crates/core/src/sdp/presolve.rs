//! Exact rational presolve: equality elimination, removal of rows forced to
//! zero by a zero diagonal, and detection of objective directions that no
//! block constrains.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use super::problem::LmiProblem;
use crate::linalg::dense::Mat;
use crate::linalg::rational::{nullspace, rref, solve_affine, LinearSolution};
use crate::polyring::{from_f64, to_f64, Rational};

/// Affine function of the current variables: `[constant, coeff_1, .., coeff_r]`.
type Row = Vec<Rational>;

struct RatBlock {
    /// Original row/column indices still present.
    kept: Vec<usize>,
    /// Upper-triangular entries keyed by positions into `kept`.
    entries: BTreeMap<(usize, usize), Row>,
}

/// Problem in reduced variables `s`, with `z = offset + map · s`.
pub(crate) struct Reduced {
    pub offset: Vec<f64>,
    pub map: Vec<Vec<f64>>,
    pub objective: Vec<f64>,
    pub objective_constant: f64,
    /// Per original block: surviving indices, constant, and coefficient matrices.
    pub blocks: Vec<ReducedBlock>,
    /// Equalities implied by zero diagonals, in original variables `(row, rhs)`.
    pub implied_equalities: Vec<(Vec<f64>, f64)>,
    pub removed_rows: usize,
}

pub(crate) struct ReducedBlock {
    pub original: usize,
    pub kept: Vec<usize>,
    pub constant: Mat,
    pub coeffs: Vec<Mat>,
}

impl Reduced {
    pub fn lift(&self, s: &[f64]) -> Vec<f64> {
        self.offset
            .iter()
            .zip(&self.map)
            .map(|(o, row)| o + row.iter().zip(s).map(|(a, b)| a * b).sum::<f64>())
            .collect()
    }
}

pub(crate) enum Presolve {
    Reduced(Reduced),
    /// The linear equalities (possibly with implied ones) have no solution.
    Infeasible {
        reason: String,
        /// `u` with `B^T u = 0`, `b·u = 1` for the original equalities, when
        /// those alone are inconsistent.
        farkas: Option<Vec<f64>>,
    },
    /// Some block forces a constant negative diagonal entry.
    NegativeDiagonal { block: usize, index: usize, value: f64 },
    /// A direction in original variables that no block sees and that
    /// increases the objective.
    Unbounded { ray: Vec<f64> },
}

struct State {
    nvars: usize,
    offset: Vec<Rational>,
    map: Vec<Row>,
    objective: Row,
    blocks: Vec<RatBlock>,
    pending: Vec<Row>,
}

/// Composes an affine row in `s` with `s = p + N t`.
fn substitute(row: &Row, p: &[Rational], n: &[Vec<Rational>]) -> Row {
    let mut out = vec![Rational::zero(); n.len() + 1];
    out[0] = row[0].clone();
    for (k, c) in row[1..].iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        out[0] += c * &p[k];
        for (t, v) in n.iter().enumerate() {
            if !v[k].is_zero() {
                out[t + 1] += c * &v[k];
            }
        }
    }
    out
}

impl State {
    fn substitute_all(&mut self, p: &[Rational], n: &[Vec<Rational>]) {
        let r = self.nvars;
        // offset/map in z-coordinates: z = off + M s, s = p + N t.
        for (o, row) in self.offset.iter_mut().zip(self.map.iter_mut()) {
            let mut full = Vec::with_capacity(r + 1);
            full.push(o.clone());
            full.extend(row.iter().cloned());
            let sub = substitute(&full, p, n);
            *o = sub[0].clone();
            *row = sub[1..].to_vec();
        }
        self.objective = substitute(&self.objective, p, n);
        for b in &mut self.blocks {
            for row in b.entries.values_mut() {
                *row = substitute(row, p, n);
            }
            b.entries.retain(|_, row| row.iter().any(|v| !v.is_zero()));
        }
        self.nvars = n.len();
    }

    /// Eliminates pending equalities `row[0] + Σ row[k] s_k = 0`.
    fn eliminate(&mut self) -> Result<(), Vec<Rational>> {
        if self.pending.is_empty() {
            return Ok(());
        }
        let r = self.nvars;
        let a: Vec<Vec<Rational>> = self.pending.iter().map(|row| row[1..].to_vec()).collect();
        let b: Vec<Rational> = self.pending.iter().map(|row| -row[0].clone()).collect();
        match solve_affine(&a, &b, r) {
            LinearSolution::Inconsistent { certificate } => Err(certificate),
            LinearSolution::Solved {
                particular,
                nullspace,
            } => {
                self.pending.clear();
                self.substitute_all(&particular, &nullspace);
                Ok(())
            }
        }
    }

    /// Rows whose diagonal entry vanishes identically must vanish entirely.
    fn facial_reduction(&mut self) -> Result<bool, (usize, usize, Rational)> {
        let mut changed = false;
        for (bi, b) in self.blocks.iter_mut().enumerate() {
            loop {
                let m = b.kept.len();
                let mut target = None;
                for i in 0..m {
                    match b.entries.get(&(i, i)) {
                        None => {
                            target = Some(i);
                            break;
                        }
                        Some(row) if row[1..].iter().all(Zero::is_zero) && row[0].is_negative() => {
                            return Err((bi, b.kept[i], row[0].clone()));
                        }
                        _ => {}
                    }
                }
                let Some(i) = target else { break };
                for ((a, c), row) in &b.entries {
                    if *a == i || *c == i {
                        self.pending.push(row.clone());
                    }
                }
                let old = std::mem::take(&mut b.entries);
                for ((a, c), row) in old {
                    if a == i || c == i {
                        continue;
                    }
                    let shift = |x: usize| if x > i { x - 1 } else { x };
                    b.entries.insert((shift(a), shift(c)), row);
                }
                b.kept.remove(i);
                changed = true;
            }
        }
        Ok(changed)
    }
}

fn rational_row(v: &[f64]) -> Vec<Rational> {
    v.iter().map(|&x| from_f64(x)).collect()
}

fn to_f64_vec(v: &[Rational]) -> Vec<f64> {
    v.iter().map(to_f64).collect()
}

pub(crate) fn presolve(p: &LmiProblem) -> Presolve {
    let k = p.num_vars;
    let identity: Vec<Row> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { Rational::from_integer(1.into()) } else { Rational::zero() }).collect())
        .collect();
    let mut objective = vec![Rational::zero()];
    objective.extend(rational_row(&p.objective));
    let blocks = p
        .blocks
        .iter()
        .map(|b| {
            let mut entries: BTreeMap<(usize, usize), Row> = BTreeMap::new();
            let mut touch = |i: usize, j: usize, slot: usize, v: f64| {
                let row = entries.entry((i, j)).or_insert_with(|| vec![Rational::zero(); k + 1]);
                row[slot] += from_f64(v);
            };
            for &(i, j, v) in &b.constant.entries {
                touch(i, j, 0, v);
            }
            for (var, a) in b.coeffs.iter().enumerate() {
                for &(i, j, v) in &a.entries {
                    touch(i, j, var + 1, v);
                }
            }
            entries.retain(|_, row| row.iter().any(|v| !v.is_zero()));
            RatBlock {
                kept: (0..b.size).collect(),
                entries,
            }
        })
        .collect();
    let pending: Vec<Row> = p
        .eq_matrix
        .iter()
        .zip(&p.eq_rhs)
        .map(|(row, &rhs)| {
            let mut r = vec![-from_f64(rhs)];
            r.extend(rational_row(row));
            r
        })
        .collect();
    let mut st = State {
        nvars: k,
        offset: vec![Rational::zero(); k],
        map: identity,
        objective,
        blocks,
        pending,
    };
    let mut first = true;
    loop {
        if let Err(cert) = st.eliminate() {
            return Presolve::Infeasible {
                reason: if first {
                    "linear equalities are inconsistent".into()
                } else {
                    "equalities implied by zero diagonal entries are inconsistent".into()
                },
                farkas: first.then(|| to_f64_vec(&cert)),
            };
        }
        first = false;
        match st.facial_reduction() {
            Err((block, index, value)) => {
                return Presolve::NegativeDiagonal {
                    block,
                    index,
                    value: to_f64(&value),
                }
            }
            Ok(true) => continue,
            Ok(false) => break,
        }
    }

    // Directions invisible to every block.
    let r = st.nvars;
    let g: Vec<Vec<Rational>> = st
        .blocks
        .iter()
        .flat_map(|b| b.entries.values().map(|row| row[1..].to_vec()))
        .collect();
    for dir in nullspace(&g, r) {
        let gain: Rational = dir.iter().zip(&st.objective[1..]).map(|(a, b)| a * b).sum();
        if !gain.is_zero() {
            let sign = if gain.is_positive() { 1.0 } else { -1.0 };
            let ray = st
                .map
                .iter()
                .map(|row| sign * to_f64(&row.iter().zip(&dir).map(|(a, b)| a * b).sum::<Rational>()))
                .collect();
            return Presolve::Unbounded { ray };
        }
    }
    // Keep a basis of the visible directions; the rest can be set to zero.
    let mut gm = g.clone();
    let pivots = if g.is_empty() { Vec::new() } else { rref(&mut gm, r) };
    if pivots.len() < r {
        let units: Vec<Vec<Rational>> = pivots
            .iter()
            .map(|&c| (0..r).map(|j| if j == c { Rational::from_integer(1.into()) } else { Rational::zero() }).collect())
            .collect();
        st.substitute_all(&vec![Rational::zero(); r], &units);
    }

    let r = st.nvars;
    let blocks = st
        .blocks
        .iter()
        .enumerate()
        .filter(|(_, b)| !b.kept.is_empty())
        .map(|(bi, b)| {
            let m = b.kept.len();
            let mut constant = Mat::zeros(m, m);
            let mut coeffs = vec![Mat::zeros(m, m); r];
            for (&(i, j), row) in &b.entries {
                let put = |mat: &mut Mat, v: f64| {
                    mat[(i, j)] = v;
                    mat[(j, i)] = v;
                };
                put(&mut constant, to_f64(&row[0]));
                for (t, c) in row[1..].iter().enumerate() {
                    if !c.is_zero() {
                        put(&mut coeffs[t], to_f64(c));
                    }
                }
            }
            ReducedBlock {
                original: bi,
                kept: b.kept.clone(),
                constant,
                coeffs,
            }
        })
        .collect();
    let removed_rows = st.blocks.iter().zip(&p.blocks).map(|(b, o)| o.size - b.kept.len()).sum();
    let implied_equalities = implied_in_original(&st, p);
    Presolve::Reduced(Reduced {
        offset: to_f64_vec(&st.offset),
        map: st.map.iter().map(|row| to_f64_vec(row)).collect(),
        objective: to_f64_vec(&st.objective[1..]),
        objective_constant: to_f64(&st.objective[0]),
        blocks,
        implied_equalities,
        removed_rows,
    })
}

/// Re-derives the implied equalities in original variables, straight from the
/// block data: an entry `(i, j)` with `i` a removed row gives `S_ij(z) = 0`.
fn implied_in_original(st: &State, p: &LmiProblem) -> Vec<(Vec<f64>, f64)> {
    let mut out = Vec::new();
    for (b, orig) in st.blocks.iter().zip(&p.blocks) {
        let removed: Vec<usize> = (0..orig.size).filter(|i| !b.kept.contains(i)).collect();
        if removed.is_empty() {
            continue;
        }
        let mut rows: BTreeMap<(usize, usize), (Vec<f64>, f64)> = BTreeMap::new();
        for &(i, j, v) in &orig.constant.entries {
            if removed.contains(&i) || removed.contains(&j) {
                rows.entry((i, j)).or_insert_with(|| (vec![0.0; p.num_vars], 0.0)).1 -= v;
            }
        }
        for (var, a) in orig.coeffs.iter().enumerate() {
            for &(i, j, v) in &a.entries {
                if removed.contains(&i) || removed.contains(&j) {
                    rows.entry((i, j)).or_insert_with(|| (vec![0.0; p.num_vars], 0.0)).0[var] += v;
                }
            }
        }
        out.extend(rows.into_values());
    }
    out
}
