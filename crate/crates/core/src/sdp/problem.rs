use serde::Serialize;

use crate::linalg::dense::Mat;
use crate::{Error, Result};

/// Largest total block dimension the dense solver accepts.
pub const MAX_TOTAL_DIM: usize = 400;

/// Symmetric matrix stored as its upper-triangular nonzeros `(i, j, v)`, `i <= j`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SymSparse {
    pub entries: Vec<(usize, usize, f64)>,
}

impl SymSparse {
    pub fn new() -> Self {
        SymSparse::default()
    }

    /// Adds `v` at `(i, j)` and, implicitly, at `(j, i)`.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        if v == 0.0 {
            return;
        }
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        if let Some(e) = self.entries.iter_mut().find(|e| e.0 == a && e.1 == b) {
            e.2 += v;
        } else {
            self.entries.push((a, b, v));
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.iter().all(|e| e.2 == 0.0)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.entries.iter().filter(|e| e.0 == a && e.1 == b).map(|e| e.2).sum()
    }

    pub fn to_dense(&self, n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for &(i, j, v) in &self.entries {
            m[(i, j)] += v;
            if i != j {
                m[(j, i)] += v;
            }
        }
        m
    }

    /// Upper-triangular nonzeros of a dense symmetric matrix.
    pub fn from_dense(m: &Mat) -> Self {
        let mut s = SymSparse::new();
        for i in 0..m.rows() {
            for j in i..m.cols() {
                if m[(i, j)] != 0.0 {
                    s.entries.push((i, j, m[(i, j)]));
                }
            }
        }
        s
    }

    fn normalize(&mut self) {
        self.entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut out: Vec<(usize, usize, f64)> = Vec::with_capacity(self.entries.len());
        for e in self.entries.drain(..) {
            match out.last_mut() {
                Some(l) if l.0 == e.0 && l.1 == e.1 => l.2 += e.2,
                _ => out.push(e),
            }
        }
        out.retain(|e| e.2 != 0.0);
        self.entries = out;
    }
}

/// One linear matrix inequality `A0 + Σ z_j A_j ⪰ 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Block {
    pub size: usize,
    /// Only diagonal entries may be present (a product of scalar cones).
    pub diagonal: bool,
    pub constant: SymSparse,
    /// One matrix per problem variable.
    pub coeffs: Vec<SymSparse>,
}

impl Block {
    pub fn new(size: usize, num_vars: usize) -> Self {
        Block {
            size,
            diagonal: false,
            constant: SymSparse::new(),
            coeffs: vec![SymSparse::new(); num_vars],
        }
    }

    pub fn diagonal(size: usize, num_vars: usize) -> Self {
        Block {
            diagonal: true,
            ..Block::new(size, num_vars)
        }
    }

    /// Block from dense symmetric matrices; rejects asymmetric input.
    pub fn from_dense(constant: &Mat, coeffs: &[Mat]) -> Result<Self> {
        let n = constant.rows();
        for m in std::iter::once(constant).chain(coeffs) {
            if m.rows() != n || m.cols() != n {
                return Err(Error::MalformedSdp("block matrices must share one square size".into()));
            }
            if !m.is_symmetric(0.0) {
                return Err(Error::MalformedSdp("block matrix is not symmetric".into()));
            }
        }
        Ok(Block {
            size: n,
            diagonal: false,
            constant: SymSparse::from_dense(constant),
            coeffs: coeffs.iter().map(SymSparse::from_dense).collect(),
        })
    }

    /// `A0 + Σ z_j A_j` as a dense matrix.
    pub fn evaluate(&self, z: &[f64]) -> Mat {
        let mut m = self.constant.to_dense(self.size);
        for (a, &zj) in self.coeffs.iter().zip(z) {
            if zj == 0.0 {
                continue;
            }
            for &(i, j, v) in &a.entries {
                m[(i, j)] += zj * v;
                if i != j {
                    m[(j, i)] += zj * v;
                }
            }
        }
        m
    }
}

/// `maximize c·z  s.t.  A0_b + Σ z_j A_{b,j} ⪰ 0` for every block `b`, and `B z = b`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LmiProblem {
    pub num_vars: usize,
    pub blocks: Vec<Block>,
    pub objective: Vec<f64>,
    pub eq_matrix: Vec<Vec<f64>>,
    pub eq_rhs: Vec<f64>,
}

impl LmiProblem {
    pub fn new(num_vars: usize) -> Self {
        LmiProblem {
            num_vars,
            blocks: Vec::new(),
            objective: vec![0.0; num_vars],
            eq_matrix: Vec::new(),
            eq_rhs: Vec::new(),
        }
    }

    pub fn add_equality(&mut self, row: Vec<f64>, rhs: f64) {
        self.eq_matrix.push(row);
        self.eq_rhs.push(rhs);
    }

    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }

    /// Checks shapes, finiteness, index ranges and the size guard, and merges
    /// duplicate entries.
    pub fn validate(&mut self) -> Result<()> {
        let k = self.num_vars;
        if self.objective.len() != k {
            return Err(Error::MalformedSdp(format!("objective has {} entries, expected {k}", self.objective.len())));
        }
        if self.eq_matrix.len() != self.eq_rhs.len() {
            return Err(Error::MalformedSdp("equality rows and right-hand sides differ in count".into()));
        }
        if self.eq_matrix.iter().any(|r| r.len() != k) {
            return Err(Error::MalformedSdp("equality row has the wrong length".into()));
        }
        let finite = |v: &f64| v.is_finite();
        if !self.objective.iter().all(finite)
            || !self.eq_rhs.iter().all(finite)
            || !self.eq_matrix.iter().flatten().all(finite)
        {
            return Err(Error::MalformedSdp("non-finite data".into()));
        }
        let total = self.total_dim();
        if total > MAX_TOTAL_DIM {
            return Err(Error::SdpTooLarge {
                size: total,
                max: MAX_TOTAL_DIM,
            });
        }
        for b in &mut self.blocks {
            if b.coeffs.len() != k {
                return Err(Error::MalformedSdp("block has the wrong number of coefficient matrices".into()));
            }
            for m in std::iter::once(&mut b.constant).chain(b.coeffs.iter_mut()) {
                m.normalize();
                for &(i, j, v) in &m.entries {
                    if i > j || j >= b.size {
                        return Err(Error::MalformedSdp(format!("entry ({i}, {j}) outside block of size {}", b.size)));
                    }
                    if b.diagonal && i != j {
                        return Err(Error::MalformedSdp("off-diagonal entry in a diagonal block".into()));
                    }
                    if !v.is_finite() {
                        return Err(Error::MalformedSdp("non-finite data".into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Smallest eigenvalue over all blocks at `z`.
    pub fn min_eigenvalue(&self, z: &[f64]) -> f64 {
        self.blocks
            .iter()
            .filter(|b| b.size > 0)
            .map(|b| crate::linalg::dense::symmetric_eigenvalues(&b.evaluate(z))[0])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn objective_value(&self, z: &[f64]) -> f64 {
        self.objective.iter().zip(z).map(|(c, v)| c * v).sum()
    }

    pub fn equality_residual(&self, z: &[f64]) -> f64 {
        self.eq_matrix
            .iter()
            .zip(&self.eq_rhs)
            .map(|(row, b)| (row.iter().zip(z).map(|(a, v)| a * v).sum::<f64>() - b).abs())
            .fold(0.0, f64::max)
    }
}
