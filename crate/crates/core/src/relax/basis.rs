//! Monomial bases, moment vectors, and moment/localizing matrices.

use std::collections::HashMap;

use serde::Serialize;

use crate::linalg::dense::Mat;
use crate::polyring::{monomials_up_to, to_f64, Exponent, Polynomial};
use crate::sdp::{Block, SymSparse};
use crate::{Error, Result};

/// The monomials of degree at most `degree` in graded lex order:
/// `1, x1, .., xn, x1^2, x1 x2, ..`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentBasis {
    nvars: usize,
    degree: u32,
    monomials: Vec<Exponent>,
    #[serde(skip)]
    index: HashMap<Exponent, usize>,
}

impl MomentBasis {
    pub fn new(nvars: usize, degree: u32) -> Self {
        let monomials = monomials_up_to(nvars, degree);
        let index = monomials.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        MomentBasis {
            nvars,
            degree,
            monomials,
            index,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Exponent] {
        &self.monomials
    }

    pub fn position(&self, e: &Exponent) -> Option<usize> {
        self.index.get(e).copied()
    }

    fn require(&self, e: &Exponent) -> Result<usize> {
        self.position(e).ok_or_else(|| Error::MissingMoment(e.entries().to_vec()))
    }
}

/// Moment matrix layout over a basis of degree `N`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentMatrixSpec {
    pub basis: MomentBasis,
}

impl MomentMatrixSpec {
    pub fn new(nvars: usize, degree: u32) -> Self {
        MomentMatrixSpec {
            basis: MomentBasis::new(nvars, degree),
        }
    }

    pub fn size(&self) -> usize {
        self.basis.len()
    }

    /// The exponent `β(i) + β(j)` indexing entry `(i, j)`.
    pub fn entry_index(&self, i: usize, j: usize) -> Exponent {
        self.basis.monomials[i].add(&self.basis.monomials[j])
    }
}

/// A truncated moment vector `y_α`, `|α| <= degree`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Moments {
    pub basis: MomentBasis,
    pub values: Vec<f64>,
}

impl Moments {
    pub fn new(basis: MomentBasis, values: Vec<f64>) -> Result<Self> {
        if values.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: values.len(),
            });
        }
        Ok(Moments { basis, values })
    }

    /// Moments of the Dirac measure at `x`: `y_α = x^α`.
    pub fn point_evaluation(x: &[f64], degree: u32) -> Self {
        let basis = MomentBasis::new(x.len(), degree);
        let values = basis
            .monomials()
            .iter()
            .map(|e| e.entries().iter().zip(x).map(|(&a, v)| v.powi(a as i32)).product())
            .collect();
        Moments { basis, values }
    }

    pub fn get(&self, e: &Exponent) -> Result<f64> {
        Ok(self.values[self.basis.require(e)?])
    }

    /// `L(p) = Σ p_α y_α`.
    pub fn apply(&self, p: &Polynomial) -> Result<f64> {
        let mut s = 0.0;
        for (e, c) in p.terms() {
            s += to_f64(c) * self.get(e)?;
        }
        Ok(s)
    }
}

/// `M_N(y)` with entries `y_{β(i)+β(j)}`.
pub fn moment_matrix(spec: &MomentMatrixSpec, y: &Moments) -> Result<Mat> {
    let n = spec.size();
    let mut m = Mat::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = y.get(&spec.entry_index(i, j))?;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(m)
}

/// `M_N(g y)` with entries `Σ_α g_α y_{β(i)+β(j)+α}`.
pub fn localizing_matrix(g: &Polynomial, spec: &MomentMatrixSpec, y: &Moments) -> Result<Mat> {
    let n = spec.size();
    let terms: Vec<(&Exponent, f64)> = g.terms().map(|(e, c)| (e, to_f64(c))).collect();
    let mut m = Mat::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let base = spec.entry_index(i, j);
            let mut v = 0.0;
            for (e, c) in &terms {
                v += c * y.get(&base.add(e))?;
            }
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(m)
}

/// The block `M_d(g y) ⪰ 0` with the moments of `vars` as LMI variables.
pub(crate) fn localizing_block(g: &Polynomial, degree: u32, vars: &MomentBasis) -> Result<Block> {
    let spec = MomentMatrixSpec::new(vars.nvars(), degree);
    let n = spec.size();
    let mut block = Block::new(n, vars.len());
    let terms: Vec<(&Exponent, f64)> = g.terms().map(|(e, c)| (e, to_f64(c))).collect();
    for i in 0..n {
        for j in i..n {
            let base = spec.entry_index(i, j);
            for (e, c) in &terms {
                let k = vars.require(&base.add(e))?;
                push(&mut block.coeffs[k], i, j, *c);
            }
        }
    }
    Ok(block)
}

fn push(m: &mut SymSparse, i: usize, j: usize, v: f64) {
    m.entries.push((i, j, v));
}

/// Rows `L(x^β h) = 0` for `|β| <= 2N - deg h`, over the moment variables.
pub(crate) fn ideal_rows(h: &Polynomial, two_n: u32, vars: &MomentBasis) -> Result<Vec<Vec<f64>>> {
    let dh = h.degree().unwrap_or(0);
    if dh > two_n {
        return Ok(Vec::new());
    }
    let mut rows = Vec::new();
    for beta in monomials_up_to(vars.nvars(), two_n - dh) {
        let mut row = vec![0.0; vars.len()];
        for (e, c) in h.terms() {
            row[vars.require(&beta.add(e))?] += to_f64(c);
        }
        if row.iter().any(|&v| v != 0.0) {
            rows.push(row);
        }
    }
    Ok(rows)
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
    fn basis_layout() {
        let b = MomentBasis::new(2, 2);
        assert_eq!(b.len(), 6);
        let m: Vec<Vec<u32>> = b.monomials().iter().map(|e| e.entries().to_vec()).collect();
        assert_eq!(m, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(MomentBasis::new(3, 4).len(), 35);
    }

    #[test]
    fn moment_and_localizing_examples() {
        let y = Moments::new(MomentBasis::new(1, 3), vec![1.0, 0.5, 0.25, 0.125]).unwrap();
        let spec1 = MomentMatrixSpec::new(1, 1);
        assert_eq!(moment_matrix(&spec1, &y).unwrap().to_rows(), vec![vec![1.0, 0.5], vec![0.5, 0.25]]);
        let spec0 = MomentMatrixSpec::new(1, 0);
        let l = localizing_matrix(&p("1 - x^2", &["x"]), &spec0, &y).unwrap();
        assert_eq!(l.to_rows(), vec![vec![0.75]]);
        let l = localizing_matrix(&p("x", &["x"]), &spec1, &y).unwrap();
        assert_eq!(l.to_rows(), vec![vec![0.5, 0.25], vec![0.25, 0.125]]);
        let spec2 = MomentMatrixSpec::new(1, 2);
        assert_eq!(moment_matrix(&spec2, &y).unwrap_err(), Error::MissingMoment(vec![4]));
        let pt = Moments::point_evaluation(&[2.0], 2);
        assert_eq!(moment_matrix(&spec1, &pt).unwrap().to_rows(), vec![vec![1.0, 2.0], vec![2.0, 4.0]]);
    }

    #[test]
    fn two_variable_entry() {
        let spec = MomentMatrixSpec::new(2, 1);
        assert_eq!(spec.entry_index(1, 2).entries(), &[1, 1]);
    }
}
