use std::collections::BTreeSet;

use num_traits::Zero;

use crate::polyring::{rat, Exponent, Polynomial, Rational};
use crate::polytope::{check_index_set, face_support, FaceVariant};
use crate::{Error, Result};

fn check_len(f: &Polynomial, w: &[Rational]) -> Result<()> {
    if w.len() != f.nvars() {
        return Err(Error::DimensionMismatch {
            expected: f.nvars(),
            found: w.len(),
        });
    }
    Ok(())
}

/// `f_W`: the terms of `f` whose exponents lie in `∩_{w ∈ W} Δ(w, f)`.
pub fn principal_part_global(f: &Polynomial, ws: &[Vec<Rational>]) -> Result<Polynomial> {
    for w in ws {
        check_len(f, w)?;
    }
    if f.is_zero() || ws.is_empty() {
        return Ok(f.clone());
    }
    let mut common: Option<BTreeSet<Exponent>> = None;
    for w in ws {
        let face: BTreeSet<Exponent> = face_support(f, w, FaceVariant::Support)?.face_exponents.into_iter().collect();
        common = Some(match common {
            None => face,
            Some(c) => c.intersection(&face).cloned().collect(),
        });
    }
    let common = common.unwrap_or_default();
    Ok(f.filter_terms(|e| common.contains(e)))
}

/// `f_V`: the terms of `f` minimizing `<v, ·>` over `supp(f)` for every `v ∈ V`.
pub fn principal_part_local(f: &Polynomial, vs: &[Vec<Rational>]) -> Result<Polynomial> {
    for v in vs {
        check_len(f, v)?;
        if v.iter().any(|x| *x < Rational::zero()) {
            return Err(Error::NegativeSupport);
        }
    }
    if f.is_zero() {
        return Ok(f.clone());
    }
    let mins: Vec<Rational> = vs
        .iter()
        .map(|v| f.support().iter().map(|e| e.pairing(v)).min().unwrap_or_else(Rational::zero))
        .collect();
    Ok(f.filter_terms(|e| vs.iter().zip(&mins).all(|(v, m)| e.pairing(v) == *m)))
}

/// `f_I`: the terms with `α_i = 0` for all `i ∈ I` (zero-based), as a
/// polynomial in the remaining variables.
pub fn coordinate_restriction(f: &Polynomial, removed: &[usize]) -> Result<Polynomial> {
    check_index_set(f.nvars(), removed)?;
    let mut removed = removed.to_vec();
    removed.sort_unstable();
    removed.dedup();
    let n = f.nvars() - removed.len();
    let mut out = Polynomial::zero(n);
    for (e, c) in f.terms() {
        if removed.iter().all(|&i| e.entries()[i] == 0) {
            out.add_term(e.project_out(&removed), c.clone());
        }
    }
    Ok(out)
}

/// `x_i ∂f/∂x_i`.
pub fn euler_component(f: &Polynomial, i: usize) -> Polynomial {
    let mut out = Polynomial::zero(f.nvars());
    for (e, c) in f.terms() {
        let a = e.entries()[i];
        if a > 0 {
            out.add_term(e.clone(), c * rat(i64::from(a)));
        }
    }
    out
}
