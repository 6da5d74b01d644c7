use serde::Serialize;

use super::global::GlobalNewtonPolytope;
use super::local::LocalNewtonPolytope;
use crate::polyring::{rat, Exponent, Polynomial};
use crate::{Error, Result};

/// Data attached to a convenient Newton polyhedron at infinity: the vertex
/// polynomial `ρ`, its homogenization-like transform `G_M(ρ)`, the local
/// polyhedron `G(Γ̃)` and the vectors `w(v)` for its facet normals.
#[derive(Clone, Debug, Serialize)]
pub struct GTransform {
    pub rho: Polynomial,
    pub m: u32,
    pub g_rho: Polynomial,
    pub g_polyhedron: LocalNewtonPolytope,
    /// `(v, w(v))` for every `v ∈ F(G(Γ̃))`.
    pub w_vectors: Vec<(Vec<i64>, Vec<i64>)>,
}

/// `G_M(h) = Σ h_α X^α (x_1^2 + .. + x_n^2)^{M - |α|}`.
pub fn g_m(h: &Polynomial, m: u32) -> Result<Polynomial> {
    let n = h.nvars();
    if let Some(d) = h.degree() {
        if d > m {
            return Err(Error::DegreeExceedsBound { degree: d, bound: m });
        }
    }
    let mut norm2 = Polynomial::zero(n);
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 2;
        norm2.add_term(Exponent::new(e), rat(1));
    }
    let mut powers = vec![Polynomial::one(n)];
    for k in 1..=m as usize {
        powers.push(&powers[k - 1] * &norm2);
    }
    let mut out = Polynomial::zero(n);
    for (e, c) in h.terms() {
        let mono = Polynomial::monomial(n, e.clone(), c.clone());
        out = out + &mono * &powers[(m - e.degree()) as usize];
    }
    Ok(out)
}

/// `w(v) = 2 c min_i v_i - v` with `c = (1, .., 1)`.
pub fn w_of(v: &[i64]) -> Vec<i64> {
    let mn = v.iter().copied().min().unwrap_or(0);
    v.iter().map(|&vi| 2 * mn - vi).collect()
}

pub fn g_transform_data(gamma: &GlobalNewtonPolytope) -> Result<GTransform> {
    if !gamma.is_convenient() {
        return Err(Error::NotConvenient);
    }
    let n = gamma.nvars();
    let mut rho = Polynomial::zero(n);
    for v in gamma.vertices() {
        rho.add_term(v, rat(1));
    }
    let m = gamma.max_degree();
    let g_rho = g_m(&rho, m)?;
    let g_polyhedron = LocalNewtonPolytope::from_polynomial(&g_rho)?;
    let w_vectors = g_polyhedron
        .facet_normals()
        .into_iter()
        .map(|v| {
            let w = w_of(&v);
            (v, w)
        })
        .collect();
    Ok(GTransform {
        rho,
        m,
        g_rho,
        g_polyhedron,
        w_vectors,
    })
}
