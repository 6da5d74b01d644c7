//! Truncated membership tests for `Σ`, `M_G` and `T_G`.
//!
//! Membership is decided from two SDPs. The Gram problem looks for
//! `f = σ_0 + Σ_S σ_S g^S (+ Σ φ_h h)` with degree-matched SOS `σ_S`. If that
//! fails, a separating functional is sought: moments `y` with every moment and
//! localizing block PSD, `L(x^β h) = 0`, and `L(f) = −1`. Such a `y` is
//! nonnegative on the truncated cone and negative on `f`, which proves
//! non-membership once its residuals pass the check.

use serde::{Deserialize, Serialize};

use super::assemble::{check_dims, coefficient_vector, cone_generators, MomentLmi};
use super::basis::{ideal_rows, localizing_matrix, moment_matrix, MomentBasis, MomentMatrixSpec, Moments};
use super::{ConeMode, RelaxConfig};
use crate::linalg::dense::{symmetric_eigenvalues, Mat};
use crate::polyring::{monomials_up_to, to_f64, Constraint, Exponent, Polynomial, Sense};
use crate::sdp::{solve_lmi, Block, Certificate, LmiProblem, SdpStatus};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeMode {
    Sos,
    QuadraticModule,
    Preordering,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GramFactor {
    /// `1` for `σ_0`, otherwise the product of constraint names.
    pub multiplier: String,
    pub basis: Vec<Exponent>,
    pub gram: Vec<Vec<f64>>,
    pub min_eigenvalue: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparatingFunctional {
    pub moments: Moments,
    /// `L(f)`, normalized to −1 by the SDP.
    pub value: f64,
    /// Largest violation among the PSD blocks (relative), the normalization,
    /// and the ideal equalities.
    pub residual: f64,
    pub block_min_eigenvalues: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ProbeOutcome {
    Feasible {
        factors: Vec<GramFactor>,
        /// Largest coefficient mismatch of the reconstructed identity.
        residual: f64,
    },
    Infeasible {
        certificate: SeparatingFunctional,
    },
    Inconclusive {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub mode: ProbeMode,
    pub order: u32,
    pub outcome: ProbeOutcome,
    pub gram_status: SdpStatus,
    pub separation_status: Option<SdpStatus>,
}

struct Multiplier {
    name: String,
    poly: Polynomial,
    degree: u32,
}

fn multipliers(n: usize, constraints: &[Constraint], mode: ProbeMode, order: u32) -> Result<Vec<Multiplier>> {
    let mut out = vec![Multiplier {
        name: "1".into(),
        poly: Polynomial::one(n),
        degree: order,
    }];
    let ineqs: Vec<&Polynomial> = constraints.iter().filter(|c| c.sense == Sense::Geq).map(|c| &c.poly).collect();
    let gens = match mode {
        ProbeMode::Sos => Vec::new(),
        ProbeMode::QuadraticModule => cone_generators(&ineqs, ConeMode::QuadraticModule)?,
        ProbeMode::Preordering => cone_generators(&ineqs, ConeMode::Preordering)?,
    };
    for (name, g) in gens {
        let dg = g.degree().unwrap_or(0);
        if dg <= 2 * order {
            out.push(Multiplier {
                name,
                poly: g,
                degree: (2 * order - dg) / 2,
            });
        }
    }
    Ok(out)
}

/// Tests whether `f` lies in the degree-`2N` truncation of the cone selected by `mode`.
pub fn membership_probe(f: &Polynomial, constraints: &[Constraint], order: u32, mode: ProbeMode, cfg: &RelaxConfig) -> Result<ProbeReport> {
    let n = f.nvars();
    check_dims(n, constraints)?;
    let df = f.degree().unwrap_or(0);
    if df > 2 * order {
        return Err(Error::OrderTooSmall {
            order,
            floor: df.div_ceil(2),
        });
    }
    let mults = multipliers(n, constraints, mode, order)?;
    let eqs: Vec<&Polynomial> = match mode {
        ProbeMode::Sos => Vec::new(),
        _ => constraints.iter().filter(|c| c.sense == Sense::Eq).map(|c| &c.poly).collect(),
    };
    let target = MomentBasis::new(n, 2 * order);

    // Gram side.
    let (gram_lmi, layout) = gram_problem(f, &mults, &eqs, &target)?;
    let gram = solve_lmi(&gram_lmi, &cfg.sdp)?;
    if gram.status == SdpStatus::Optimal {
        let mut factors = Vec::new();
        for (m, (start, basis)) in mults.iter().zip(&layout) {
            let s = basis.len();
            let mut g = Mat::zeros(s, s);
            let mut k = *start;
            for i in 0..s {
                for j in i..s {
                    g[(i, j)] = gram.z[k];
                    g[(j, i)] = gram.z[k];
                    k += 1;
                }
            }
            let min_eigenvalue = if s == 0 { 0.0 } else { symmetric_eigenvalues(&g)[0] };
            factors.push(GramFactor {
                multiplier: m.name.clone(),
                basis: basis.clone(),
                gram: g.to_rows(),
                min_eigenvalue,
            });
        }
        let residual = gram_lmi.equality_residual(&gram.z);
        return Ok(ProbeReport {
            mode,
            order,
            outcome: ProbeOutcome::Feasible { factors, residual },
            gram_status: gram.status,
            separation_status: None,
        });
    }

    // The Farkas multipliers of the coefficient-matching rows are themselves
    // a separating functional once scaled to `L(f) = −1`.
    if let Some(Certificate::Infeasibility { multipliers, .. }) = &gram.certificate {
        let u = &multipliers[..target.len().min(multipliers.len())];
        let fvec = coefficient_vector(f, &target)?;
        let fu: f64 = fvec.iter().zip(u).map(|(a, b)| a * b).sum();
        if u.len() == target.len() && fu > 0.0 {
            let y = Moments::new(target.clone(), u.iter().map(|v| -v / fu).collect())?;
            let cert = check_functional(f, &mults, &eqs, order, y)?;
            if cert.value < 0.0 && cert.residual <= cfg.certificate_tolerance {
                return Ok(ProbeReport {
                    mode,
                    order,
                    outcome: ProbeOutcome::Infeasible { certificate: cert },
                    gram_status: gram.status,
                    separation_status: None,
                });
            }
        }
    }

    // Separation side.
    let mut b = MomentLmi::new(n, order, false)?;
    for m in mults.iter().skip(1) {
        b.localizing(&m.poly, &m.name)?;
    }
    for h in &eqs {
        b.ideal(h)?;
    }
    let fvec = coefficient_vector(f, &target)?;
    b.lmi.add_equality(fvec, -1.0);
    // Minimize the total trace to keep the functional bounded.
    let mut c = vec![0.0; target.len()];
    for blk in &b.lmi.blocks {
        for (k, a) in blk.coeffs.iter().enumerate() {
            c[k] -= a.entries.iter().filter(|e| e.0 == e.1).map(|e| e.2).sum::<f64>();
        }
    }
    b.lmi.objective = c;
    let sep = solve_lmi(&b.lmi, &cfg.sdp)?;
    let outcome = if sep.status == SdpStatus::Optimal {
        let y = Moments::new(target.clone(), sep.z.clone())?;
        let cert = check_functional(f, &mults, &eqs, order, y)?;
        if cert.value < 0.0 && cert.residual <= cfg.certificate_tolerance {
            ProbeOutcome::Infeasible { certificate: cert }
        } else {
            ProbeOutcome::Inconclusive {
                reason: format!("separating functional failed the residual check ({:.3e})", cert.residual),
            }
        }
    } else {
        ProbeOutcome::Inconclusive {
            reason: format!("Gram problem {:?}, separation problem {:?}", gram.status, sep.status),
        }
    };
    Ok(ProbeReport {
        mode,
        order,
        outcome,
        gram_status: gram.status,
        separation_status: Some(sep.status),
    })
}

/// Gram variables per multiplier (upper triangles, in order), then free ideal
/// multipliers; coefficient matching against `f`.
fn gram_problem(f: &Polynomial, mults: &[Multiplier], eqs: &[&Polynomial], target: &MomentBasis) -> Result<(LmiProblem, Vec<(usize, Vec<Exponent>)>)> {
    let n = f.nvars();
    let two_n = target.degree();
    let mut layout = Vec::new();
    let mut k = 0usize;
    for m in mults {
        let basis = monomials_up_to(n, m.degree);
        let s = basis.len();
        layout.push((k, basis));
        k += s * (s + 1) / 2;
    }
    let mut ideal_vars = Vec::new();
    for h in eqs {
        let dh = h.degree().unwrap_or(0);
        if dh <= two_n {
            for beta in monomials_up_to(n, two_n - dh) {
                ideal_vars.push((*h, beta, k));
                k += 1;
            }
        }
    }
    let mut lmi = LmiProblem::new(k);
    let mut rows = vec![vec![0.0; k]; target.len()];
    for (m, (start, basis)) in mults.iter().zip(&layout) {
        let s = basis.len();
        let mut block = Block::new(s, k);
        let mut var = *start;
        let terms: Vec<(&Exponent, f64)> = m.poly.terms().map(|(e, c)| (e, to_f64(c))).collect();
        for i in 0..s {
            for j in i..s {
                block.coeffs[var].entries.push((i, j, 1.0));
                let mult = if i == j { 1.0 } else { 2.0 };
                let base = basis[i].add(&basis[j]);
                for (e, c) in &terms {
                    let a = target.position(&base.add(e)).ok_or_else(|| Error::MissingMoment(base.add(e).entries().to_vec()))?;
                    rows[a][var] += mult * c;
                }
                var += 1;
            }
        }
        lmi.blocks.push(block);
    }
    for (h, beta, var) in &ideal_vars {
        for (e, c) in h.terms() {
            let a = target.position(&beta.add(e)).ok_or_else(|| Error::MissingMoment(beta.add(e).entries().to_vec()))?;
            rows[a][*var] += to_f64(c);
        }
    }
    for (a, row) in rows.into_iter().enumerate() {
        let rhs = to_f64(&f.coefficient(&target.monomials()[a]));
        lmi.add_equality(row, rhs);
    }
    Ok((lmi, layout))
}

/// Recomputes the blocks of a separating functional from scratch.
fn check_functional(f: &Polynomial, mults: &[Multiplier], eqs: &[&Polynomial], order: u32, y: Moments) -> Result<SeparatingFunctional> {
    let n = f.nvars();
    let value = y.apply(f)?;
    let mut residual = (value + 1.0).abs();
    let mut block_min_eigenvalues = Vec::new();
    for (idx, m) in mults.iter().enumerate() {
        let spec = MomentMatrixSpec::new(n, m.degree);
        let mat = if idx == 0 {
            moment_matrix(&spec, &y)?
        } else {
            localizing_matrix(&m.poly, &spec, &y)?
        };
        let eigs = symmetric_eigenvalues(&mat);
        let lo = eigs[0];
        let hi = eigs[eigs.len() - 1].abs().max(1.0);
        residual = residual.max((-lo).max(0.0) / hi);
        block_min_eigenvalues.push(lo);
    }
    for h in eqs {
        for row in ideal_rows(h, 2 * order, &y.basis)? {
            let v: f64 = row.iter().zip(&y.values).map(|(a, b)| a * b).sum();
            residual = residual.max(v.abs());
        }
    }
    Ok(SeparatingFunctional {
        moments: y,
        value,
        residual,
        block_min_eigenvalues,
    })
}
