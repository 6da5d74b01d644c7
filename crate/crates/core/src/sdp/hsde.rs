//! Primal-dual interior point method on the homogeneous self-dual embedding,
//! with Nesterov-Todd scaling and Mehrotra predictor-corrector steps.
//!
//! Solves `maximize c·x  s.t.  S = A0 + Σ x_j A_j ⪰ 0` with dual
//! `minimize <A0, Z>  s.t.  <A_j, Z> = -c_j,  Z ⪰ 0`.

use crate::linalg::dense::{cholesky, cholesky_solve, lu_solve, svd_jacobi, symmetric_eigenvalues, Mat};

use super::presolve::ReducedBlock;
use super::SdpConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum HsdeStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    MaxIterations,
    NumericalFailure,
}

pub(crate) struct HsdeResult {
    pub status: HsdeStatus,
    /// Primal point; for `DualInfeasible` a ray with `c·x = 1`.
    pub x: Vec<f64>,
    /// Dual blocks; for `PrimalInfeasible` a certificate with `<A0, Z> = -1`.
    pub z: Vec<Mat>,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// Returned from the best iterate meeting `acceptable_gap` after the
    /// iteration broke down short of `gap_tolerance`.
    pub reduced_accuracy: bool,
}

struct Scaling {
    /// `R^{-1}` with `R^{-1} S R^{-T} = Λ = R^T Z R`.
    r_inv: Mat,
    r: Mat,
    lambda: Vec<f64>,
}

fn nt_scaling(s: &Mat, z: &Mat) -> Option<Scaling> {
    let ls = cholesky(s)?;
    let lz = cholesky(z)?;
    let (u, sig, v) = svd_jacobi(&lz.transpose().matmul(&ls));
    if sig.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return None;
    }
    let n = s.rows();
    let inv_sqrt: Vec<f64> = sig.iter().map(|x| 1.0 / x.sqrt()).collect();
    let r = ls.matmul(&v).matmul(&Mat::diag(&inv_sqrt));
    let r_inv = Mat::diag(&inv_sqrt).matmul(&u.transpose()).matmul(&lz.transpose());
    debug_assert_eq!(r.rows(), n);
    Some(Scaling {
        r_inv,
        r,
        lambda: sig,
    })
}

fn congruence(r: &Mat, a: &Mat) -> Mat {
    let mut m = r.matmul(a).matmul(&r.transpose());
    m.symmetrize();
    m
}

/// Largest `α` with `diag(λ) + α D ⪰ 0`, capped at `cap`.
fn max_step(lambda: &[f64], d: &Mat, cap: f64) -> f64 {
    let n = lambda.len();
    let isq: Vec<f64> = lambda.iter().map(|l| 1.0 / l.sqrt()).collect();
    let m = Mat::from_fn(n, n, |i, j| isq[i] * d[(i, j)] * isq[j]);
    let emin = symmetric_eigenvalues(&m)[0];
    if emin >= 0.0 {
        cap
    } else {
        cap.min(-1.0 / emin)
    }
}

fn solve_normal(h: &Mat, rhs: &[f64]) -> Option<Vec<f64>> {
    if rhs.is_empty() {
        return Some(Vec::new());
    }
    let l = cholesky(h).or_else(|| {
        let mut hr = h.clone();
        let delta = 1e-12 * (1.0 + h.trace());
        for i in 0..hr.rows() {
            hr[(i, i)] += delta;
        }
        cholesky(&hr)
    });
    let Some(l) = l else {
        return lu_solve(h, rhs);
    };
    let mut u = cholesky_solve(&l, rhs);
    // Iterative refinement against the unregularized matrix.
    for _ in 0..3 {
        let r: Vec<f64> = (0..rhs.len())
            .map(|i| rhs[i] - (0..rhs.len()).map(|j| h[(i, j)] * u[j]).sum::<f64>())
            .collect();
        let du = cholesky_solve(&l, &r);
        for (a, b) in u.iter_mut().zip(&du) {
            *a += b;
        }
    }
    Some(u)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn solve(blocks: &[ReducedBlock], c: &[f64], cfg: &SdpConfig) -> HsdeResult {
    let k = c.len();
    let nb = blocks.len();
    let degree: usize = blocks.iter().map(|b| b.kept.len()).sum();
    let a0_norm = blocks.iter().map(|b| b.constant.norm_fro().powi(2)).sum::<f64>().sqrt();
    let resz0 = a0_norm.max(1.0);
    let resx0 = norm(c).max(1.0);

    let mut x = vec![0.0; k];
    let mut s: Vec<Mat> = blocks.iter().map(|b| Mat::identity(b.kept.len())).collect();
    let mut z: Vec<Mat> = s.clone();
    let mut tau = 1.0f64;
    let mut kappa = 1.0f64;

    let eval_lin = |x: &[f64], t: f64| -> Vec<Mat> {
        blocks
            .iter()
            .map(|b| {
                let mut m = b.constant.scaled(t);
                for (a, &xj) in b.coeffs.iter().zip(x) {
                    if xj != 0.0 {
                        m.axpy(xj, a);
                    }
                }
                m
            })
            .collect()
    };
    let adjoint = |z: &[Mat]| -> Vec<f64> {
        (0..k)
            .map(|j| blocks.iter().zip(z).map(|(b, zb)| b.coeffs[j].dot(zb)).sum())
            .collect()
    };
    let a0_dot = |z: &[Mat]| -> f64 { blocks.iter().zip(z).map(|(b, zb)| b.constant.dot(zb)).sum() };

    let mut result = HsdeResult {
        status: HsdeStatus::MaxIterations,
        x: vec![0.0; k],
        z: z.clone(),
        iterations: 0,
        primal_residual: f64::INFINITY,
        dual_residual: f64::INFINITY,
        gap: f64::INFINITY,
        primal_objective: f64::NAN,
        dual_objective: f64::NAN,
        reduced_accuracy: false,
    };
    let mut near: Option<HsdeResult> = None;
    let fallback = |status: HsdeStatus, result: HsdeResult, near: Option<HsdeResult>| -> HsdeResult {
        match near {
            Some(mut n) => {
                n.status = HsdeStatus::Optimal;
                n.reduced_accuracy = true;
                n
            }
            None => HsdeResult { status, ..result },
        }
    };

    for iter in 0..=cfg.max_iterations {
        // Residuals of the embedding.
        let lin = eval_lin(&x, tau);
        let sres: Vec<Mat> = s.iter().zip(&lin).map(|(sb, l)| sb.sub(l)).collect();
        let az = adjoint(&z);
        let rx: Vec<f64> = az.iter().zip(c).map(|(a, cj)| -a - cj * tau).collect();
        let hz = a0_dot(&z);
        let cx = dot(c, &x);
        let rt = kappa - cx + hz;
        let sz: f64 = s.iter().zip(&z).map(|(a, b)| a.dot(b)).sum();
        let mu = (sz + tau * kappa) / (degree as f64 + 1.0);

        let pres = sres.iter().map(|m| m.norm_fro().powi(2)).sum::<f64>().sqrt() / tau / resz0;
        let dres = norm(&rx) / tau / resx0;
        let pobj = cx / tau;
        let dobj = hz / tau;
        let gap = sz / (tau * tau);
        let relgap = if pobj > 0.0 {
            gap / pobj
        } else if dobj < 0.0 {
            gap / -dobj
        } else {
            f64::INFINITY
        };
        result.iterations = iter;
        result.primal_residual = pres;
        result.dual_residual = dres;
        result.gap = gap;
        result.primal_objective = pobj;
        result.dual_objective = dobj;
        result.x = x.iter().map(|v| v / tau).collect();
        result.z = z.iter().map(|m| m.scaled(1.0 / tau)).collect();

        let pinfres = if hz < 0.0 { norm(&az) / resx0 / -hz } else { f64::INFINITY };
        let dinfres = if cx > 0.0 {
            let gs: Vec<Mat> = s.iter().zip(eval_lin(&x, 0.0)).map(|(sb, l)| sb.sub(&l)).collect();
            gs.iter().map(|m| m.norm_fro().powi(2)).sum::<f64>().sqrt() / resz0 / cx
        } else {
            f64::INFINITY
        };

        if pres <= cfg.feasibility_tolerance
            && dres <= cfg.feasibility_tolerance
            && (gap <= cfg.gap_tolerance || relgap <= cfg.gap_tolerance)
        {
            result.status = HsdeStatus::Optimal;
            return result;
        }
        if pres <= cfg.feasibility_tolerance
            && dres <= cfg.feasibility_tolerance
            && (gap <= cfg.acceptable_gap || relgap <= cfg.acceptable_gap)
            && near.as_ref().map_or(true, |n| gap < n.gap)
        {
            near = Some(HsdeResult {
                x: result.x.clone(),
                z: result.z.clone(),
                ..result
            });
        }
        if pinfres <= cfg.feasibility_tolerance {
            result.status = HsdeStatus::PrimalInfeasible;
            result.z = z.iter().map(|m| m.scaled(1.0 / -hz)).collect();
            return result;
        }
        if dinfres <= cfg.feasibility_tolerance {
            result.status = HsdeStatus::DualInfeasible;
            result.x = x.iter().map(|v| v / cx).collect();
            return result;
        }
        if iter == cfg.max_iterations {
            break;
        }

        let Some(scalings) = s.iter().zip(&z).map(|(sb, zb)| nt_scaling(sb, zb)).collect::<Option<Vec<_>>>() else {
            return fallback(HsdeStatus::NumericalFailure, result, near);
        };
        let at: Vec<Vec<Mat>> = (0..nb)
            .map(|bi| blocks[bi].coeffs.iter().map(|a| congruence(&scalings[bi].r_inv, a)).collect())
            .collect();
        let a0t: Vec<Mat> = (0..nb).map(|bi| congruence(&scalings[bi].r_inv, &blocks[bi].constant)).collect();
        let mut h = Mat::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let v: f64 = (0..nb).map(|bi| at[bi][i].dot(&at[bi][j])).sum();
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        let g: Vec<f64> = (0..k).map(|j| (0..nb).map(|bi| a0t[bi].dot(&at[bi][j])).sum()).collect();
        let sres_t: Vec<Mat> = (0..nb).map(|bi| congruence(&scalings[bi].r_inv, &sres[bi])).collect();
        let bvec: Vec<f64> = c.iter().zip(&g).map(|(cj, gj)| cj - gj).collect();
        let Some(v) = solve_normal(&h, &bvec) else {
            return fallback(HsdeStatus::NumericalFailure, result, near);
        };
        let cg: Vec<f64> = c.iter().zip(&g).map(|(a, b)| a + b).collect();
        let h00: f64 = a0t.iter().map(|m| m.dot(m)).sum();
        let denom = -kappa / tau - dot(&cg, &v) - h00;
        // Eliminating dτ goes through the Schur complement ‖Ã0‖² − gᵀH⁻¹g, which can
        // cancel to exactly zero near the boundary. The rescue form works with the
        // projection residual R0 = Ã0 − Σ p_j Ã_j, p = H⁻¹g, instead. It is only a
        // fallback: elsewhere the plain form's errors cancel between numerator and
        // denominator and it converges further.
        let (Some(q), Some(p)) = (solve_normal(&h, c), solve_normal(&h, &g)) else {
            return fallback(HsdeStatus::NumericalFailure, result, near);
        };
        let r0: Vec<Mat> = (0..nb)
            .map(|bi| {
                let mut r = a0t[bi].clone();
                for (j, &pj) in p.iter().enumerate() {
                    if pj != 0.0 {
                        r.axpy(-pj, &at[bi][j]);
                    }
                }
                r
            })
            .collect();
        let schur: f64 = r0.iter().map(|r| r.dot(r)).sum();
        let stable_denom = -kappa / tau - dot(c, &q).max(0.0) - schur;
        let p_rx = dot(&p, &rx);

        // One Newton direction for centering `sigma` and complementarity corrections.
        struct Dir {
            dx: Vec<f64>,
            dtau: f64,
            dkappa: f64,
            ds_t: Vec<Mat>,
            dz_t: Vec<Mat>,
        }
        let direction = |sigma: f64, corr: Option<(&[Mat], f64)>, stable: bool| -> Option<Dir> {
            let eta = 1.0 - sigma;
            let mut e_t = Vec::with_capacity(nb);
            let mut xs = Vec::with_capacity(nb);
            for bi in 0..nb {
                let lam = &scalings[bi].lambda;
                let n = lam.len();
                let xb = Mat::from_fn(n, n, |i, j| {
                    let mut d = if i == j { sigma * mu - lam[i] * lam[i] } else { 0.0 };
                    if let Some((cm, _)) = corr {
                        d -= cm[bi][(i, j)];
                    }
                    2.0 * d / (lam[i] + lam[j])
                });
                let mut e = xb.clone();
                e.axpy(eta, &sres_t[bi]);
                e_t.push(e);
                xs.push(xb);
            }
            let a: Vec<f64> = (0..k)
                .map(|j| (0..nb).map(|bi| at[bi][j].dot(&e_t[bi])).sum::<f64>() - eta * rx[j])
                .collect();
            let u = solve_normal(&h, &a)?;
            let dt_target = sigma * mu - tau * kappa - corr.map_or(0.0, |c| c.1);
            let dtau = if stable {
                let r0e: f64 = (0..nb).map(|bi| r0[bi].dot(&e_t[bi])).sum();
                (-eta * rt - dt_target / tau - r0e - eta * p_rx + dot(c, &u)) / stable_denom
            } else {
                let e0: f64 = (0..nb).map(|bi| a0t[bi].dot(&e_t[bi])).sum();
                (-eta * rt - dt_target / tau - e0 + dot(&cg, &u)) / denom
            };
            let mut dx: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b * dtau).collect();
            let dkappa = (dt_target - kappa * dtau) / tau;
            let mut dz_t: Vec<Mat> = (0..nb)
                .map(|bi| {
                    let mut dz = e_t[bi].clone();
                    for (j, &dxj) in dx.iter().enumerate() {
                        if dxj != 0.0 {
                            dz.axpy(-dxj, &at[bi][j]);
                        }
                    }
                    dz.axpy(-dtau, &a0t[bi]);
                    dz
                })
                .collect();
            // The sum above cancels badly near the boundary; pull the dual
            // equations back onto `<Ã_j, dZ̃> = η rx_j − c_j dτ`.
            for _ in 0..2 {
                let r: Vec<f64> = (0..k)
                    .map(|j| (0..nb).map(|bi| at[bi][j].dot(&dz_t[bi])).sum::<f64>() - (eta * rx[j] - c[j] * dtau))
                    .collect();
                let w = solve_normal(&h, &r)?;
                for bi in 0..nb {
                    for (j, &wj) in w.iter().enumerate() {
                        if wj != 0.0 {
                            dz_t[bi].axpy(-wj, &at[bi][j]);
                        }
                    }
                }
                for (a, b) in dx.iter_mut().zip(&w) {
                    *a += b;
                }
            }
            let ds_t: Vec<Mat> = (0..nb).map(|bi| xs[bi].sub(&dz_t[bi])).collect();
            if !dtau.is_finite() || dx.iter().any(|v| !v.is_finite()) {
                return None;
            }
            Some(Dir {
                dx,
                dtau,
                dkappa,
                ds_t,
                dz_t,
            })
        };
        let step_length = |d: &Dir, frac: f64| -> f64 {
            let mut a = f64::INFINITY;
            for bi in 0..nb {
                a = max_step(&scalings[bi].lambda, &d.ds_t[bi], a);
                a = max_step(&scalings[bi].lambda, &d.dz_t[bi], a);
            }
            if d.dtau < 0.0 {
                a = a.min(-tau / d.dtau);
            }
            if d.dkappa < 0.0 {
                a = a.min(-kappa / d.dkappa);
            }
            (frac * a).min(1.0)
        };

        let Some(aff) = direction(0.0, None, false).or_else(|| direction(0.0, None, true)) else {
            return fallback(HsdeStatus::NumericalFailure, result, near);
        };
        let alpha_aff = step_length(&aff, 1.0);
        let sigma = (1.0 - alpha_aff).powi(3).clamp(0.0, 1.0);
        let corr: Vec<Mat> = (0..nb).map(|bi| aff.ds_t[bi].jordan(&aff.dz_t[bi])).collect();
        let corr = Some((corr.as_slice(), aff.dtau * aff.dkappa));
        let Some(dir) = direction(sigma, corr, false).or_else(|| direction(sigma, corr, true)) else {
            return fallback(HsdeStatus::NumericalFailure, result, near);
        };
        let alpha = step_length(&dir, cfg.step_fraction);

        for (xi, d) in x.iter_mut().zip(&dir.dx) {
            *xi += alpha * d;
        }
        for bi in 0..nb {
            let sc = &scalings[bi];
            let ds = congruence(&sc.r, &dir.ds_t[bi]);
            let dz = congruence(&sc.r_inv.transpose(), &dir.dz_t[bi]);
            s[bi].axpy(alpha, &ds);
            z[bi].axpy(alpha, &dz);
            s[bi].symmetrize();
            z[bi].symmetrize();
        }
        tau += alpha * dir.dtau;
        kappa += alpha * dir.dkappa;
    }
    fallback(HsdeStatus::MaxIterations, result, near)
}
