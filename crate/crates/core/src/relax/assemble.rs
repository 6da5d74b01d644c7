//! Assembly of the gradient, Lasserre and KKT relaxations as LMI data.

use num_traits::Zero;

use super::basis::{ideal_rows, localizing_block, MomentBasis, MomentMatrixSpec};
use super::kkt::kkt_system;
use super::{ConeMode, RelaxationKind, RelaxationProblem, MAX_PREORDERING_GENERATORS};
use crate::polyring::{monomials_up_to, to_f64, Constraint, Polynomial, Sense};
use crate::sdp::{Block, LmiProblem};
use crate::{Error, Result};

fn half_up(d: u32) -> u32 {
    d.div_ceil(2)
}

/// Smallest order with every listed polynomial fitting into degree `2N`.
pub fn degree_floor(polys: &[&Polynomial]) -> u32 {
    polys.iter().map(|p| half_up(p.degree().unwrap_or(0))).max().unwrap_or(0).max(1)
}

fn check_order(order: u32, floor: u32) -> Result<()> {
    if order < floor {
        Err(Error::OrderTooSmall { order, floor })
    } else {
        Ok(())
    }
}

/// Products `g^S` over the nonempty subsets `S` selected by the mode.
pub(crate) fn cone_generators(gs: &[&Polynomial], mode: ConeMode) -> Result<Vec<(String, Polynomial)>> {
    match mode {
        ConeMode::QuadraticModule => Ok(gs.iter().enumerate().map(|(i, g)| (format!("g{}", i + 1), (*g).clone())).collect()),
        ConeMode::Preordering => {
            if gs.len() > MAX_PREORDERING_GENERATORS {
                return Err(Error::PreorderingBlowup {
                    count: gs.len(),
                    max: MAX_PREORDERING_GENERATORS,
                });
            }
            let mut out = Vec::new();
            for mask in 1u32..(1 << gs.len()) {
                let mut prod = Polynomial::one(gs.first().map_or(0, |g| g.nvars()));
                let mut name = Vec::new();
                for (i, g) in gs.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        prod = &prod * *g;
                        name.push(format!("g{}", i + 1));
                    }
                }
                out.push((name.join("*"), prod));
            }
            Ok(out)
        }
    }
}

/// Builder for moment relaxations over all moments of degree `<= 2N`.
pub(crate) struct MomentLmi {
    pub vars: MomentBasis,
    pub lmi: LmiProblem,
    pub block_labels: Vec<String>,
    pub order: u32,
}

impl MomentLmi {
    pub fn new(nvars: usize, order: u32, pin: bool) -> Result<Self> {
        let vars = MomentBasis::new(nvars, 2 * order);
        let mut lmi = LmiProblem::new(vars.len());
        lmi.blocks.push(localizing_block(&Polynomial::one(nvars), order, &vars)?);
        if pin {
            let mut row = vec![0.0; vars.len()];
            row[0] = 1.0;
            lmi.add_equality(row, 1.0);
        }
        Ok(MomentLmi {
            vars,
            lmi,
            block_labels: vec![format!("moment matrix M_{order}")],
            order,
        })
    }

    /// Adds `M_d(g y) ⪰ 0` with `d = ⌊(2N − deg g)/2⌋`; skipped when `deg g > 2N`.
    pub fn localizing(&mut self, g: &Polynomial, label: &str) -> Result<()> {
        let dg = g.degree().unwrap_or(0);
        if dg > 2 * self.order {
            return Ok(());
        }
        let d = (2 * self.order - dg) / 2;
        self.lmi.blocks.push(localizing_block(g, d, &self.vars)?);
        self.block_labels.push(format!("localizing {label}, degree {d}"));
        Ok(())
    }

    pub fn ideal(&mut self, h: &Polynomial) -> Result<()> {
        for row in ideal_rows(h, 2 * self.order, &self.vars)? {
            self.lmi.add_equality(row, 0.0);
        }
        Ok(())
    }

    /// `maximize −L(f)`, so the relaxation value is minus the LMI objective.
    pub fn minimize(&mut self, f: &Polynomial) -> Result<()> {
        let mut c = vec![0.0; self.vars.len()];
        for (e, v) in f.terms() {
            let k = self
                .vars
                .position(e)
                .ok_or_else(|| Error::MissingMoment(e.entries().to_vec()))?;
            c[k] -= to_f64(v);
        }
        self.lmi.objective = c;
        Ok(())
    }

    pub fn finish(self, kind: RelaxationKind, source: Vec<String>, notes: Vec<String>) -> RelaxationProblem {
        let labels = self.vars.monomials().iter().map(|e| format!("y{:?}", e.entries())).collect();
        RelaxationProblem {
            kind,
            order: self.order,
            nvars: self.vars.nvars(),
            moments: Some(self.vars),
            variable_labels: labels,
            block_labels: self.block_labels,
            lmi: self.lmi,
            value_sign: -1.0,
            source,
            notes,
        }
    }
}

fn sources(f: &Polynomial, extra: &[&Polynomial]) -> Vec<String> {
    std::iter::once(f).chain(extra.iter().copied()).map(|p| p.to_string()).collect()
}

/// The moment side of the gradient relaxation: `min L(f)` with `M_N(y) ⪰ 0`,
/// `y_0 = 1` and `L(x^β ∂_i f) = 0`.
pub fn gradient_moment(f: &Polynomial, order: u32) -> Result<RelaxationProblem> {
    if f.is_constant() {
        return Err(Error::ConstantPolynomial);
    }
    check_order(order, degree_floor(&[f]))?;
    let n = f.nvars();
    let mut b = MomentLmi::new(n, order, true)?;
    let grad = f.gradient();
    for g in &grad {
        if !g.is_zero() {
            b.ideal(g)?;
        }
    }
    b.minimize(f)?;
    Ok(b.finish(RelaxationKind::GradientMoment, sources(f, &[]), Vec::new()))
}

/// The SOS side: `max γ` with `f − γ − Σ φ_i ∂_i f = σ`, `σ` SOS of degree `2N`
/// and `deg φ_i <= 2N − d + 1`.
pub fn gradient_sos(f: &Polynomial, order: u32) -> Result<RelaxationProblem> {
    if f.is_constant() {
        return Err(Error::ConstantPolynomial);
    }
    check_order(order, degree_floor(&[f]))?;
    let n = f.nvars();
    let d = f.degree().unwrap_or(0);
    let two_n = 2 * order;
    let target = MomentBasis::new(n, two_n);
    let gram = MomentMatrixSpec::new(n, order);
    let s = gram.size();
    let grad = f.gradient();
    let phi_basis = monomials_up_to(n, two_n + 1 - d);

    // Variables: γ, then φ coefficients, then the Gram upper triangle.
    let mut labels = vec!["gamma".to_string()];
    let mut phi_index = Vec::new();
    for (i, g) in grad.iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        for e in &phi_basis {
            phi_index.push((i, e.clone(), labels.len()));
            labels.push(format!("phi{}{:?}", i + 1, e.entries()));
        }
    }
    let mut gram_index = vec![vec![0usize; s]; s];
    for i in 0..s {
        for j in i..s {
            gram_index[i][j] = labels.len();
            gram_index[j][i] = labels.len();
            labels.push(format!("G[{i},{j}]"));
        }
    }
    let k = labels.len();
    let mut lmi = LmiProblem::new(k);
    let mut block = Block::new(s, k);
    for i in 0..s {
        for j in i..s {
            block.coeffs[gram_index[i][j]].entries.push((i, j, 1.0));
        }
    }
    lmi.blocks.push(block);
    lmi.objective[0] = 1.0;

    // Coefficient matching: γ[α=0] + Σ φ_i ∂_i f + Σ G_ij x^{β_i+β_j} = f.
    let mut rows = vec![vec![0.0; k]; target.len()];
    rows[0][0] += 1.0;
    for (i, e, var) in &phi_index {
        for (ge, gc) in grad[*i].terms() {
            let a = target
                .position(&e.add(ge))
                .ok_or_else(|| Error::MissingMoment(e.add(ge).entries().to_vec()))?;
            rows[a][*var] += to_f64(gc);
        }
    }
    for i in 0..s {
        for j in 0..s {
            let a = target.position(&gram.entry_index(i, j)).expect("within degree 2N");
            rows[a][gram_index[i][j]] += 1.0;
        }
    }
    for (a, row) in rows.into_iter().enumerate() {
        let rhs = to_f64(&f.coefficient(&target.monomials()[a]));
        if row.iter().any(|v| *v != 0.0) || rhs != 0.0 {
            lmi.add_equality(row, rhs);
        }
    }
    Ok(RelaxationProblem {
        kind: RelaxationKind::GradientSos,
        order,
        nvars: n,
        moments: None,
        variable_labels: labels,
        block_labels: vec![format!("Gram matrix over monomials of degree <= {order}")],
        lmi,
        value_sign: 1.0,
        source: sources(f, &[]),
        notes: Vec::new(),
    })
}

/// `Q^N_G`: `min L(f)` with `M_N(y) ⪰ 0`, `M_{N − w̃_i}(g_i y) ⪰ 0`, `y_0 = 1`;
/// equality constraints enter as `L(x^β h) = 0`.
pub fn lasserre_relaxation(f: &Polynomial, constraints: &[Constraint], order: u32) -> Result<RelaxationProblem> {
    let n = f.nvars();
    check_dims(n, constraints)?;
    let mut polys: Vec<&Polynomial> = vec![f];
    polys.extend(constraints.iter().map(|c| &c.poly));
    check_order(order, degree_floor(&polys))?;
    let mut b = MomentLmi::new(n, order, true)?;
    for (i, c) in constraints.iter().enumerate() {
        match c.sense {
            Sense::Geq => b.localizing(&c.poly, &format!("g{}", i + 1))?,
            Sense::Eq => b.ideal(&c.poly)?,
        }
    }
    b.minimize(f)?;
    Ok(b.finish(RelaxationKind::Lasserre, sources(f, &polys[1..]), Vec::new()))
}

/// Moment relaxation over `(x, λ)` of `T_KKT` or `M_KKT`.
pub fn kkt_relaxation(f: &Polynomial, constraints: &[Constraint], order: u32, mode: ConeMode) -> Result<RelaxationProblem> {
    let n = f.nvars();
    check_dims(n, constraints)?;
    let sys = kkt_system(f, constraints)?;
    let mut polys: Vec<&Polynomial> = vec![&sys.objective];
    polys.extend(sys.inequality_parts.iter().map(|c| &c.poly));
    polys.extend(sys.generators.iter());
    check_order(order, degree_floor(&polys))?;
    let ineqs: Vec<&Polynomial> = sys
        .inequality_parts
        .iter()
        .filter(|c| c.sense == Sense::Geq)
        .map(|c| &c.poly)
        .collect();
    let gens = cone_generators(&ineqs, mode)?;
    let mut b = MomentLmi::new(n + constraints.len(), order, true)?;
    for (label, g) in &gens {
        b.localizing(g, label)?;
    }
    for h in &sys.generators {
        if !h.is_zero() {
            b.ideal(h)?;
        }
    }
    b.minimize(&sys.objective)?;
    let notes = vec!["assumes the KKT conditions hold at some global minimizer".to_string()];
    let src: Vec<&Polynomial> = constraints.iter().map(|c| &c.poly).collect();
    Ok(b.finish(RelaxationKind::Kkt, sources(f, &src), notes))
}

pub(crate) fn check_dims(n: usize, constraints: &[Constraint]) -> Result<()> {
    match constraints.iter().find(|c| c.poly.nvars() != n) {
        Some(c) => Err(Error::DimensionMismatch {
            expected: n,
            found: c.poly.nvars(),
        }),
        None => Ok(()),
    }
}

/// Coefficients of `p` as a dense vector over `basis`.
pub(crate) fn coefficient_vector(p: &Polynomial, basis: &MomentBasis) -> Result<Vec<f64>> {
    let mut out = vec![0.0; basis.len()];
    for (e, c) in p.terms() {
        if c.is_zero() {
            continue;
        }
        let k = basis.position(e).ok_or_else(|| Error::MissingMoment(e.entries().to_vec()))?;
        out[k] = to_f64(c);
    }
    Ok(out)
}
