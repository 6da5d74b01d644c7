//! Real roots of univariate polynomials: companion-matrix eigenvalues,
//! Newton refinement, and an exact Sturm-sequence count as a cross-check.

use num_traits::{Signed, Zero};

use crate::linalg::dense::{hessenberg_eigenvalues, Mat};
use crate::polyring::{from_f64, rat, to_f64, Polynomial, Rational};

/// Dense coefficients, lowest degree first, with no trailing zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct Univariate(Vec<Rational>);

impl Univariate {
    pub fn from_polynomial(p: &Polynomial) -> Self {
        assert_eq!(p.nvars(), 1, "univariate polynomial expected");
        let deg = p.degree().unwrap_or(0) as usize;
        let mut c = vec![Rational::zero(); deg + 1];
        for (e, v) in p.terms() {
            c[e.entries()[0] as usize] = v.clone();
        }
        Univariate::new(c)
    }

    pub fn new(mut c: Vec<Rational>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        Univariate(c)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn derivative(&self) -> Univariate {
        Univariate::new(self.0.iter().enumerate().skip(1).map(|(k, c)| c * rat(k as i64)).collect())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    /// Remainder of division by `d` (nonzero).
    pub fn rem(&self, d: &Univariate) -> Univariate {
        let mut r = self.0.clone();
        let dl = d.0.last().expect("nonzero divisor").clone();
        let dd = d.degree();
        while r.len() > dd && !r.is_empty() {
            let q = r.last().expect("nonempty") / &dl;
            let shift = r.len() - 1 - dd;
            for (k, c) in d.0.iter().enumerate() {
                r[shift + k] -= &q * c;
            }
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        Univariate::new(r)
    }

    /// Exact quotient by `d`, assuming `d` divides `self`.
    pub fn div_exact(&self, d: &Univariate) -> Univariate {
        let mut r = self.0.clone();
        let dl = d.0.last().expect("nonzero divisor").clone();
        let dd = d.degree();
        if r.len() <= dd {
            return Univariate(Vec::new());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for shift in (0..q.len()).rev() {
            let c = &r[shift + dd] / &dl;
            for (k, dc) in d.0.iter().enumerate() {
                r[shift + k] -= &c * dc;
            }
            q[shift] = c;
        }
        Univariate::new(q)
    }

    pub fn gcd(&self, other: &Univariate) -> Univariate {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a
    }

    /// The square-free part `p / gcd(p, p')`.
    pub fn square_free(&self) -> Univariate {
        if self.degree() == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.div_exact(&g)
    }

    /// Sturm sequence `p, p', -rem(p, p'), ..`.
    pub fn sturm_sequence(&self) -> Vec<Univariate> {
        let mut seq = vec![self.clone(), self.derivative()];
        while !seq[seq.len() - 1].is_zero() {
            let k = seq.len();
            let r = seq[k - 2].rem(&seq[k - 1]);
            seq.push(Univariate::new(r.0.into_iter().map(|c| -c).collect()));
        }
        seq.pop();
        seq
    }

    /// Upper bound on the absolute value of every real root.
    pub fn root_bound(&self) -> Rational {
        let lead = self.0.last().expect("nonzero").abs();
        let m = self.0[..self.0.len() - 1].iter().map(|c| c.abs() / &lead).max().unwrap_or_else(Rational::zero);
        m + rat(1)
    }

    /// Companion-matrix eigenvalues `(re, im)`.
    pub fn companion_roots(&self) -> Option<Vec<(f64, f64)>> {
        let d = self.degree();
        if d == 0 {
            return Some(Vec::new());
        }
        let lead = to_f64(&self.0[d]);
        let mut c = Mat::zeros(d, d);
        for j in 0..d {
            c[(0, j)] = -to_f64(&self.0[d - 1 - j]) / lead;
        }
        for i in 1..d {
            c[(i, i - 1)] = 1.0;
        }
        hessenberg_eigenvalues(&c)
    }
}

fn sign_changes(seq: &[Univariate], x: &Rational) -> usize {
    let signs: Vec<i8> = seq
        .iter()
        .map(|p| {
            let v = p.eval(x);
            if v.is_positive() {
                1
            } else if v.is_negative() {
                -1
            } else {
                0
            }
        })
        .filter(|&s| s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots in `(a, b]`.
pub fn sturm_count(seq: &[Univariate], a: &Rational, b: &Rational) -> usize {
    sign_changes(seq, a).saturating_sub(sign_changes(seq, b))
}

/// All distinct real roots of `p`, ascending, with the exact count they were
/// checked against.
pub fn real_roots(p: &Univariate) -> (Vec<f64>, usize) {
    if p.degree() == 0 {
        return (Vec::new(), 0);
    }
    let sf = p.square_free();
    let seq = sf.sturm_sequence();
    let bound = sf.root_bound();
    let expected = sturm_count(&seq, &(-bound.clone()), &bound);
    if let Some(eigs) = sf.companion_roots() {
        let scale = eigs.iter().fold(1.0f64, |m, e| m.max(e.0.abs()));
        let mut roots: Vec<f64> = eigs
            .iter()
            .filter(|e| e.1.abs() <= 1e-7 * scale)
            .map(|e| newton_refine(&sf, e.0))
            .collect();
        roots.sort_by(f64::total_cmp);
        roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * (1.0 + b.abs()));
        if roots.len() == expected && isolated_consistently(&seq, &roots) {
            return (roots, expected);
        }
    }
    (bisect_roots(&sf, &seq, &bound), expected)
}

/// Every root sits in its own interval between midpoints, each holding exactly one root.
fn isolated_consistently(seq: &[Univariate], roots: &[f64]) -> bool {
    let mut cuts: Vec<Rational> = Vec::with_capacity(roots.len() + 1);
    let lo = roots.first().copied().unwrap_or(0.0) - 1.0;
    cuts.push(from_f64(lo));
    for w in roots.windows(2) {
        cuts.push(from_f64(0.5 * (w[0] + w[1])));
    }
    cuts.push(from_f64(roots.last().copied().unwrap_or(0.0) + 1.0));
    cuts.windows(2).all(|w| sturm_count(seq, &w[0], &w[1]) == 1)
}

fn newton_refine(p: &Univariate, mut x: f64) -> f64 {
    let dp = p.derivative();
    for _ in 0..60 {
        let d = dp.eval_f64(x);
        if d == 0.0 {
            break;
        }
        let step = p.eval_f64(x) / d;
        if !step.is_finite() {
            break;
        }
        x -= step;
        if step.abs() <= 1e-16 * (1.0 + x.abs()) {
            break;
        }
    }
    x
}

fn bisect_roots(p: &Univariate, seq: &[Univariate], bound: &Rational) -> Vec<f64> {
    let mut out = Vec::new();
    let mut stack = vec![(-bound.clone(), bound.clone())];
    while let Some((a, b)) = stack.pop() {
        let c = sturm_count(seq, &a, &b);
        if c == 0 {
            continue;
        }
        let width = to_f64(&(&b - &a));
        if c == 1 && width < 1e-6 || width < 1e-13 {
            let mid = (&a + &b) / rat(2);
            out.push(newton_refine(p, to_f64(&mid)).clamp(to_f64(&a), to_f64(&b)));
            continue;
        }
        let mid = (&a + &b) / rat(2);
        stack.push((mid.clone(), b));
        stack.push((a, mid));
    }
    out.sort_by(f64::total_cmp);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::parse_polynomial;

    fn u(text: &str) -> Univariate {
        Univariate::from_polynomial(&parse_polynomial(text, &["x".to_string()]).unwrap())
    }

    #[test]
    fn square_free_and_sturm() {
        let p = u("(x - 1)^2*(x + 2)");
        assert_eq!(p.square_free().degree(), 2);
        let (roots, count) = real_roots(&p);
        assert_eq!(count, 2);
        assert!((roots[0] + 2.0).abs() < 1e-12 && (roots[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn roots_of_derivatives() {
        let (r, _) = real_roots(&u("4*x^3 - 4*x"));
        assert_eq!(r.len(), 3);
        let (r, _) = real_roots(&u("3*x^2"));
        assert_eq!(r, vec![0.0]);
        let (r, c) = real_roots(&u("x^2 + 1"));
        assert!(r.is_empty() && c == 0);
    }

    #[test]
    fn clustered_roots_fall_back_to_bisection() {
        let p = u("(x - 1)*(x - 1001/1000)*(x - 1002/1000)*(x + 5)");
        let (r, c) = real_roots(&p);
        assert_eq!(c, 4);
        assert_eq!(r.len(), 4);
        assert!((r[3] - 1.002).abs() < 1e-9);
    }
}
