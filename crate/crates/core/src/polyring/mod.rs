//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Terms are stored in a [`BTreeMap`] keyed by [`Exponent`], whose ordering is
//! graded lexicographic in the layout `1, x1, .., xn, x1^2, x1*x2, .., xn^2, ..`.
//! The same order labels the rows of moment matrices, so iterating a
//! polynomial's terms and iterating a monomial basis agree.

mod eval;
mod parse;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use eval::CompiledPoly;
pub use parse::{default_variable_names, parse_polynomial, rational_to_string};

/// Exact coefficient field.
pub type Rational = BigRational;

/// Converts an `i64` to an exact rational.
pub fn rat(v: i64) -> Rational {
    BigRational::from_integer(BigInt::from(v))
}

/// Converts `p/q` to an exact rational.
pub fn ratio(p: i64, q: i64) -> Rational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Nearest `f64` of an exact rational.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Huge numerators/denominators: scale down through the ratio of bit lengths.
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Exact rational value of a finite `f64`.
pub fn from_f64(v: f64) -> Rational {
    BigRational::from_float(v).unwrap_or_else(Rational::zero)
}

/// Multi-index of a monomial `x1^a1 * .. * xn^an`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Exponent(Vec<u32>);

impl Exponent {
    pub fn new(entries: Vec<u32>) -> Self {
        Exponent(entries)
    }

    pub fn zero(nvars: usize) -> Self {
        Exponent(vec![0; nvars])
    }

    /// The unit vector `e_i`.
    pub fn unit(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Exponent(e)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// Total degree `|a|`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn add(&self, other: &Exponent) -> Exponent {
        debug_assert_eq!(self.0.len(), other.0.len());
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `<w, a>` for a rational weight vector.
    pub fn pairing(&self, w: &[Rational]) -> Rational {
        self.0
            .iter()
            .zip(w)
            .filter(|(a, _)| **a != 0)
            .fold(Rational::zero(), |acc, (a, wi)| acc + wi * rat(i64::from(*a)))
    }

    /// Exponent entries as exact rationals.
    pub fn to_rationals(&self) -> Vec<Rational> {
        self.0.iter().map(|&a| rat(i64::from(a))).collect()
    }

    /// Drops the coordinates listed in `removed` (sorted or not).
    pub fn project_out(&self, removed: &[usize]) -> Exponent {
        Exponent(
            self.0
                .iter()
                .enumerate()
                .filter(|(i, _)| !removed.contains(i))
                .map(|(_, &a)| a)
                .collect(),
        )
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Vec<u32>> for Exponent {
    fn from(v: Vec<u32>) -> Self {
        Exponent(v)
    }
}

/// All exponents in `nvars` variables with total degree at most `max_degree`,
/// in graded lexicographic order.
pub fn monomials_up_to(nvars: usize, max_degree: u32) -> Vec<Exponent> {
    let mut out = Vec::new();
    for d in 0..=max_degree {
        let mut current = vec![0u32; nvars];
        fill_degree(nvars, d, 0, &mut current, &mut out);
    }
    out
}

fn fill_degree(nvars: usize, remaining: u32, pos: usize, cur: &mut Vec<u32>, out: &mut Vec<Exponent>) {
    if nvars == 0 {
        if remaining == 0 {
            out.push(Exponent(Vec::new()));
        }
        return;
    }
    if pos == nvars - 1 {
        cur[pos] = remaining;
        out.push(Exponent(cur.clone()));
        cur[pos] = 0;
        return;
    }
    for a in (0..=remaining).rev() {
        cur[pos] = a;
        fill_degree(nvars, remaining - a, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

/// Sparse polynomial over the rationals in a fixed number of variables.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Exponent, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::monomial(nvars, Exponent::zero(nvars), c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    /// The polynomial `x_i` (0-based index).
    pub fn variable(nvars: usize, i: usize) -> Self {
        Self::monomial(nvars, Exponent::unit(nvars, i), Rational::one())
    }

    pub fn monomial(nvars: usize, exp: Exponent, c: Rational) -> Self {
        assert_eq!(exp.nvars(), nvars, "exponent length must equal nvars");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Polynomial { nvars, terms }
    }

    /// Builds from `(exponent, coefficient)` pairs, summing duplicates and
    /// dropping zeros.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponent, Rational)>,
    {
        let mut p = Polynomial::zero(nvars);
        for (e, c) in terms {
            if e.nvars() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    found: e.nvars(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// Convenience constructor from integer data, used heavily in tests.
    pub fn from_int_terms(nvars: usize, terms: &[(&[u32], i64)]) -> Self {
        Self::from_terms(
            nvars,
            terms.iter().map(|(e, c)| (Exponent::new(e.to_vec()), rat(*c))),
        )
        .expect("consistent dimensions")
    }

    pub fn add_term(&mut self, e: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of stored (nonzero) terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponent, &Rational)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: &Exponent) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    /// Total degree; `None` plays the role of `-inf` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Exponent::degree).max()
    }

    pub fn is_constant(&self) -> bool {
        self.degree().map_or(true, |d| d == 0)
    }

    /// Single term with any nonzero coefficient.
    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// `supp(f)`: the exponents carrying nonzero coefficients.
    pub fn support(&self) -> Vec<Exponent> {
        self.terms.keys().cloned().collect()
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().map(|c| to_f64(c).abs()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.nvars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Exact partial derivative with respect to variable `i` (0-based).
    pub fn differentiate(&self, i: usize) -> Result<Polynomial> {
        if i >= self.nvars {
            return Err(Error::IndexOutOfRange {
                index: i,
                nvars: self.nvars,
            });
        }
        let mut out = Polynomial::zero(self.nvars);
        for (e, c) in &self.terms {
            let a = e.0[i];
            if a == 0 {
                continue;
            }
            let mut ne = e.0.clone();
            ne[i] -= 1;
            out.add_term(Exponent(ne), c * rat(i64::from(a)));
        }
        Ok(out)
    }

    pub fn gradient(&self) -> Vec<Polynomial> {
        (0..self.nvars)
            .map(|i| self.differentiate(i).expect("index in range"))
            .collect()
    }

    /// Hessian as a symmetric table; mixed partials are computed once and shared.
    pub fn hessian(&self) -> Vec<Vec<Polynomial>> {
        let grad = self.gradient();
        let n = self.nvars;
        let mut h = vec![vec![Polynomial::zero(n); n]; n];
        for i in 0..n {
            for j in i..n {
                let d = grad[i].differentiate(j).expect("index in range");
                h[j][i] = d.clone();
                h[i][j] = d;
            }
        }
        h
    }

    /// Floating-point evaluation.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x.len())?;
        Ok(self
            .terms
            .iter()
            .map(|(e, c)| to_f64(c) * monomial_value(e, x))
            .sum())
    }

    /// Exact evaluation at a rational point.
    pub fn evaluate_exact(&self, x: &[Rational]) -> Result<Rational> {
        self.check_dim(x.len())?;
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &a) in x.iter().zip(&e.0) {
                if a > 0 {
                    t *= num_traits::pow(xi.clone(), a as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found,
            });
        }
        Ok(())
    }

    /// Keeps only the terms whose exponents satisfy `keep`.
    pub fn filter_terms<F: Fn(&Exponent) -> bool>(&self, keep: F) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| keep(e))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Re-embeds into `new_nvars` variables by mapping variable `i` to `map[i]`.
    pub fn remap_variables(&self, new_nvars: usize, map: &[usize]) -> Polynomial {
        let mut out = Polynomial::zero(new_nvars);
        for (e, c) in &self.terms {
            let mut ne = vec![0u32; new_nvars];
            for (i, &a) in e.0.iter().enumerate() {
                ne[map[i]] += a;
            }
            out.add_term(Exponent(ne), c.clone());
        }
        out
    }

    /// Substitutes `x_i -> x_i * t^{w_i}`-style exponent bookkeeping: returns the
    /// weighted degree `<w, a>` of every term.
    pub fn weighted_degrees(&self, w: &[Rational]) -> Vec<Rational> {
        self.terms.keys().map(|e| e.pairing(w)).collect()
    }

    /// Polynomial compiled to `f64` for repeated numerical evaluation.
    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly::new(self)
    }

    /// Canonical text using the given variable names.
    pub fn to_text(&self, names: &[String]) -> String {
        parse::print_polynomial(self, names)
    }

    /// Whether every exponent is even in every coordinate and all coefficients
    /// share a sign. Such a polynomial cannot vanish on `(R \ {0})^n`.
    pub fn is_even_definite(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        let all_even = self.terms.keys().all(|e| e.0.iter().all(|a| a % 2 == 0));
        let pos = self.terms.values().all(|c| c.is_positive());
        let neg = self.terms.values().all(|c| c.is_negative());
        all_even && (pos || neg)
    }
}

pub(crate) fn monomial_value(e: &Exponent, x: &[f64]) -> f64 {
    e.0.iter()
        .zip(x)
        .filter(|(a, _)| **a > 0)
        .map(|(&a, &xi)| xi.powi(a as i32))
        .product()
}

/// Serialized as `{"nvars": n, "terms": [[exponent, "p/q"], ..]}`.
impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let terms: Vec<(&Exponent, String)> = self
            .terms
            .iter()
            .map(|(e, c)| (e, rational_to_string(c)))
            .collect();
        let mut st = serializer.serialize_struct("Polynomial", 2)?;
        st.serialize_field("nvars", &self.nvars)?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_variable_names(self.nvars);
        f.write_str(&parse::print_polynomial(self, &names))
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "ambient dimension mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "ambient dimension mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "ambient dimension mismatch");
        let mut out = Polynomial::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1.add(e2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

/// Components `F = (f_1, .., f_m)` of a polynomial map sharing one ambient dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PolynomialSystem {
    components: Vec<Polynomial>,
}

impl PolynomialSystem {
    pub fn new(components: Vec<Polynomial>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::Invalid("a polynomial system needs at least one component".into()))?;
        let n = first.nvars();
        if let Some(bad) = components.iter().find(|p| p.nvars() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.nvars(),
            });
        }
        Ok(PolynomialSystem { components })
    }

    pub fn single(p: Polynomial) -> Self {
        PolynomialSystem { components: vec![p] }
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn nvars(&self) -> usize {
        self.components[0].nvars()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `max_i deg f_i`, ignoring zero components.
    pub fn degree(&self) -> Option<u32> {
        self.components.iter().filter_map(Polynomial::degree).max()
    }
}

/// Sense of a constraint `g ≥ 0` or `g = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Geq,
    Eq,
}

/// A polynomial constraint describing part of `K_G`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Constraint {
    pub poly: Polynomial,
    pub sense: Sense,
}

impl Constraint {
    pub fn geq(poly: Polynomial) -> Self {
        Constraint { poly, sense: Sense::Geq }
    }

    pub fn eq(poly: Polynomial) -> Self {
        Constraint { poly, sense: Sense::Eq }
    }
}
