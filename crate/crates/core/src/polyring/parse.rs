//! Text grammar for polynomials.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := ('+' | '-')* factor ('*' factor)*
//! factor := atom ('^' digits)?
//! atom   := number | name | '(' expr ')'
//! number := digits ('.' digits)? ('/' digits)?
//! ```
//!
//! The canonical printer only emits the flat subset (coefficient followed by
//! `name^k` powers), which is the wire format used by the CLI.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{Exponent, Polynomial, Rational};
use crate::error::{Error, Result};

/// Names `x1, .., xn`.
pub fn default_variable_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// Parses `text` over the ordered variable list.
pub fn parse_polynomial(text: &str, variables: &[String]) -> Result<Polynomial> {
    validate_variables(variables)?;
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        vars: variables,
        depth: 0,
        work: 0,
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

fn validate_variables(vars: &[String]) -> Result<()> {
    if vars.is_empty() {
        return Err(Error::InvalidVariables("variable list is empty".into()));
    }
    for (i, v) in vars.iter().enumerate() {
        let ok = v
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ok {
            return Err(Error::InvalidVariables(format!("`{v}` is not an identifier")));
        }
        if vars[..i].contains(v) {
            return Err(Error::InvalidVariables(format!("`{v}` is repeated")));
        }
    }
    Ok(())
}

const MAX_DEPTH: usize = 64;
// Literal exponents share the degree cap so every printed polynomial parses back.
const MAX_POWER: u32 = MAX_DEGREE;
const MAX_DEGREE: u32 = 512;
/// Term-pair products over the whole parse.
const MAX_WORK: usize = 1 << 18;
const MAX_COEFFICIENT_BITS: u64 = 1024;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a [String],
    depth: usize,
    work: usize,
}

impl Parser<'_> {
    fn err(&self, message: &str) -> Error {
        Error::Syntax {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn nvars(&self) -> usize {
        self.vars.len()
    }

    fn checked_mul(&mut self, a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
        let deg = a.degree().unwrap_or(0) + b.degree().unwrap_or(0);
        // Monomial products are bounded by the input length; only expansions count.
        if a.len() > 1 || b.len() > 1 {
            self.work = self.work.saturating_add(a.len().saturating_mul(b.len()));
        }
        if deg > MAX_DEGREE || self.work > MAX_WORK {
            return Err(self.err("expression too large"));
        }
        let p = a * b;
        let bits = p.terms().map(|(_, c)| c.numer().bits().max(c.denom().bits())).max().unwrap_or(0);
        if bits > MAX_COEFFICIENT_BITS {
            return Err(self.err("coefficient too large"));
        }
        Ok(p)
    }

    fn monomial_power(&self, base: &Polynomial, k: u32) -> Result<Polynomial> {
        let mut out = Polynomial::zero(self.nvars());
        if k == 0 {
            return Ok(Polynomial::one(self.nvars()));
        }
        let Some((e, c)) = base.terms().next() else { return Ok(out) };
        if u64::from(e.degree()) * u64::from(k) > u64::from(MAX_DEGREE) {
            return Err(self.err("expression too large"));
        }
        if c.numer().bits().max(c.denom().bits()).saturating_mul(u64::from(k)) > MAX_COEFFICIENT_BITS + 64 {
            return Err(self.err("coefficient too large"));
        }
        let c = c.pow(k as i32);
        if c.numer().bits().max(c.denom().bits()) > MAX_COEFFICIENT_BITS {
            return Err(self.err("coefficient too large"));
        }
        out.add_term(Exponent::new(e.entries().iter().map(|v| v * k).collect()), c);
        Ok(out)
    }

    fn check_size(&self, p: &Polynomial) -> Result<()> {
        if p.len() > MAX_WORK {
            return Err(self.err("expression too large"));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Polynomial> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.err("nesting too deep"));
        }
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(c @ (b'+' | b'-')) => {
                    self.pos += 1;
                    let t = self.term()?;
                    for (e, v) in t.terms() {
                        acc.add_term(e.clone(), if c == b'-' { -v } else { v.clone() });
                    }
                    self.check_size(&acc)?;
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut negative = false;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            if c == b'-' {
                negative = !negative;
            }
            self.pos += 1;
        }
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.factor()?;
            acc = self.checked_mul(&acc, &f)?;
        }
        Ok(if negative { -&acc } else { acc })
    }

    fn factor(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            if self.peek() == Some(b'-') {
                return Err(Error::NegativeExponent { position: self.pos });
            }
            let k = self.digits()?;
            let k: u32 = k
                .parse()
                .ok()
                .filter(|&k| k <= MAX_POWER)
                .ok_or_else(|| self.err("exponent too large"))?;
            if base.len() <= 1 {
                return self.monomial_power(&base, k);
            }
            let mut acc = Polynomial::one(self.nvars());
            for _ in 0..k {
                acc = self.checked_mul(&acc, &base)?;
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let r = self.number()?;
                Ok(Polynomial::constant(self.nvars(), r))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let idx = self.vars.iter().position(|v| v == name).ok_or_else(|| {
                    Error::UnknownVariable {
                        name: name.to_string(),
                        position: start,
                    }
                })?;
                Ok(Polynomial::variable(self.nvars(), idx))
            }
            Some(_) => Err(self.err("expected a number, variable or `(`")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn digits(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii").to_string())
    }

    fn number(&mut self) -> Result<Rational> {
        self.skip_ws();
        let start = self.pos;
        let mut int_part = String::new();
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            int_part.push(self.src[self.pos] as char);
            self.pos += 1;
        }
        let mut frac_part = String::new();
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                frac_part.push(self.src[self.pos] as char);
                self.pos += 1;
            }
        }
        if int_part.is_empty() && frac_part.is_empty() {
            self.pos = start;
            return Err(self.err("malformed number"));
        }
        let digits = format!("{int_part}{frac_part}");
        let numer: BigInt = digits.parse().map_err(|_| self.err("malformed number"))?;
        let denom = num_traits::pow(BigInt::from(10), frac_part.len());
        let mut value = Rational::new(numer, denom);
        if self.peek() == Some(b'/') {
            self.pos += 1;
            let d = self.digits()?;
            let d: BigInt = d.parse().map_err(|_| self.err("malformed denominator"))?;
            if d.is_zero() {
                return Err(self.err("division by zero"));
            }
            value /= Rational::from_integer(d);
        }
        Ok(value)
    }
}

/// `p/q` or `p` text of a rational.
pub fn rational_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(super) fn print_polynomial(p: &Polynomial, names: &[String]) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    // Highest degree first; within a degree, the same order as the moment basis.
    let mut terms: Vec<_> = p.terms().collect();
    terms.sort_by(|(a, _), (b, _)| b.degree().cmp(&a.degree()).then_with(|| a.cmp(b)));
    for (k, (e, c)) in terms.into_iter().enumerate() {
        let negative = c.is_negative();
        let mag = c.abs();
        if k == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let mono = monomial_text(e, names);
        if mono.is_empty() {
            out.push_str(&rational_to_string(&mag));
        } else if mag.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&rational_to_string(&mag));
            out.push('*');
            out.push_str(&mono);
        }
    }
    out
}

fn monomial_text(e: &Exponent, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &a) in e.entries().iter().enumerate() {
        match a {
            0 => {}
            1 => parts.push(names[i].clone()),
            _ => parts.push(format!("{}^{}", names[i], a)),
        }
    }
    parts.join("*")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::{rat, ratio};

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn reads_terms_directly() {
        let f = parse_polynomial("x1^2*x2 - 3", &names(&["x1", "x2"])).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.coefficient(&Exponent::new(vec![2, 1])), rat(1));
        assert_eq!(f.coefficient(&Exponent::new(vec![0, 0])), rat(-3));
    }

    #[test]
    fn zero_text_is_empty_map() {
        let f = parse_polynomial("0", &names(&["x"])).unwrap();
        assert!(f.is_zero());
        assert_eq!(f.len(), 0);
    }

    #[test]
    fn motzkin_support() {
        let f = parse_polynomial("x^4*y^2 + x^2*y^4 - 3*x^2*y^2 + 1", &names(&["x", "y"])).unwrap();
        assert_eq!(f.len(), 4);
        for e in [[4, 2], [2, 4], [2, 2], [0, 0]] {
            assert!(f.support().contains(&Exponent::new(e.to_vec())));
        }
    }

    #[test]
    fn rationals_and_decimals_are_exact() {
        let f = parse_polynomial("1/3*x + 0.25 - 2.5*x^2", &names(&["x"])).unwrap();
        assert_eq!(f.coefficient(&Exponent::new(vec![1])), ratio(1, 3));
        assert_eq!(f.coefficient(&Exponent::new(vec![0])), ratio(1, 4));
        assert_eq!(f.coefficient(&Exponent::new(vec![2])), ratio(-5, 2));
    }

    #[test]
    fn whitespace_is_insignificant() {
        let a = parse_polynomial("  x ^ 2 *y-  3 ", &names(&["x", "y"])).unwrap();
        let b = parse_polynomial("x^2*y-3", &names(&["x", "y"])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn grouped_powers_expand() {
        let f = parse_polynomial("(1 - x^2)^3", &names(&["x"])).unwrap();
        let g = parse_polynomial("1 - 3*x^2 + 3*x^4 - x^6", &names(&["x"])).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn error_cases() {
        let v = names(&["x", "y"]);
        assert!(matches!(
            parse_polynomial("x + z", &v),
            Err(Error::UnknownVariable { ref name, position: 4 }) if name == "z"
        ));
        assert!(matches!(
            parse_polynomial("x^-2", &v),
            Err(Error::NegativeExponent { .. })
        ));
        assert!(matches!(parse_polynomial("x +", &v), Err(Error::Syntax { .. })));
        assert!(matches!(parse_polynomial("x y", &v), Err(Error::Syntax { position: 2, .. })));
        assert!(matches!(parse_polynomial("1/0", &v), Err(Error::Syntax { .. })));
        assert!(parse_polynomial("x", &names(&["x", "x"])).is_err());
        assert!(parse_polynomial("x", &[]).is_err());
        assert!(parse_polynomial("x^513", &v).is_err());
    }

    #[test]
    fn powers_of_powers_print_back() {
        // Found by the polynomial fuzz target: z^88 used to exceed the literal exponent cap.
        let v = names(&["x", "y", "z"]);
        let f = parse_polynomial("-(-(z)^4 + 2 - x - z)^22 + 7", &v).unwrap();
        assert_eq!(parse_polynomial(&f.to_text(&v), &v).unwrap(), f);
    }

    #[test]
    fn printer_is_canonical() {
        let v = names(&["x", "y"]);
        let f = parse_polynomial("1 - 3*x^2*y^2 + y^4*x^2 + x^4*y^2", &v).unwrap();
        assert_eq!(f.to_text(&v), "x^4*y^2 + x^2*y^4 - 3*x^2*y^2 + 1");
        let g = parse_polynomial("-x + 1/2*y", &v).unwrap();
        assert_eq!(g.to_text(&v), "-x + 1/2*y");
    }
}
