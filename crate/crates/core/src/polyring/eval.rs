use super::{to_f64, Polynomial};

/// A polynomial lowered to `f64` data for inner loops of numerical searches.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    nvars: usize,
    coeffs: Vec<f64>,
    exps: Vec<Vec<i32>>,
}

impl CompiledPoly {
    pub fn new(p: &Polynomial) -> Self {
        let mut coeffs = Vec::with_capacity(p.len());
        let mut exps = Vec::with_capacity(p.len());
        for (e, c) in p.terms() {
            coeffs.push(to_f64(c));
            exps.push(e.entries().iter().map(|&a| a as i32).collect());
        }
        CompiledPoly {
            nvars: p.nvars(),
            coeffs,
            exps,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .zip(&self.exps)
            .map(|(c, e)| c * mono(e, x))
            .sum()
    }

    /// `sum |c_a| |x^a|`: the scale against which a value is judged to be zero.
    pub fn abs_scale(&self, x: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .zip(&self.exps)
            .map(|(c, e)| (c * mono(e, x)).abs())
            .sum()
    }

    /// Value and gradient.
    pub fn eval_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut v = 0.0;
        for (c, e) in self.coeffs.iter().zip(&self.exps) {
            v += c * mono(e, x);
            for i in 0..self.nvars {
                if e[i] == 0 {
                    continue;
                }
                let mut t = c * f64::from(e[i]);
                for (j, &a) in e.iter().enumerate() {
                    let p = if j == i { a - 1 } else { a };
                    if p > 0 {
                        t *= x[j].powi(p);
                    }
                }
                grad[i] += t;
            }
        }
        v
    }

    /// Gradient of `Σ |c_α| x^α`, the polynomial with absolute coefficients.
    pub fn abs_eval_grad(&self, x: &[f64], grad: &mut [f64]) {
        grad.iter_mut().for_each(|g| *g = 0.0);
        for (c, e) in self.coeffs.iter().zip(&self.exps) {
            for i in 0..self.nvars {
                if e[i] == 0 {
                    continue;
                }
                let mut t = c.abs() * f64::from(e[i]);
                for (j, &a) in e.iter().enumerate() {
                    let p = if j == i { a - 1 } else { a };
                    if p > 0 {
                        t *= x[j].powi(p);
                    }
                }
                grad[i] += t;
            }
        }
    }

    /// Largest total degree among the terms (0 for the zero polynomial).
    pub fn degree(&self) -> i32 {
        self.exps.iter().map(|e| e.iter().sum::<i32>()).max().unwrap_or(0)
    }
}

fn mono(e: &[i32], x: &[f64]) -> f64 {
    let mut m = 1.0;
    for (&a, &xi) in e.iter().zip(x) {
        if a > 0 {
            m *= xi.powi(a);
        }
    }
    m
}
