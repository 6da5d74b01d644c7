//! Critical points, the Morse property, and zeros of `f` on a basic set.

mod critical;
pub mod univariate;
mod zeros;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use critical::{classify, critical_points, morse_report, morse_verdict, CriticalPoint, Classification, MorseReport, MorseVerdict};
pub use zeros::{real_solutions, zeros_on_set, SolutionsReport, Ternary, ZeroPoint, ZerosReport};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MorseConfig {
    pub gradient_tolerance: f64,
    /// Relative to `max(1, ||D^2 f(p)||)`.
    pub hessian_tolerance: f64,
    pub zero_tolerance: f64,
    pub interior_tolerance: f64,
    pub dedup_radius: f64,
    /// Multi-start count for the searches in two or more variables.
    pub starts: usize,
    pub max_iterations: usize,
}

impl Default for MorseConfig {
    fn default() -> Self {
        MorseConfig {
            gradient_tolerance: 1e-8,
            hessian_tolerance: 1e-6,
            zero_tolerance: 1e-8,
            interior_tolerance: 1e-7,
            dedup_radius: 1e-5,
            starts: 256,
            max_iterations: 200,
        }
    }
}

/// Axis-aligned box `lower <= x <= upper`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl SearchBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        if lower.iter().zip(&upper).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::EmptyBox);
        }
        Ok(SearchBox { lower, upper })
    }

    /// `[-r, r]^n`.
    pub fn cube(n: usize, r: f64) -> Result<Self> {
        Self::new(vec![-r; n], vec![r; n])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[f64], slack: f64) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (a, b))| *v >= a - slack && *v <= b + slack)
    }

    /// Maps a point of the unit cube into the box.
    pub fn map_unit(&self, t: &[f64]) -> Vec<f64> {
        t.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(s, (a, b))| a + s * (b - a))
            .collect()
    }
}

/// The `k`-th point of the Halton sequence in `dim` dimensions.
pub fn halton(k: usize, dim: usize) -> Vec<f64> {
    const PRIMES: [usize; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];
    (0..dim)
        .map(|d| {
            let b = PRIMES[d % PRIMES.len()];
            let mut f = 1.0;
            let mut r = 0.0;
            let mut i = k + 1;
            while i > 0 {
                f /= b as f64;
                r += f * (i % b) as f64;
                i /= b;
            }
            r
        })
        .collect()
}

fn check_box(n: usize, bx: &SearchBox) -> Result<()> {
    if bx.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bx.dim(),
        });
    }
    Ok(())
}
