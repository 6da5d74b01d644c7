//! The JSON problem file: variable names, polynomial strings, and options.

use serde::{Deserialize, Serialize};

use polyopt::morse::SearchBox;
use polyopt::polyring::{parse_polynomial, Constraint, Polynomial, PolynomialSystem, Sense};

/// Current problem-file format version.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ProblemError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("{field}: {source}")]
    Polynomial {
        field: String,
        #[source]
        source: polyopt::Error,
    },
    #[error("invalid order range {0:?}: expected N or N..M with 1 <= N <= M <= {MAX_ORDER}")]
    OrderRange(String),
    #[error("unknown constraint sense {0:?}")]
    Sense(String),
    #[error("{0}")]
    Invalid(String),
}

/// Highest relaxation order accepted anywhere on the command line.
pub const MAX_ORDER: u32 = 20;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintText {
    pub poly: String,
    /// `">=0"` (also `"≥0"`, `"geq"`) or `"=0"` (also `"eq"`).
    pub sense: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxText {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub gap: Option<f64>,
    pub feasibility: Option<f64>,
    pub certificate: Option<f64>,
    pub rank: Option<f64>,
    pub ladder: Option<f64>,
    pub gradient: Option<f64>,
    pub hessian: Option<f64>,
    pub zero: Option<f64>,
    pub interior: Option<f64>,
    pub witness: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Options {
    /// `"N"` or `"N..M"`.
    pub order: Option<String>,
    #[serde(rename = "box")]
    pub search_box: Option<BoxText>,
    /// Half-width of the default search cube.
    pub radius: Option<f64>,
    pub tolerances: Tolerances,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default)]
    pub version: Option<u32>,
    pub variables: Vec<String>,
    pub objective: String,
    /// Components of `F` for `analyze` and `compactness`; defaults to the objective.
    #[serde(default)]
    pub system: Vec<String>,
    #[serde(default)]
    pub constraints: Vec<ConstraintText>,
    #[serde(default)]
    pub options: Options,
}

/// A problem file with every polynomial parsed.
#[derive(Clone, Debug)]
pub struct Problem {
    pub variables: Vec<String>,
    pub objective: Polynomial,
    pub system: PolynomialSystem,
    pub constraints: Vec<Constraint>,
    pub options: Options,
}

pub fn parse_sense(s: &str) -> Result<Sense, ProblemError> {
    match s.trim() {
        ">=0" | "≥0" | ">= 0" | "≥ 0" | "geq" => Ok(Sense::Geq),
        "=0" | "= 0" | "==0" | "eq" => Ok(Sense::Eq),
        other => Err(ProblemError::Sense(other.to_string())),
    }
}

/// Parses `"N"` or `"N..M"`.
pub fn parse_order_range(s: &str) -> Result<(u32, u32), ProblemError> {
    let bad = || ProblemError::OrderRange(s.to_string());
    let num = |t: &str| t.trim().parse::<u32>().map_err(|_| bad());
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let n = num(s)?;
            (n, n)
        }
    };
    if lo == 0 || lo > hi || hi > MAX_ORDER {
        return Err(bad());
    }
    Ok((lo, hi))
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self, ProblemError> {
        let file: ProblemFile = serde_json::from_str(text).map_err(|e| ProblemError::Json(e.to_string()))?;
        match file.version {
            None | Some(FORMAT_VERSION) => Ok(file),
            Some(v) => Err(ProblemError::Version(v)),
        }
    }

    pub fn parse(&self) -> Result<Problem, ProblemError> {
        let poly = |field: String, text: &str| {
            parse_polynomial(text, &self.variables).map_err(|source| ProblemError::Polynomial { field, source })
        };
        let objective = poly("objective".into(), &self.objective)?;
        let components = if self.system.is_empty() {
            vec![objective.clone()]
        } else {
            self.system
                .iter()
                .enumerate()
                .map(|(i, s)| poly(format!("system[{i}]"), s))
                .collect::<Result<_, _>>()?
        };
        let system = PolynomialSystem::new(components).map_err(|e| ProblemError::Invalid(e.to_string()))?;
        let mut constraints = Vec::with_capacity(self.constraints.len());
        for (i, c) in self.constraints.iter().enumerate() {
            constraints.push(Constraint {
                poly: poly(format!("constraints[{i}]"), &c.poly)?,
                sense: parse_sense(&c.sense)?,
            });
        }
        if let Some(order) = &self.options.order {
            parse_order_range(order)?;
        }
        if let Some(b) = &self.options.search_box {
            if b.lower.len() != self.variables.len() || b.upper.len() != self.variables.len() {
                return Err(ProblemError::Invalid("box bounds must have one entry per variable".into()));
            }
            SearchBox::new(b.lower.clone(), b.upper.clone()).map_err(|e| ProblemError::Invalid(e.to_string()))?;
        }
        if let Some(r) = self.options.radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(ProblemError::Invalid("radius must be positive".into()));
            }
        }
        Ok(Problem {
            variables: self.variables.clone(),
            objective,
            system,
            constraints,
            options: self.options.clone(),
        })
    }
}

impl Problem {
    /// The box from the file, else the cube of the given (or default) radius.
    pub fn search_box(&self, default_radius: f64) -> Result<SearchBox, ProblemError> {
        let n = self.variables.len();
        match &self.options.search_box {
            Some(b) => SearchBox::new(b.lower.clone(), b.upper.clone()),
            None => SearchBox::cube(n, self.options.radius.unwrap_or(default_radius)),
        }
        .map_err(|e| ProblemError::Invalid(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_ranges() {
        assert_eq!(parse_order_range("3").unwrap(), (3, 3));
        assert_eq!(parse_order_range("1..4").unwrap(), (1, 4));
        assert_eq!(parse_order_range("2..=5").unwrap(), (2, 5));
        for bad in ["0", "4..1", "", "x", "1..", "1..99"] {
            assert!(parse_order_range(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn minimal_file() {
        let f = ProblemFile::from_json(r#"{"variables": ["x"], "objective": "x^3"}"#).unwrap();
        let p = f.parse().unwrap();
        assert_eq!(p.system.len(), 1);
        assert!(p.constraints.is_empty());
    }

    #[test]
    fn constraints_and_errors() {
        let text = r#"{"variables": ["x"], "objective": "x", "constraints": [{"poly": "1 - x^2", "sense": "≥0"}]}"#;
        let p = ProblemFile::from_json(text).unwrap().parse().unwrap();
        assert_eq!(p.constraints[0].sense, Sense::Geq);
        let bad = r#"{"variables": ["x"], "objective": "x +* 1"}"#;
        assert!(matches!(ProblemFile::from_json(bad).unwrap().parse(), Err(ProblemError::Polynomial { .. })));
        assert!(matches!(ProblemFile::from_json(r#"{"variables": ["x"]}"#), Err(ProblemError::Json(_))));
        assert!(matches!(
            ProblemFile::from_json(r#"{"variables": ["x"], "objective": "x", "extra": 1}"#),
            Err(ProblemError::Json(_))
        ));
        let sense = r#"{"variables": ["x"], "objective": "x", "constraints": [{"poly": "x", "sense": "<0"}]}"#;
        assert_eq!(ProblemFile::from_json(sense).unwrap().parse().unwrap_err(), ProblemError::Sense("<0".into()));
    }
}
