//! SDPA sparse text format.
//!
//! SDPA reads `minimize Σ c_i x_i  s.t.  Σ F_i x_i - F_0 ⪰ 0`. Our problems
//! `maximize c·z  s.t.  A0 + Σ z_j A_j ⪰ 0` map onto it with `x = -z`,
//! `F_j = -A_j` and `F_0 = -A0`, so the objective line is `c` itself.

use std::fmt::Write as _;

use serde::Serialize;

use super::problem::{Block, LmiProblem, SymSparse, MAX_TOTAL_DIM};
use crate::linalg::rational::{solve_affine, LinearSolution};
use crate::polyring::{from_f64, to_f64, Rational};
use crate::{Error, Result};

/// Largest variable count accepted by the parser.
const MAX_PARSE_VARS: usize = 100_000;

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes the problem in SDPA sparse format. Equalities must be removed first
/// with [`eliminate_equalities`] or [`split_equalities`].
pub fn write_sdpa(p: &LmiProblem) -> Result<String> {
    if !p.eq_matrix.is_empty() {
        return Err(Error::UnresolvedEqualities);
    }
    let mut p = p.clone();
    p.validate()?;
    let blocks: Vec<&Block> = p.blocks.iter().filter(|b| b.size > 0).collect();
    let mut out = String::new();
    writeln!(out, "\"exported by polyopt").unwrap();
    writeln!(out, "{} = mDIM", p.num_vars).unwrap();
    writeln!(out, "{} = nBLOCK", blocks.len()).unwrap();
    let sizes: Vec<String> = blocks
        .iter()
        .map(|b| if b.diagonal { format!("-{}", b.size) } else { b.size.to_string() })
        .collect();
    writeln!(out, "{}", sizes.join(" ")).unwrap();
    let costs: Vec<String> = p.objective.iter().map(|&c| fmt(c)).collect();
    writeln!(out, "{}", costs.join(" ")).unwrap();
    let mut entries: Vec<(usize, usize, usize, usize, f64)> = Vec::new();
    for (bi, b) in blocks.iter().enumerate() {
        for (matno, m) in std::iter::once(&b.constant).chain(&b.coeffs).enumerate() {
            for &(i, j, v) in &m.entries {
                if v != 0.0 {
                    entries.push((matno, bi + 1, i + 1, j + 1, -v));
                }
            }
        }
    }
    entries.sort_by(|a, b| (a.0, a.1, a.2, a.3).cmp(&(b.0, b.1, b.2, b.3)));
    for (matno, blk, i, j, v) in entries {
        writeln!(out, "{matno} {blk} {i} {j} {}", fmt(v)).unwrap();
    }
    Ok(out)
}

/// Numeric tokens at the start of a line; anything after the first
/// non-numeric token is a comment.
fn numeric_tokens(line: &str) -> Vec<&str> {
    line.split(|c: char| c.is_whitespace() || ",{}()".contains(c))
        .filter(|t| !t.is_empty())
        .take_while(|t| t.parse::<f64>().is_ok())
        .collect()
}

/// Parses an SDPA sparse file into the maximization form.
pub fn parse_sdpa(text: &str) -> Result<LmiProblem> {
    let err = |line: usize, message: &str| Error::SdpaParse {
        line,
        message: message.to_string(),
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .skip_while(|(_, l)| l.starts_with('"') || l.starts_with('*'))
        .peekable();
    let mut header = |what: &str, count: usize| -> Result<(usize, Vec<String>)> {
        let mut toks = Vec::new();
        let mut last = 0;
        while toks.len() < count {
            let (n, l) = lines.next().ok_or_else(|| err(last + 1, &format!("missing {what}")))?;
            last = n;
            let t = numeric_tokens(l);
            if t.is_empty() {
                return Err(err(n, &format!("expected {what}")));
            }
            toks.extend(t.into_iter().map(str::to_string));
        }
        if toks.len() > count {
            return Err(err(last, &format!("too many values for {what}")));
        }
        Ok((last, toks))
    };
    let (ln, t) = header("mDIM", 1)?;
    let m: usize = t[0].parse().map_err(|_| err(ln, "mDIM must be a nonnegative integer"))?;
    if m > MAX_PARSE_VARS {
        return Err(err(ln, "mDIM too large"));
    }
    let (ln, t) = header("nBLOCK", 1)?;
    let nb: usize = t[0].parse().map_err(|_| err(ln, "nBLOCK must be a nonnegative integer"))?;
    if nb > MAX_TOTAL_DIM {
        return Err(err(ln, "nBLOCK too large"));
    }
    let (ln, t) = header("bLOCKsTRUCT", nb)?;
    let mut blocks = Vec::with_capacity(nb);
    let mut total = 0usize;
    for s in &t {
        let v: i64 = s.parse().map_err(|_| err(ln, "block sizes must be integers"))?;
        if v == 0 {
            return Err(err(ln, "block size zero"));
        }
        let size = v.unsigned_abs() as usize;
        total = total.saturating_add(size);
        if total > MAX_TOTAL_DIM {
            return Err(Error::SdpTooLarge {
                size: total,
                max: MAX_TOTAL_DIM,
            });
        }
        blocks.push(if v < 0 { Block::diagonal(size, m) } else { Block::new(size, m) });
    }
    let (ln, t) = header("objective", m)?;
    let mut objective = Vec::with_capacity(m);
    for s in &t {
        let v: f64 = s.parse().map_err(|_| err(ln, "bad objective value"))?;
        if !v.is_finite() {
            return Err(err(ln, "non-finite objective value"));
        }
        objective.push(v);
    }
    for (n, l) in lines {
        let t = numeric_tokens(l);
        if t.len() < 5 {
            return Err(err(n, "expected `matno blkno i j value`"));
        }
        let int = |s: &str| -> Result<usize> { s.parse::<usize>().map_err(|_| err(n, "indices must be nonnegative integers")) };
        let (matno, blk, i, j) = (int(t[0])?, int(t[1])?, int(t[2])?, int(t[3])?);
        let v: f64 = t[4].parse().map_err(|_| err(n, "bad value"))?;
        if !v.is_finite() {
            return Err(err(n, "non-finite value"));
        }
        if matno > m {
            return Err(err(n, "matrix number out of range"));
        }
        if blk == 0 || blk > nb {
            return Err(err(n, "block number out of range"));
        }
        let b: &mut Block = &mut blocks[blk - 1];
        if i == 0 || j == 0 || i > b.size || j > b.size {
            return Err(err(n, "entry index out of range"));
        }
        if b.diagonal && i != j {
            return Err(err(n, "off-diagonal entry in a diagonal block"));
        }
        let (a, c) = if i <= j { (i - 1, j - 1) } else { (j - 1, i - 1) };
        let target: &mut SymSparse = if matno == 0 { &mut b.constant } else { &mut b.coeffs[matno - 1] };
        target.entries.push((a, c, -v));
    }
    let mut p = LmiProblem {
        num_vars: m,
        blocks,
        objective,
        eq_matrix: Vec::new(),
        eq_rhs: Vec::new(),
    };
    p.validate()?;
    Ok(p)
}

/// An equality-free problem in new variables `s` with `z = offset + map · s`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Eliminated {
    pub problem: LmiProblem,
    pub offset: Vec<f64>,
    /// `map[j]` is row `j` of the matrix taking `s` to `z`.
    pub map: Vec<Vec<f64>>,
    pub objective_constant: f64,
}

/// Removes `B z = b` by exact parametrization of its solution set.
pub fn eliminate_equalities(p: &LmiProblem) -> Result<Eliminated> {
    let mut p = p.clone();
    p.validate()?;
    let k = p.num_vars;
    let a: Vec<Vec<Rational>> = p.eq_matrix.iter().map(|r| r.iter().map(|&v| from_f64(v)).collect()).collect();
    let b: Vec<Rational> = p.eq_rhs.iter().map(|&v| from_f64(v)).collect();
    let (part, null) = match solve_affine(&a, &b, k) {
        LinearSolution::Inconsistent { .. } => return Err(Error::Invalid("equality constraints are inconsistent".into())),
        LinearSolution::Solved {
            particular,
            nullspace,
        } => (particular, nullspace),
    };
    let offset: Vec<f64> = part.iter().map(to_f64).collect();
    let r = null.len();
    let map: Vec<Vec<f64>> = (0..k).map(|j| null.iter().map(|v| to_f64(&v[j])).collect()).collect();
    let combine = |mats: &[SymSparse], weights: &[f64], base: Option<&SymSparse>| -> SymSparse {
        let mut out = SymSparse::new();
        if let Some(b) = base {
            out.entries.extend(b.entries.iter().copied());
        }
        for (m, &w) in mats.iter().zip(weights) {
            if w != 0.0 {
                out.entries.extend(m.entries.iter().map(|&(i, j, v)| (i, j, w * v)));
            }
        }
        out
    };
    let blocks = p
        .blocks
        .iter()
        .map(|b| Block {
            size: b.size,
            diagonal: b.diagonal,
            constant: combine(&b.coeffs, &offset, Some(&b.constant)),
            coeffs: (0..r)
                .map(|t| {
                    let w: Vec<f64> = map.iter().map(|row| row[t]).collect();
                    combine(&b.coeffs, &w, None)
                })
                .collect(),
        })
        .collect();
    let objective = (0..r).map(|t| map.iter().zip(&p.objective).map(|(row, c)| row[t] * c).sum()).collect();
    let mut problem = LmiProblem {
        num_vars: r,
        blocks,
        objective,
        eq_matrix: Vec::new(),
        eq_rhs: Vec::new(),
    };
    problem.validate()?;
    Ok(Eliminated {
        objective_constant: p.objective_value(&offset),
        problem,
        offset,
        map,
    })
}

/// Replaces each equality `r·z = b` by the pair `r·z - b ≥ 0`, `b - r·z ≥ 0`
/// in one extra diagonal block.
pub fn split_equalities(p: &LmiProblem) -> LmiProblem {
    let mut q = p.clone();
    let m = p.eq_matrix.len();
    if m == 0 {
        return q;
    }
    let mut b = Block::diagonal(2 * m, p.num_vars);
    for (i, (row, &rhs)) in p.eq_matrix.iter().zip(&p.eq_rhs).enumerate() {
        b.constant.entries.push((2 * i, 2 * i, -rhs));
        b.constant.entries.push((2 * i + 1, 2 * i + 1, rhs));
        for (j, &v) in row.iter().enumerate() {
            if v != 0.0 {
                b.coeffs[j].entries.push((2 * i, 2 * i, v));
                b.coeffs[j].entries.push((2 * i + 1, 2 * i + 1, -v));
            }
        }
    }
    q.blocks.push(b);
    q.eq_matrix.clear();
    q.eq_rhs.clear();
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::Mat;

    fn example() -> LmiProblem {
        let mut p = LmiProblem::new(2);
        p.blocks.push(
            Block::from_dense(
                &Mat::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]),
                &[
                    Mat::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]),
                    Mat::from_rows(&[vec![0.0, 0.0], vec![0.0, 1.0]]),
                ],
            )
            .unwrap(),
        );
        p.objective = vec![0.0, -1.0];
        p
    }

    #[test]
    fn export_layout() {
        let text = write_sdpa(&example()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], "2 = mDIM");
        assert_eq!(lines[2], "1 = nBLOCK");
        assert_eq!(lines[3], "2");
        assert!(lines[4].starts_with("0.0000000000000000e0 -1.0000000000000000e0"));
        assert_eq!(&lines[5..], ["0 1 1 1 -1.0000000000000000e0", "1 1 1 2 -1.0000000000000000e0", "2 1 2 2 -1.0000000000000000e0"]);
    }

    #[test]
    fn round_trip() {
        let mut p = example();
        p.blocks.push(Block::diagonal(1, 2));
        p.blocks[1].coeffs[0].add(0, 0, 0.1);
        p.blocks[1].constant.add(0, 0, std::f64::consts::PI);
        let mut back = parse_sdpa(&write_sdpa(&p).unwrap()).unwrap();
        p.validate().unwrap();
        back.validate().unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn parser_tolerates_punctuation_and_rejects_garbage() {
        let text = "* comment\n2 =mDIM\n1 =nBLOCK\n{2}\n{0, -1}\n0 1 1 1 -1\n1 1 1 2 -1\n2 1 2 2 -1\n";
        assert_eq!(parse_sdpa(text).unwrap(), {
            let mut p = example();
            p.validate().unwrap();
            p
        });
        assert!(matches!(parse_sdpa("2\n1\n2\n0 -1\n0 1 3 1 1\n"), Err(Error::SdpaParse { line: 5, .. })));
        assert!(parse_sdpa("").is_err());
        assert!(parse_sdpa("1\n1\n-2\n1\n1 1 1 2 1\n").is_err());
    }

    #[test]
    fn equality_handling() {
        let mut p = example();
        p.add_equality(vec![0.0, 1.0], 4.0);
        assert_eq!(write_sdpa(&p).unwrap_err(), Error::UnresolvedEqualities);
        let e = eliminate_equalities(&p).unwrap();
        assert_eq!(e.problem.num_vars, 1);
        assert_eq!(e.offset, vec![0.0, 4.0]);
        assert!(write_sdpa(&e.problem).is_ok());
        let s = split_equalities(&p);
        assert!(s.eq_matrix.is_empty());
        assert_eq!(s.blocks[1].size, 2);
    }
}
