//! `serialize_with` helpers for exact rationals, written as `"p/q"` strings.

use serde::ser::SerializeSeq;
use serde::Serializer;

use crate::polyring::{rational_to_string, Rational};

pub fn rational<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rational_to_string(r))
}

pub fn rationals<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for r in v {
        seq.serialize_element(&rational_to_string(r))?;
    }
    seq.end()
}

pub fn rational_vecs<S: Serializer>(v: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for row in v {
        let strs: Vec<String> = row.iter().map(rational_to_string).collect();
        seq.serialize_element(&strs)?;
    }
    seq.end()
}
