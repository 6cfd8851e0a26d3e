//! Text formats for raw constraint streams and weight files.
//!
//! A stream line is `C i:c i:c ...` or `P i:p ...`; a weight line lists
//! `i:w` tokens. Blank lines and text after `#` are ignored.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::point::{ConstraintKind, HalfspaceConstraint};

#[derive(Debug, Clone, PartialEq)]
pub struct Stream {
    pub constraints: Vec<HalfspaceConstraint>,
    /// One weight per coordinate; unlisted coordinates weigh 1.
    pub weights: Vec<f64>,
}

impl Stream {
    /// The dimension is one past the largest index in either input.
    pub fn parse(stream: &str, weights: Option<&str>) -> Result<Self> {
        let constraints = parse_constraints(stream)?;
        let listed = weights.map(parse_weights).transpose()?.unwrap_or_default();
        let dim = constraints
            .iter()
            .filter_map(HalfspaceConstraint::max_index)
            .chain(listed.keys().copied())
            .max()
            .map_or(0, |m| m + 1);
        let mut w = vec![1.0; dim];
        for (i, value) in listed {
            w[i] = value;
        }
        Ok(Self { constraints, weights: w })
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }
}

/// Non-comment lines with their 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(k, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((k + 1, line))
    })
}

pub(crate) fn parse_pair(line: usize, token: &str) -> Result<(usize, f64)> {
    let (i, v) = token
        .split_once(':')
        .ok_or_else(|| Error::parse(line, format!("expected index:value, got {token:?}")))?;
    let i = i
        .parse::<usize>()
        .map_err(|_| Error::parse(line, format!("bad index {i:?}")))?;
    let v = v
        .parse::<f64>()
        .map_err(|_| Error::parse(line, format!("bad value {v:?}")))?;
    Ok((i, v))
}

pub fn parse_constraints(text: &str) -> Result<Vec<HalfspaceConstraint>> {
    let mut out = Vec::new();
    for (line, content) in content_lines(text) {
        let mut tokens = content.split_whitespace();
        let kind = match tokens.next() {
            Some("C") => ConstraintKind::Covering,
            Some("P") => ConstraintKind::Packing,
            Some(other) => return Err(Error::parse(line, format!("expected C or P, got {other:?}"))),
            None => unreachable!("content lines are nonempty"),
        };
        let coeffs = tokens.map(|t| parse_pair(line, t)).collect::<Result<Vec<_>>>()?;
        let h = HalfspaceConstraint::new(kind, coeffs).map_err(|e| Error::parse(line, e.to_string()))?;
        if kind == ConstraintKind::Covering && h.sparsity() == 0 {
            return Err(Error::parse(line, Error::EmptyCovering.to_string()));
        }
        out.push(h);
    }
    Ok(out)
}

pub fn parse_weights(text: &str) -> Result<BTreeMap<usize, f64>> {
    let mut out = BTreeMap::new();
    for (line, content) in content_lines(text) {
        for token in content.split_whitespace() {
            let (i, w) = parse_pair(line, token)?;
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::parse(line, format!("weight {w} for coordinate {i} must be positive")));
            }
            if out.insert(i, w).is_some() {
                return Err(Error::parse(line, format!("coordinate {i} weighted twice")));
            }
        }
    }
    Ok(out)
}
