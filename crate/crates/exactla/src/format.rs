//! Text exchange format for sparse rational matrices.
//!
//! ```text
//! exactla-v1
//! rows cols nnz
//! i j num/den
//! ...
//! ```
//!
//! Indices are 0-based. The `/den` part may be omitted for integers. Blank
//! lines and lines starting with `#` are ignored.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{ExactlaError, Result};
use crate::matrix::RationalSparseMatrix;
use crate::Q;

pub const FORMAT_TAG: &str = "exactla-v1";

fn err(line: usize, message: impl Into<String>) -> ExactlaError {
    ExactlaError::Format {
        line,
        message: message.into(),
    }
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| err(line, format!("invalid {what} `{tok}`")))
}

fn parse_rational(tok: &str, line: usize) -> Result<Q> {
    let (num, den) = match tok.split_once('/') {
        Some((n, d)) => (n, d),
        None => (tok, "1"),
    };
    let valid = |s: &str| {
        let digits = s.strip_prefix('-').unwrap_or(s);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num) || !valid(den) {
        return Err(err(line, format!("invalid rational `{tok}`")));
    }
    let num: BigInt = num.parse().map_err(|_| err(line, "invalid numerator"))?;
    let den: BigInt = den.parse().map_err(|_| err(line, "invalid denominator"))?;
    if den.is_zero() {
        return Err(err(line, "zero denominator"));
    }
    Ok(Q::new(num, den))
}

/// Parses the `exactla-v1` text format.
pub fn parse_matrix(text: &str) -> Result<RationalSparseMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (ln, tag) = lines.next().ok_or_else(|| err(0, "empty input"))?;
    if tag != FORMAT_TAG {
        return Err(err(ln, format!("expected `{FORMAT_TAG}`, found `{tag}`")));
    }
    let (ln, header) = lines.next().ok_or_else(|| err(ln, "missing header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [r, c, n] = fields.as_slice() else {
        return Err(err(ln, "header must be `rows cols nnz`"));
    };
    let rows = parse_usize(r, ln, "row count")?;
    let cols = parse_usize(c, ln, "column count")?;
    let nnz = parse_usize(n, ln, "entry count")?;

    let mut triplets = Vec::new();
    for (ln, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [i, j, v] = fields.as_slice() else {
            return Err(err(ln, "entry must be `i j num/den`"));
        };
        let i = parse_usize(i, ln, "row index")?;
        let j = parse_usize(j, ln, "column index")?;
        if i >= rows || j >= cols {
            return Err(err(ln, format!("entry ({i}, {j}) outside {rows}×{cols}")));
        }
        triplets.push((i, j, parse_rational(v, ln)?));
    }
    if triplets.len() != nnz {
        return Err(err(
            0,
            format!("header declares {nnz} entries, found {}", triplets.len()),
        ));
    }
    RationalSparseMatrix::from_triplets(rows, cols, triplets)
}

/// Writes a matrix in the `exactla-v1` format; entries in (row, col) order.
pub fn write_matrix(m: &RationalSparseMatrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{FORMAT_TAG}");
    let _ = writeln!(out, "{} {} {}", m.rows(), m.cols(), m.nnz());
    for (i, j, v) in m.entries() {
        let _ = writeln!(out, "{i} {j} {}/{}", v.numer(), v.denom());
    }
    out
}
