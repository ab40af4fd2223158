//! Matrix Market coordinate I/O for skew-symmetric matrices.

use super::matrix::SkewMatrix;
use super::view::Mat;
use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

const SKEW_HEADER: &str = "%%MatrixMarket matrix coordinate real skew-symmetric";

fn bad(msg: impl Into<String>) -> Error {
    Error::MatrixMarket(msg.into())
}

/// Parses a "coordinate real skew-symmetric" file. Entries above the diagonal
/// are accepted and negated into the lower triangle; repeated entries add up.
pub fn parse_mm(text: &str) -> Result<SkewMatrix> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty file"))?;
    let toks: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if toks.len() != 5 || toks[0] != "%%matrixmarket" || toks[1] != "matrix" {
        return Err(bad(format!("malformed header: {header:?}")));
    }
    if toks[2] != "coordinate" || toks[3] != "real" {
        return Err(bad(format!("unsupported format {} {}", toks[2], toks[3])));
    }
    if toks[4] != "skew-symmetric" {
        return Err(bad(format!("symmetry qualifier is {:?}, expected skew-symmetric", toks[4])));
    }
    let mut body = lines.map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('%'));
    let size = body.next().ok_or_else(|| bad("missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| bad(format!("bad size line {size:?}"))))
        .collect::<Result<_>>()?;
    let [rows, cols, nnz] = dims[..] else {
        return Err(bad(format!("bad size line {size:?}")));
    };
    if rows != cols {
        return Err(bad(format!("skew-symmetric matrix must be square, got {rows}×{cols}")));
    }
    let mut x = SkewMatrix::zeros(rows);
    let mut count = 0;
    for line in body {
        let mut it = line.split_whitespace();
        let (Some(i), Some(j), Some(v), None) = (it.next(), it.next(), it.next(), it.next()) else {
            return Err(bad(format!("bad entry line {line:?}")));
        };
        let i: usize = i.parse().map_err(|_| bad(format!("bad row index in {line:?}")))?;
        let j: usize = j.parse().map_err(|_| bad(format!("bad column index in {line:?}")))?;
        let v: f64 = v.parse().map_err(|_| bad(format!("bad value in {line:?}")))?;
        if i == 0 || j == 0 || i > rows || j > rows {
            return Err(bad(format!("index ({i}, {j}) outside 1..={rows}")));
        }
        let (i, j) = (i - 1, j - 1);
        if i == j {
            if v != 0.0 {
                return Err(bad(format!("nonzero diagonal entry at ({}, {})", i + 1, j + 1)));
            }
        } else if i > j {
            *x.raw_mut(i, j) += v;
        } else {
            *x.raw_mut(j, i) -= v;
        }
        count += 1;
    }
    if count != nnz {
        return Err(bad(format!("header announces {nnz} entries, found {count}")));
    }
    Ok(x)
}

/// Serializes the nonzero strictly-lower entries.
pub fn format_mm(x: &SkewMatrix) -> String {
    let entries: Vec<_> = x.lower_entries().filter(|e| e.2 != 0.0).collect();
    let mut s = format!("{SKEW_HEADER}\n{} {} {}\n", x.dim(), x.dim(), entries.len());
    for (i, j, v) in entries {
        writeln!(s, "{} {} {v:e}", i + 1, j + 1).unwrap();
    }
    s
}

/// Serializes a general dense matrix as "coordinate real general" (nonzeros only).
pub fn format_mm_general(d: &Mat) -> String {
    let mut entries = Vec::new();
    for j in 0..d.ncols {
        for i in 0..d.nrows {
            if d[(i, j)] != 0.0 {
                entries.push((i, j, d[(i, j)]));
            }
        }
    }
    let mut s = format!("%%MatrixMarket matrix coordinate real general\n{} {} {}\n", d.nrows, d.ncols, entries.len());
    for (i, j, v) in entries {
        writeln!(s, "{} {} {v:e}", i + 1, j + 1).unwrap();
    }
    s
}

pub fn mm_read(path: impl AsRef<Path>) -> Result<SkewMatrix> {
    parse_mm(&std::fs::read_to_string(path)?)
}

pub fn mm_write(path: impl AsRef<Path>, x: &SkewMatrix) -> Result<()> {
    Ok(std::fs::write(path, format_mm(x))?)
}

pub fn mm_write_general(path: impl AsRef<Path>, d: &Mat) -> Result<()> {
    Ok(std::fs::write(path, format_mm_general(d))?)
}
