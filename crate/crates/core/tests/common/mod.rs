#![allow(dead_code)]

use skewltl::skewcore::{Mat, SkewMatrix};

pub const EPS: f64 = f64::EPSILON;

/// Dense P·D·Pᵀ for the composed permutation `perm` ((P·x)_i = x[perm[i]]).
pub fn permute_dense(d: &Mat, perm: &[usize]) -> Mat {
    Mat::from_fn(d.nrows, d.ncols, |i, j| d[(perm[i], perm[j])])
}

pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    a.data.iter().zip(&b.data).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Random matrix with entries from a simple deterministic hash of the seed.
pub fn hashed(nrows: usize, ncols: usize, seed: u64) -> Mat {
    let x = SkewMatrix::random_gaussian(nrows + ncols + 1, seed);
    Mat::from_fn(nrows, ncols, |i, j| x.get(nrows + ncols - i, j) + 0.25 * x.get(i, nrows + ncols - j))
}

/// Lower triangle of a dense matrix as a skew matrix.
pub fn lower(d: &Mat) -> SkewMatrix {
    SkewMatrix::from_dense_lower(d)
}
