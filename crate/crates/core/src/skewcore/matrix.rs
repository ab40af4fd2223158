//! Lower-stored skew-symmetric matrices.

use super::view::{Mat, MatMut, MatRef};
use crate::error::{dim, Result};
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::SplitMix64;

/// An m×m skew-symmetric matrix of which only the strictly-lower triangle is
/// meaningful. Storage is column-major with leading dimension `ld ≥ m`;
/// entries on or above the diagonal are never read by the library (the
/// factorization does use the storage of the subdiagonal for L's unit entries).
#[derive(Clone, Debug, PartialEq)]
pub struct SkewMatrix {
    m: usize,
    ld: usize,
    data: Vec<f64>,
}

impl SkewMatrix {
    pub fn zeros(m: usize) -> Self {
        Self::zeros_with_ld(m, m)
    }

    pub fn zeros_with_ld(m: usize, ld: usize) -> Self {
        assert!(ld >= m, "leading dimension must be at least m");
        SkewMatrix { m, ld: ld.max(1), data: vec![0.0; ld.max(1) * m] }
    }

    /// Builds a matrix from a function of the strictly-lower indices `(i, j)`, `i > j`.
    pub fn from_lower_fn(m: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut x = SkewMatrix::zeros(m);
        for j in 0..m {
            for i in j + 1..m {
                x.set(i, j, f(i, j));
            }
        }
        x
    }

    /// Builds a matrix from its strictly-lower entries listed column by column.
    pub fn from_lower_entries(m: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != m * m.saturating_sub(1) / 2 {
            return Err(dim(format!("{} lower entries for m = {m}", entries.len())));
        }
        let mut it = entries.iter();
        Ok(SkewMatrix::from_lower_fn(m, |_, _| *it.next().unwrap()))
    }

    /// Takes the strictly-lower triangle of a dense matrix.
    pub fn from_dense_lower(d: &Mat) -> Self {
        assert_eq!(d.nrows, d.ncols);
        SkewMatrix::from_lower_fn(d.nrows, |i, j| d[(i, j)])
    }

    /// Strictly-lower entries i.i.d. standard normal, drawn column by column
    /// from a SplitMix64 stream seeded with `seed`.
    pub fn random_gaussian(m: usize, seed: u64) -> Self {
        let mut rng = SplitMix64::seed_from_u64(seed);
        SkewMatrix::from_lower_fn(m, |_, _| rng.sample(StandardNormal))
    }

    /// The 4×4 matrix with lower entries (x10,x20,x30,x21,x31,x32) = (2,1,3,4,1,5).
    pub fn worked_example() -> Self {
        SkewMatrix::from_lower_entries(4, &[2.0, 1.0, 3.0, 4.0, 1.0, 5.0]).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.m
    }
    pub fn ld(&self) -> usize {
        self.ld
    }
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Raw stored entry, any position inside the m×m block.
    #[inline]
    pub fn raw(&self, i: usize, j: usize) -> f64 {
        self.data[i + j * self.ld]
    }

    #[inline]
    pub fn raw_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.data[i + j * self.ld]
    }

    /// Entry of the implicit full skew-symmetric matrix.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Greater => self.raw(i, j),
            Less => -self.raw(j, i),
            Equal => 0.0,
        }
    }

    /// Sets the implicit entry (i, j) and, through skew-symmetry, (j, i).
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(i != j, "diagonal of a skew-symmetric matrix is fixed at zero");
        if i > j {
            *self.raw_mut(i, j) = v;
        } else {
            *self.raw_mut(j, i) = -v;
        }
    }

    pub fn view(&self) -> MatRef<'_> {
        MatRef::new(&self.data, self.m, self.m, self.ld)
    }

    pub fn view_mut(&mut self) -> MatMut<'_> {
        let (m, ld) = (self.m, self.ld);
        MatMut::new(&mut self.data, m, m, ld)
    }

    pub fn to_dense(&self) -> Mat {
        Mat::from_fn(self.m, self.m, |i, j| self.get(i, j))
    }

    pub fn lower_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.m).flat_map(move |j| (j + 1..self.m).map(move |i| (i, j, self.raw(i, j))))
    }

    /// Frobenius norm of the implicit full matrix.
    pub fn frobenius(&self) -> f64 {
        (2.0 * self.lower_entries().map(|(_, _, v)| v * v).sum::<f64>()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.lower_entries().fold(0.0, |a, (_, _, v)| a.max(v.abs()))
    }

    /// Frobenius norm of `self − other` over the implicit full matrices.
    pub fn diff_frobenius(&self, other: &SkewMatrix) -> f64 {
        assert_eq!(self.m, other.m);
        let s: f64 = self.lower_entries().map(|(i, j, v)| (v - other.raw(i, j)).powi(2)).sum();
        (2.0 * s).sqrt()
    }

    /// Clears everything outside the strictly-lower triangle.
    pub(crate) fn clear_upper(&mut self) {
        for j in 0..self.m {
            for i in 0..=j {
                *self.raw_mut(i, j) = 0.0;
            }
        }
    }
}
