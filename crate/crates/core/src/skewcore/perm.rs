//! Pivot vectors and symmetric interchanges on lower-stored skew matrices.

use super::matrix::SkewMatrix;
use super::view::MatMut;
use crate::error::{Error, Result};

/// Pivots `p = (π_0, …, π_{n−1})`, each a *relative* offset: step k swaps
/// positions k and k + π_k. π_0 is never computed and is fixed at 0.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PermutationVector {
    pub pivots: Vec<usize>,
}

impl PermutationVector {
    pub fn new(pivots: Vec<usize>) -> Self {
        PermutationVector { pivots }
    }

    pub fn identity(m: usize) -> Self {
        PermutationVector { pivots: vec![0; m] }
    }

    pub fn len(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pivots.is_empty()
    }

    /// Checks `π_k < m − k` for every k.
    pub fn validate(&self, m: usize) -> Result<()> {
        if self.pivots.len() > m {
            return Err(Error::IndexOutOfRange(format!("{} pivots for dimension {m}", self.pivots.len())));
        }
        for (k, &p) in self.pivots.iter().enumerate() {
            if k + p >= m {
                return Err(Error::IndexOutOfRange(format!("pivot π_{k} = {p} for dimension {m}")));
            }
        }
        Ok(())
    }

    /// Number of non-trivial interchanges; det P(p) = (−1)^count.
    pub fn nontrivial(&self) -> usize {
        self.pivots.iter().filter(|&&p| p != 0).count()
    }

    pub fn sign(&self) -> f64 {
        if self.nontrivial() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// `perm` such that `(P(p)·x)_i = x[perm[i]]`.
    pub fn compose(&self, m: usize) -> Result<Vec<usize>> {
        compose_permutation(self, m)
    }

    /// Applies P(p) (forward) or its inverse to a vector in place.
    pub fn apply_to(&self, x: &mut [f64], forward: bool) {
        let mut step = |k: usize| {
            let p = self.pivots[k];
            if p != 0 {
                x.swap(k, k + p);
            }
        };
        if forward {
            (0..self.pivots.len()).for_each(&mut step);
        } else {
            (0..self.pivots.len()).rev().for_each(&mut step);
        }
    }
}

/// Expands the sequence of interchanges into a dense permutation of 0..m.
pub fn compose_permutation(p: &PermutationVector, m: usize) -> Result<Vec<usize>> {
    p.validate(m)?;
    let mut perm: Vec<usize> = (0..m).collect();
    for (k, &pi) in p.pivots.iter().enumerate() {
        perm.swap(k, k + pi);
    }
    Ok(perm)
}

/// Replaces X by P·X·Pᵀ for the transposition (k, k + pi), touching only
/// the strictly-lower storage.
pub fn apply_symmetric_pivot(x: &mut SkewMatrix, k: usize, pi: usize) -> Result<()> {
    let m = x.dim();
    if k + pi >= m {
        return Err(Error::IndexOutOfRange(format!("swap ({k}, {}) for dimension {m}", k + pi)));
    }
    swap_symmetric(&mut x.view_mut(), k, k + pi, 0);
    Ok(())
}

/// Symmetric interchange of indices `a < b` on a square lower-stored view.
/// Entries in columns `< col_floor` of rows a and b are left alone (the
/// caller applies those later in a row-blocked pass). Returns the number of
/// stored entries moved.
pub(crate) fn swap_symmetric(x: &mut MatMut<'_>, a: usize, b: usize, col_floor: usize) -> u64 {
    if a == b {
        return 0;
    }
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    let n = x.nrows();
    let mut moved = 0u64;
    for j in col_floor..a {
        let t = x.get(a, j);
        x.set(a, j, x.get(b, j));
        x.set(b, j, t);
        moved += 2;
    }
    for j in a + 1..b {
        let t = x.get(j, a);
        x.set(j, a, -x.get(b, j));
        x.set(b, j, -t);
        moved += 2;
    }
    let v = x.get(b, a);
    x.set(b, a, -v);
    moved += 1;
    let (mut left, mut right) = x.rb_mut().split_cols(b);
    let ca = &mut left.col_mut(a)[b + 1..n];
    let cb = &mut right.col_mut(0)[b + 1..n];
    ca.swap_with_slice(cb);
    moved + 2 * (n - b - 1) as u64
}
