//! The unit lower-triangular factor L and reconstruction of L·T·Lᵀ.

use super::matrix::SkewMatrix;
use super::perm::{compose_permutation, PermutationVector};
use super::tridiag::SkewTridiagonal;
use super::view::Mat;
use crate::error::{dim, Result};

/// How the subdiagonal of the shifted storage is used.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StorageMode {
    /// Subdiagonal holds explicit 1's (the unit diagonal of L, shifted); τ lives outside.
    SubdiagonalOnes,
    /// Subdiagonal holds τ; the unit diagonal of L is implicit.
    PackedShifted,
}

/// Unit lower-triangular L. Column j ≥ 1 of L is stored in column j − 1 of
/// the buffer ("shifted left by one column"); column 0 is e_0 unless a custom
/// first column was supplied, in which case it is kept separately.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitLowerFactor {
    store: SkewMatrix,
    mode: StorageMode,
    first_column: Option<Vec<f64>>,
}

impl UnitLowerFactor {
    /// Wraps a factored buffer whose subdiagonal holds explicit ones.
    pub(crate) fn from_factored(mut store: SkewMatrix, first_column: Option<Vec<f64>>) -> Self {
        store.clear_upper();
        UnitLowerFactor { store, mode: StorageMode::SubdiagonalOnes, first_column }
    }

    pub fn identity(m: usize) -> Self {
        let mut store = SkewMatrix::zeros(m);
        for j in 1..m {
            *store.raw_mut(j, j - 1) = 1.0;
        }
        UnitLowerFactor { store, mode: StorageMode::SubdiagonalOnes, first_column: None }
    }

    /// Builds L from a dense unit lower-triangular matrix. Column 0 is kept
    /// only when it differs from e_0.
    pub fn from_dense(d: &Mat) -> Result<Self> {
        let m = d.nrows;
        if d.ncols != m {
            return Err(dim("L must be square"));
        }
        let mut l = UnitLowerFactor::identity(m);
        for j in 1..m {
            for i in j + 1..m {
                *l.store.raw_mut(i, j - 1) = d[(i, j)];
            }
        }
        let first: Vec<f64> = (1..m).map(|i| d[(i, 0)]).collect();
        if first.iter().any(|&v| v != 0.0) {
            l.first_column = Some(first);
        }
        Ok(l)
    }

    pub fn dim(&self) -> usize {
        self.store.dim()
    }

    pub fn mode(&self) -> StorageMode {
        self.mode
    }

    /// Entries L[1..m][0] when the first column is not e_0.
    pub fn first_column(&self) -> Option<&[f64]> {
        self.first_column.as_deref()
    }

    /// The underlying shifted buffer (lower triangle only).
    pub fn storage(&self) -> &SkewMatrix {
        &self.store
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            1.0
        } else if i < j {
            0.0
        } else if j == 0 {
            self.first_column.as_ref().map_or(0.0, |f| f[i - 1])
        } else {
            self.store.raw(i, j - 1)
        }
    }

    pub fn to_dense(&self) -> Mat {
        let m = self.dim();
        Mat::from_fn(m, m, |i, j| self.get(i, j))
    }

    /// Largest |L[i][j]| over the strictly-lower triangle.
    pub fn max_abs_strict(&self) -> f64 {
        let m = self.dim();
        let mut mx = 0.0f64;
        for j in 0..m {
            for i in j + 1..m {
                mx = mx.max(self.get(i, j).abs());
            }
        }
        mx
    }
}

/// Moves τ onto the subdiagonal of the shifted storage.
pub fn pack_in_place(l: &mut UnitLowerFactor, t: &SkewTridiagonal) -> Result<()> {
    let m = l.dim();
    if t.dim() != m {
        return Err(dim(format!("T has dimension {}, L has {m}", t.dim())));
    }
    for j in 1..m {
        *l.store.raw_mut(j, j - 1) = t.tau[j - 1];
    }
    l.mode = StorageMode::PackedShifted;
    Ok(())
}

/// Inverse of [`pack_in_place`]: returns τ and restores the explicit ones.
pub fn unpack(l: &mut UnitLowerFactor) -> SkewTridiagonal {
    let m = l.dim();
    let mut tau = vec![0.0; m.saturating_sub(1)];
    if l.mode == StorageMode::PackedShifted {
        for j in 1..m {
            tau[j - 1] = l.store.raw(j, j - 1);
            *l.store.raw_mut(j, j - 1) = 1.0;
        }
        l.mode = StorageMode::SubdiagonalOnes;
    }
    SkewTridiagonal::with_dim(m, tau)
}

/// Pᵀ·(L·T·Lᵀ)·P as a lower-stored skew matrix (an empty p means P = I).
pub fn reconstruct(l: &UnitLowerFactor, t: &SkewTridiagonal, p: &PermutationVector) -> Result<SkewMatrix> {
    let m = l.dim();
    if t.dim() != m {
        return Err(dim(format!("T has dimension {}, L has {m}", t.dim())));
    }
    let perm = compose_permutation(p, m)?;
    let ld = l.to_dense();
    let tau = &t.tau;
    let mut out = vec![0.0; m * m];
    // Column j of L·(T·Lᵀ): H = T·Lᵀ is upper Hessenberg, so only rows q ≤ j + 1 of H are nonzero.
    for j in 0..m {
        let qmax = (j + 1).min(m.saturating_sub(1));
        for q in 0..=qmax {
            let lo = if q >= 1 { tau[q - 1] * ld[(j, q - 1)] } else { 0.0 };
            let hi = if q + 1 < m { tau[q] * ld[(j, q + 1)] } else { 0.0 };
            let h = lo - hi;
            if h == 0.0 {
                continue;
            }
            let start = (j + 1).max(q);
            let lc = &ld.data[q * m..(q + 1) * m];
            let oc = &mut out[j * m..(j + 1) * m];
            for i in start..m {
                oc[i] += lc[i] * h;
            }
        }
    }
    let mut x = SkewMatrix::zeros(m);
    for j in 0..m {
        for i in j + 1..m {
            x.set(perm[i], perm[j], out[i + j * m]);
        }
    }
    Ok(x)
}

/// ‖P·X̂·Pᵀ − L·T·Lᵀ‖_F / ‖X̂‖_F (0 when X̂ = 0 and the product vanishes).
pub fn relative_residual(
    original: &SkewMatrix,
    l: &UnitLowerFactor,
    t: &SkewTridiagonal,
    p: &PermutationVector,
) -> Result<f64> {
    let r = reconstruct(l, t, p)?;
    let num = original.diff_frobenius(&r);
    let den = original.frobenius();
    Ok(if den == 0.0 { num } else { num / den })
}
