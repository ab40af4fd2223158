//! Level-2 kernels: skew rank-2, general rank-2, the sandwiched matrix-vector
//! product and row-blocked pivot application.

use super::{triangle_bounds, uniform_bounds, workers, KernelConfig};
use crate::error::{dim, Error, Result};
use crate::skewcore::{MatMut, MatRef, PermutationVector};
use rayon::prelude::*;

const UNROLL: usize = 4;
const PAR_THRESHOLD: usize = 1 << 16;
const PIVOT_STRIP: usize = 64;

#[cfg(test)]
thread_local! {
    pub(crate) static STORED_WRITES: std::cell::Cell<usize> = const { std::cell::Cell::new(0) };
}

#[inline(always)]
fn count_writes(_n: usize) {
    #[cfg(test)]
    STORED_WRITES.with(|c| c.set(c.get() + _n));
}

/// Lower triangle of A := β·A + α·(x·yᵀ − y·xᵀ) for n×n lower skew storage.
/// Each stored entry is read and written once.
pub fn skew_rank2(cfg: &KernelConfig, a: MatMut<'_>, alpha: f64, x: &[f64], y: &[f64], beta: f64) -> Result<()> {
    let n = a.nrows();
    if a.ncols() != n || x.len() != n || y.len() != n {
        return Err(dim(format!("skew_rank2: A {}×{}, x {}, y {}", n, a.ncols(), x.len(), y.len())));
    }
    if alpha == 0.0 && beta == 1.0 {
        return Ok(());
    }
    let parts = workers(cfg.parallel_l2, n * n / 2, PAR_THRESHOLD);
    if parts == 1 {
        skew_rank2_cols(a, 0, alpha, x, y, beta, cfg.fused_l2);
    } else {
        a.split_col_chunks(&triangle_bounds(n, parts))
            .into_par_iter()
            .for_each(|(j0, chunk)| skew_rank2_cols(chunk, j0, alpha, x, y, beta, cfg.fused_l2));
    }
    Ok(())
}

/// Columns `j0 .. j0 + a.ncols()` of a skew rank-2 update (`a` holds all n rows).
fn skew_rank2_cols(mut a: MatMut<'_>, j0: usize, alpha: f64, x: &[f64], y: &[f64], beta: f64, fused: bool) {
    let n = a.nrows();
    let nc = a.ncols();
    if !fused {
        for jj in 0..nc {
            let j = j0 + jj;
            let (xj, yj) = (alpha * x[j], alpha * y[j]);
            let c = &mut a.col_mut(jj)[j + 1..];
            if beta != 1.0 {
                c.iter_mut().for_each(|v| *v *= beta);
            }
            c.iter_mut().zip(&x[j + 1..]).for_each(|(v, &xi)| *v += xi * yj);
            c.iter_mut().zip(&y[j + 1..]).for_each(|(v, &yi)| *v -= yi * xj);
            count_writes(n - j - 1);
        }
        return;
    }
    let mut jj = 0;
    while jj < nc {
        let w = UNROLL.min(nc - jj);
        let j = j0 + jj;
        // Triangular head: rows j+1 .. j+w−1 touch only some of the w columns.
        for t in 0..w {
            let (xj, yj) = (alpha * x[j + t], alpha * y[j + t]);
            let c = a.col_mut(jj + t);
            for i in j + t + 1..(j + w).min(n) {
                c[i] = beta * c[i] + x[i] * yj - y[i] * xj;
            }
        }
        let start = (j + w).min(n);
        if w == UNROLL {
            let xs: [f64; UNROLL] = std::array::from_fn(|t| alpha * x[j + t]);
            let ys: [f64; UNROLL] = std::array::from_fn(|t| alpha * y[j + t]);
            let block = a.rb_mut().sub_mut(0, jj, n, UNROLL);
            let (c01, c23) = block.split_cols(2);
            let (mut c0, mut c1) = c01.split_cols(1);
            let (mut c2, mut c3) = c23.split_cols(1);
            let (c0, c1, c2, c3) = (
                &mut c0.col_mut(0)[start..],
                &mut c1.col_mut(0)[start..],
                &mut c2.col_mut(0)[start..],
                &mut c3.col_mut(0)[start..],
            );
            let (xr, yr) = (&x[start..], &y[start..]);
            if beta == 1.0 {
                for i in 0..xr.len() {
                    let (xi, yi) = (xr[i], yr[i]);
                    c0[i] += xi * ys[0] - yi * xs[0];
                    c1[i] += xi * ys[1] - yi * xs[1];
                    c2[i] += xi * ys[2] - yi * xs[2];
                    c3[i] += xi * ys[3] - yi * xs[3];
                }
            } else {
                for i in 0..xr.len() {
                    let (xi, yi) = (xr[i], yr[i]);
                    c0[i] = beta * c0[i] + xi * ys[0] - yi * xs[0];
                    c1[i] = beta * c1[i] + xi * ys[1] - yi * xs[1];
                    c2[i] = beta * c2[i] + xi * ys[2] - yi * xs[2];
                    c3[i] = beta * c3[i] + xi * ys[3] - yi * xs[3];
                }
            }
        } else {
            for t in 0..w {
                let (xj, yj) = (alpha * x[j + t], alpha * y[j + t]);
                let c = &mut a.col_mut(jj + t)[start..];
                for ((v, &xi), &yi) in c.iter_mut().zip(&x[start..]).zip(&y[start..]) {
                    *v = beta * *v + xi * yj - yi * xj;
                }
            }
        }
        for t in 0..w {
            count_writes(n - (j + t) - 1);
        }
        jj += w;
    }
}

/// A := β·A + α·(x·uᵀ + y·vᵀ) for a general p×q block.
#[allow(clippy::too_many_arguments)]
pub fn gen_rank2(
    cfg: &KernelConfig,
    a: MatMut<'_>,
    alpha: f64,
    x: &[f64],
    u: &[f64],
    y: &[f64],
    v: &[f64],
    beta: f64,
) -> Result<()> {
    let (p, q) = (a.nrows(), a.ncols());
    if x.len() != p || y.len() != p || u.len() != q || v.len() != q {
        return Err(dim(format!("gen_rank2: A {p}×{q}, x {}, u {}, y {}, v {}", x.len(), u.len(), y.len(), v.len())));
    }
    if (alpha == 0.0 && beta == 1.0) || p == 0 || q == 0 {
        return Ok(());
    }
    let parts = workers(cfg.parallel_l2, p * q, PAR_THRESHOLD).min(q);
    if parts <= 1 {
        gen_rank2_cols(a, 0, alpha, x, u, y, v, beta, cfg.fused_l2);
    } else {
        a.split_col_chunks(&uniform_bounds(q, parts))
            .into_par_iter()
            .for_each(|(j0, chunk)| gen_rank2_cols(chunk, j0, alpha, x, u, y, v, beta, cfg.fused_l2));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn gen_rank2_cols(
    mut a: MatMut<'_>,
    j0: usize,
    alpha: f64,
    x: &[f64],
    u: &[f64],
    y: &[f64],
    v: &[f64],
    beta: f64,
    fused: bool,
) {
    let nc = a.ncols();
    if !fused {
        for jj in 0..nc {
            let c = a.col_mut(jj);
            if beta != 1.0 {
                c.iter_mut().for_each(|e| *e *= beta);
            }
            let uj = alpha * u[j0 + jj];
            c.iter_mut().zip(x).for_each(|(e, &xi)| *e += xi * uj);
        }
        for jj in 0..nc {
            let vj = alpha * v[j0 + jj];
            a.col_mut(jj).iter_mut().zip(y).for_each(|(e, &yi)| *e += yi * vj);
        }
        return;
    }
    for jj in 0..nc {
        let (uj, vj) = (alpha * u[j0 + jj], alpha * v[j0 + jj]);
        let c = a.col_mut(jj);
        if beta == 1.0 {
            for ((e, &xi), &yi) in c.iter_mut().zip(x).zip(y) {
                *e += xi * uj + yi * vj;
            }
        } else {
            for ((e, &xi), &yi) in c.iter_mut().zip(x).zip(y) {
                *e = beta * *e + xi * uj + yi * vj;
            }
        }
    }
}

fn check_tau(tau: &[f64], k: usize, who: &str) -> Result<()> {
    if tau.len() != k.saturating_sub(1) {
        return Err(dim(format!("{who}: T over {k} needs {} τ values, got {}", k.saturating_sub(1), tau.len())));
    }
    Ok(())
}

/// y := β·y + α·A·(T·x) with A p×k and T the skew tridiagonal over k given by
/// `tau` (length k − 1). T·x is produced on the fly, never stored (fused mode).
#[allow(clippy::too_many_arguments)]
pub fn skew_tridiag_gemv(
    cfg: &KernelConfig,
    y: &mut [f64],
    alpha: f64,
    a: MatRef<'_>,
    tau: &[f64],
    x: &[f64],
    beta: f64,
) -> Result<()> {
    let (p, k) = (a.nrows(), a.ncols());
    check_tau(tau, k, "skew_tridiag_gemv")?;
    if x.len() != k || y.len() != p {
        return Err(dim(format!("skew_tridiag_gemv: A {p}×{k}, x {}, y {}", x.len(), y.len())));
    }
    if beta != 1.0 {
        if beta == 0.0 {
            y.iter_mut().for_each(|v| *v = 0.0);
        } else {
            y.iter_mut().for_each(|v| *v *= beta);
        }
    }
    if alpha == 0.0 || p == 0 || k == 0 {
        return Ok(());
    }
    let parts = workers(cfg.parallel_l2, p * k, PAR_THRESHOLD).min(p);
    if parts <= 1 {
        gemv_rows(y, 0, alpha, a, tau, x, cfg.fused_l2);
    } else {
        let bounds = uniform_bounds(p, parts);
        let mut chunks = Vec::new();
        let mut rest = y;
        let mut start = 0;
        for &b in &bounds {
            let (l, r) = rest.split_at_mut(b - start);
            chunks.push((start, l));
            rest = r;
            start = b;
        }
        chunks.push((start, rest));
        chunks.into_par_iter().for_each(|(r0, yc)| {
            let n = yc.len();
            gemv_rows(yc, r0, alpha, a.sub(r0, 0, n, k), tau, x, cfg.fused_l2)
        });
    }
    Ok(())
}

#[inline(always)]
fn tx(tau: &[f64], x: &[f64], i: usize) -> f64 {
    let k = x.len();
    let lo = if i > 0 { tau[i - 1] * x[i - 1] } else { 0.0 };
    let hi = if i + 1 < k { tau[i] * x[i + 1] } else { 0.0 };
    lo - hi
}

fn gemv_rows(y: &mut [f64], _r0: usize, alpha: f64, a: MatRef<'_>, tau: &[f64], x: &[f64], fused: bool) {
    let k = a.ncols();
    if !a.is_col_major() {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += alpha * (0..k).map(|p| a.get(i, p) * tx(tau, x, p)).sum::<f64>();
        }
        return;
    }
    if !fused {
        let t: Vec<f64> = crate::skewcore::tridiag::tridiag_apply(tau, x);
        for (p, &tp) in t.iter().enumerate() {
            let s = alpha * tp;
            y.iter_mut().zip(a.col(p)).for_each(|(yi, &aip)| *yi += aip * s);
        }
        return;
    }
    let mut p = 0;
    while p + UNROLL <= k {
        let t: [f64; UNROLL] = std::array::from_fn(|q| alpha * tx(tau, x, p + q));
        let (c0, c1, c2, c3) = (a.col(p), a.col(p + 1), a.col(p + 2), a.col(p + 3));
        for i in 0..y.len() {
            y[i] += c0[i] * t[0] + c1[i] * t[1] + c2[i] * t[2] + c3[i] * t[3];
        }
        p += UNROLL;
    }
    while p < k {
        let s = alpha * tx(tau, x, p);
        y.iter_mut().zip(a.col(p)).for_each(|(yi, &aip)| *yi += aip * s);
        p += 1;
    }
}

/// Applies the interchanges of `p` to the rows of `block`: step k swaps rows
/// `offset + k` and `offset + k + π_k`. With `forward == false` the inverse
/// permutation is applied (steps in reverse). Work proceeds in column strips
/// so each strip stays cache-resident while all swaps are applied to it.
pub fn apply_row_pivots(
    cfg: &KernelConfig,
    block: MatMut<'_>,
    p: &PermutationVector,
    offset: usize,
    forward: bool,
) -> Result<()> {
    let nr = block.nrows();
    for (k, &pi) in p.pivots.iter().enumerate() {
        if pi != 0 && offset + k + pi >= nr {
            return Err(Error::IndexOutOfRange(format!("pivot π_{k} = {pi} targets row {} of {nr}", offset + k + pi)));
        }
    }
    let q = block.ncols();
    if q == 0 || p.nontrivial() == 0 {
        return Ok(());
    }
    let strips: Vec<usize> = (1..q.div_ceil(PIVOT_STRIP)).map(|s| s * PIVOT_STRIP).collect();
    let run = |(_, mut s): (usize, MatMut<'_>)| {
        for c in 0..s.ncols() {
            let col = s.col_mut(c);
            let mut step = |k: usize| {
                let pi = p.pivots[k];
                if pi != 0 {
                    col.swap(offset + k, offset + k + pi);
                }
            };
            if forward {
                (0..p.len()).for_each(&mut step);
            } else {
                (0..p.len()).rev().for_each(&mut step);
            }
        }
    };
    let chunks = block.split_col_chunks(&strips);
    if workers(cfg.parallel_l2, nr * q, PAR_THRESHOLD) > 1 {
        chunks.into_par_iter().for_each(run);
    } else {
        chunks.into_iter().for_each(run);
    }
    Ok(())
}
