//! Sandwiched level-3 kernels `C := βC + α·A·T·Aᵀ`, `C := βC + α·A·T·B` and
//! the skew rank-2k update, built on Goto-style blocking.
//!
//! The tridiagonal multiply never produces a k×n intermediate: each KC×NC
//! panel of T·B is generated while packing, reading two τ values per element.

use super::microkernel::{tile_product, MR, NR};
use super::{triangle_bounds, uniform_bounds, KernelConfig};
use crate::error::{dim, Result};
use crate::skewcore::{Mat, MatMut, MatRef, SSplitting};
use rayon::prelude::*;
use std::cell::RefCell;
use std::sync::atomic::{AtomicUsize, Ordering};

/// Cache-blocking parameters (MR×NR is fixed by the micro-kernel).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Blocking {
    pub mc: usize,
    pub kc: usize,
    pub nc: usize,
}

impl Default for Blocking {
    fn default() -> Self {
        Blocking { mc: 96, kc: 256, nc: 3072 }
    }
}

impl Blocking {
    fn sanitized(self) -> Blocking {
        Blocking { mc: self.mc.max(1), kc: self.kc.max(1), nc: self.nc.max(1) }
    }
}

/// Upper bound on the per-worker packing workspace (in scalars) of the fused
/// kernels: one MC×KC block of A and one KC×NC panel of B, padded to the tile.
pub fn workspace_bound(b: &Blocking) -> usize {
    let b = b.sanitized();
    b.mc.div_ceil(MR) * MR * b.kc + b.kc * b.nc.div_ceil(NR) * NR
}

static PEAK_WORKSPACE: AtomicUsize = AtomicUsize::new(0);

/// Largest packing workspace (scalars, per worker) requested since the last reset.
pub fn peak_workspace() -> usize {
    PEAK_WORKSPACE.load(Ordering::Relaxed)
}

pub fn reset_peak_workspace() {
    PEAK_WORKSPACE.store(0, Ordering::Relaxed);
}

thread_local! {
    static PACK_BUFS: RefCell<(Vec<f64>, Vec<f64>)> = const { RefCell::new((Vec::new(), Vec::new())) };
}

/// Left operand Ã (rows of C × k).
#[derive(Clone, Copy)]
enum LeftSrc<'a> {
    Plain(MatRef<'a>),
    /// `[A(:, idx) | B(:, idx)]`
    Pair { a: MatRef<'a>, b: MatRef<'a>, idx: &'a [usize] },
}

/// Right operand B̃ (k × columns of C).
#[derive(Clone, Copy)]
enum RightSrc<'a> {
    /// `T·b` for b k×q, T given by `tau`.
    Tridiag { b: MatRef<'a>, tau: &'a [f64] },
    /// `[B(:, idx)ᵀ ; −A(:, idx)ᵀ]`
    PairT { a: MatRef<'a>, b: MatRef<'a>, idx: &'a [usize] },
}

impl LeftSrc<'_> {
    fn k(&self) -> usize {
        match self {
            LeftSrc::Plain(a) => a.ncols(),
            LeftSrc::Pair { idx, .. } => 2 * idx.len(),
        }
    }

    /// Packs rows `i0..i0+mb` × inner `p0..p0+kb` into MR-row micro-panels.
    fn pack(&self, dst: &mut [f64], i0: usize, mb: usize, p0: usize, kb: usize) {
        match *self {
            LeftSrc::Plain(a) => pack_left(dst, i0, mb, p0, kb, |i, p| a.get(i, p)),
            LeftSrc::Pair { a, b, idx } => {
                let h = idx.len();
                pack_left(
                    dst,
                    i0,
                    mb,
                    p0,
                    kb,
                    |i, p| if p < h { a.get(i, idx[p]) } else { b.get(i, idx[p - h]) },
                )
            }
        }
    }
}

#[inline(always)]
fn pack_left(dst: &mut [f64], i0: usize, mb: usize, p0: usize, kb: usize, f: impl Fn(usize, usize) -> f64) {
    for (t, panel) in dst.chunks_exact_mut(MR * kb).take(mb.div_ceil(MR)).enumerate() {
        let r0 = i0 + t * MR;
        let rows = MR.min(i0 + mb - r0);
        for p in 0..kb {
            let out = &mut panel[p * MR..(p + 1) * MR];
            for i in 0..rows {
                out[i] = f(r0 + i, p0 + p);
            }
            out[rows..].iter_mut().for_each(|v| *v = 0.0);
        }
    }
}

impl RightSrc<'_> {
    fn k(&self) -> usize {
        match self {
            RightSrc::Tridiag { b, .. } => b.nrows(),
            RightSrc::PairT { idx, .. } => 2 * idx.len(),
        }
    }

    /// Packs inner `p0..p0+kb` × columns `j0..j0+nb` into NR-column micro-panels.
    fn pack(&self, dst: &mut [f64], p0: usize, kb: usize, j0: usize, nb: usize) {
        match *self {
            RightSrc::Tridiag { b, tau } => {
                let k = b.nrows();
                pack_right(dst, p0, kb, j0, nb, |p, j| {
                    let lo = if p > 0 { tau[p - 1] * b.get(p - 1, j) } else { 0.0 };
                    let hi = if p + 1 < k { tau[p] * b.get(p + 1, j) } else { 0.0 };
                    lo - hi
                })
            }
            RightSrc::PairT { a, b, idx } => {
                let h = idx.len();
                pack_right(dst, p0, kb, j0, nb, |p, j| if p < h { b.get(j, idx[p]) } else { -a.get(j, idx[p - h]) })
            }
        }
    }
}

#[inline(always)]
fn pack_right(dst: &mut [f64], p0: usize, kb: usize, j0: usize, nb: usize, f: impl Fn(usize, usize) -> f64) {
    for (t, panel) in dst.chunks_exact_mut(NR * kb).take(nb.div_ceil(NR)).enumerate() {
        let c0 = j0 + t * NR;
        let cols = NR.min(j0 + nb - c0);
        for p in 0..kb {
            let out = &mut panel[p * NR..(p + 1) * NR];
            for j in 0..cols {
                out[j] = f(p0 + p, c0 + j);
            }
            out[cols..].iter_mut().for_each(|v| *v = 0.0);
        }
    }
}

fn scale(c: &mut MatMut<'_>, beta: f64, lower: bool) {
    if beta == 1.0 {
        return;
    }
    for j in 0..c.ncols() {
        let start = if lower { j + 1 } else { 0 };
        let col = c.col_mut(j);
        let start = start.min(col.len());
        if beta == 0.0 {
            col[start..].iter_mut().for_each(|v| *v = 0.0);
        } else {
            col[start..].iter_mut().for_each(|v| *v *= beta);
        }
    }
}

/// C += α·Ã·B̃ on the strictly-lower part (`lower`) or all of C.
fn packed_update(cfg: &KernelConfig, c: MatMut<'_>, alpha: f64, left: LeftSrc<'_>, right: RightSrc<'_>, lower: bool) {
    let (m, n, k) = (c.nrows(), c.ncols(), left.k());
    debug_assert_eq!(k, right.k());
    if alpha == 0.0 || k == 0 || m == 0 || n == 0 {
        return;
    }
    let bl = cfg.blocking.sanitized();
    let threads = rayon::current_num_threads().max(1);
    let parts = if threads > 1 && m * n >= 64 * 64 { (threads * 2).min(n.div_ceil(NR)) } else { 1 };
    if parts <= 1 {
        macro_loop(&bl, c, 0, alpha, left, right, lower);
        return;
    }
    let bounds = if lower { triangle_bounds(n, parts) } else { uniform_bounds(n, parts) };
    c.split_col_chunks(&bounds)
        .into_par_iter()
        .for_each(|(j0, chunk)| macro_loop(&bl, chunk, j0, alpha, left, right, lower));
}

/// Goto loop nest over C columns `j0 .. j0 + c.ncols()` (C holds all rows).
fn macro_loop(bl: &Blocking, mut c: MatMut<'_>, j0: usize, alpha: f64, left: LeftSrc<'_>, right: RightSrc<'_>, lower: bool) {
    let (m, w, k) = (c.nrows(), c.ncols(), left.k());
    let kc = bl.kc.min(k);
    let mc = bl.mc.min(m).div_ceil(MR) * MR;
    let nc = bl.nc.min(w).div_ceil(NR) * NR;
    let need_a = mc * kc;
    let need_b = kc * nc;
    PEAK_WORKSPACE.fetch_max(need_a + need_b, Ordering::Relaxed);
    PACK_BUFS.with(|bufs| {
        let mut bufs = bufs.borrow_mut();
        let (abuf, bbuf) = &mut *bufs;
        if abuf.len() < need_a {
            abuf.resize(need_a, 0.0);
        }
        if bbuf.len() < need_b {
            bbuf.resize(need_b, 0.0);
        }
        for jc in (0..w).step_by(nc) {
            let ncb = nc.min(w - jc);
            for pc in (0..k).step_by(kc) {
                let kcb = kc.min(k - pc);
                right.pack(bbuf, pc, kcb, j0 + jc, ncb);
                let row_start = if lower { (j0 + jc + 1).min(m) } else { 0 };
                for ic in (row_start..m).step_by(mc) {
                    let mcb = mc.min(m - ic);
                    left.pack(abuf, ic, mcb, pc, kcb);
                    for jr in (0..ncb).step_by(NR) {
                        let nrb = NR.min(ncb - jr);
                        let gj = j0 + jc + jr;
                        let bp = &bbuf[jr * kcb..(jr + NR) * kcb];
                        for ir in (0..mcb).step_by(MR) {
                            let mrb = MR.min(mcb - ir);
                            let gi = ic + ir;
                            if lower && gi + mrb <= gj + 1 {
                                continue;
                            }
                            let acc = tile_product(kcb, &abuf[ir * kcb..(ir + MR) * kcb], bp);
                            for jj in 0..nrb {
                                let col = c.col_mut(jc + jr + jj);
                                let diag = gj + jj;
                                for ii in 0..mrb {
                                    if !lower || gi + ii > diag {
                                        col[gi + ii] += alpha * acc[jj][ii];
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    });
}

fn check_tau(tau: &[f64], k: usize, who: &str) -> Result<()> {
    if tau.len() != k.saturating_sub(1) {
        return Err(dim(format!("{who}: T over {k} needs {} τ values, got {}", k.saturating_sub(1), tau.len())));
    }
    Ok(())
}

/// Explicit k×q matrix T·B (reference path only).
fn form_tb(b: MatRef<'_>, tau: &[f64]) -> Mat {
    let k = b.nrows();
    Mat::from_fn(k, b.ncols(), |p, j| {
        let lo = if p > 0 { tau[p - 1] * b.get(p - 1, j) } else { 0.0 };
        let hi = if p + 1 < k { tau[p] * b.get(p + 1, j) } else { 0.0 };
        lo - hi
    })
}

/// C += α·A·B with explicit B, column-axpy order (reference path only).
fn reference_update(c: &mut MatMut<'_>, alpha: f64, a: MatRef<'_>, b: &Mat, lower: bool) {
    let (m, n) = (c.nrows(), c.ncols());
    for j in 0..n {
        let start = if lower { j + 1 } else { 0 };
        let col = c.col_mut(j);
        for p in 0..a.ncols() {
            let s = alpha * b[(p, j)];
            if s == 0.0 {
                continue;
            }
            if a.is_col_major() {
                let ac = a.col(p);
                for i in start..m {
                    col[i] += ac[i] * s;
                }
            } else {
                for i in start..m {
                    col[i] += a.get(i, p) * s;
                }
            }
        }
    }
}

/// Lower triangle of C := β·C + α·A·T·Aᵀ, C n×n, A n×k, T over k (`tau` has k − 1 entries).
pub fn skew_tridiag_rankk(cfg: &KernelConfig, mut c: MatMut<'_>, alpha: f64, a: MatRef<'_>, tau: &[f64], beta: f64) -> Result<()> {
    let n = c.nrows();
    if c.ncols() != n || a.nrows() != n {
        return Err(dim(format!("skew_tridiag_rankk: C {}×{}, A {}×{}", n, c.ncols(), a.nrows(), a.ncols())));
    }
    check_tau(tau, a.ncols(), "skew_tridiag_rankk")?;
    scale(&mut c, beta, true);
    if alpha == 0.0 || a.ncols() == 0 {
        return Ok(());
    }
    if cfg.fused_l3 {
        packed_update(cfg, c, alpha, LeftSrc::Plain(a), RightSrc::Tridiag { b: a.t(), tau }, true);
    } else {
        let b = form_tb(a.t(), tau);
        reference_update(&mut c, alpha, a, &b, true);
    }
    Ok(())
}

/// C := β·C + α·A·T·B, C p×q general, A p×k, B k×q.
#[allow(clippy::too_many_arguments)]
pub fn skew_tridiag_gemm(
    cfg: &KernelConfig,
    mut c: MatMut<'_>,
    alpha: f64,
    a: MatRef<'_>,
    tau: &[f64],
    b: MatRef<'_>,
    beta: f64,
) -> Result<()> {
    let (p, q, k) = (c.nrows(), c.ncols(), a.ncols());
    if a.nrows() != p || b.nrows() != k || b.ncols() != q {
        return Err(dim(format!(
            "skew_tridiag_gemm: C {p}×{q}, A {}×{k}, B {}×{}",
            a.nrows(),
            b.nrows(),
            b.ncols()
        )));
    }
    check_tau(tau, k, "skew_tridiag_gemm")?;
    scale(&mut c, beta, false);
    if alpha == 0.0 || k == 0 {
        return Ok(());
    }
    if cfg.fused_l3 {
        packed_update(cfg, c, alpha, LeftSrc::Plain(a), RightSrc::Tridiag { b, tau }, false);
    } else {
        let tb = form_tb(b, tau);
        reference_update(&mut c, alpha, a, &tb, false);
    }
    Ok(())
}

/// Lower triangle of C := β·C + α·(A·Bᵀ − B·Aᵀ), C n×n, A and B n×k.
/// All-zero columns of B (every other column of W = A·S) are skipped.
pub fn skew_rank2k(cfg: &KernelConfig, mut c: MatMut<'_>, alpha: f64, a: MatRef<'_>, b: MatRef<'_>, beta: f64) -> Result<()> {
    let n = c.nrows();
    if c.ncols() != n || a.nrows() != n || b.nrows() != n || a.ncols() != b.ncols() {
        return Err(dim(format!(
            "skew_rank2k: C {}×{}, A {}×{}, B {}×{}",
            n,
            c.ncols(),
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    scale(&mut c, beta, true);
    if alpha == 0.0 {
        return Ok(());
    }
    if cfg.fused_l3 {
        let idx = nonzero_columns(b);
        packed_update(cfg, c, alpha, LeftSrc::Pair { a, b, idx: &idx }, RightSrc::PairT { a, b, idx: &idx }, true);
    } else {
        for j in 0..n {
            let col = c.col_mut(j);
            for p in 0..a.ncols() {
                let (bj, aj) = (alpha * b.get(j, p), alpha * a.get(j, p));
                for i in j + 1..n {
                    col[i] += a.get(i, p) * bj - b.get(i, p) * aj;
                }
            }
        }
    }
    Ok(())
}

/// Indices of the columns of `b` containing a nonzero entry.
pub(crate) fn nonzero_columns(b: MatRef<'_>) -> Vec<usize> {
    (0..b.ncols()).filter(|&p| (0..b.nrows()).any(|i| b.get(i, p) != 0.0)).collect()
}

/// W = A·S for A with `s.m` columns; columns 0, 2, 4, … of W are zero.
pub fn form_w(a: MatRef<'_>, s: &SSplitting) -> Result<Mat> {
    if a.ncols() != s.m {
        return Err(dim(format!("form_w: A has {} columns, S is {}×{}", a.ncols(), s.m, s.m)));
    }
    let mut w = Mat::zeros(a.nrows(), s.m);
    for &(r, c, v) in &s.entries {
        if v == 0.0 {
            continue;
        }
        for i in 0..a.nrows() {
            w[(i, c)] += a.get(i, r) * v;
        }
    }
    Ok(w)
}
