//! X = L·T·Lᵀ factorization drivers.
//!
//! Working storage is the input matrix itself: as column c is reduced, τ_c
//! goes to an external vector, column c + 1 of L overwrites X[c+2.., c] and an
//! explicit 1 is written to X[c+1][c], so that stored columns c0..c1 form the
//! rows of L needed by the sandwiched updates without any special casing.

pub mod blocked;
pub mod unblocked;

pub use blocked::{ltlt_blk_left, ltlt_blk_piv, ltlt_blk_twostep, ltlt_blk_var1, ltlt_blk_var2a, ltlt_blk_var2b};
pub use unblocked::{ltlt_unb_ll, ltlt_unb_panel, ltlt_unb_rl, ltlt_unb_twostep, PanelResult};

use crate::error::{Error, Result};
use crate::kernels::{self, Blocking, KernelConfig};
use crate::skewcore::flops::{cost, FlopCounter, Kernel, KernelCall, Scope};
use crate::skewcore::perm::swap_symmetric;
use crate::skewcore::{PermutationVector, SkewMatrix, SkewTridiagonal, UnitLowerFactor};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    UnbRl,
    UnbLl,
    UnbTwoStep,
    BlkVar1,
    BlkVar2a,
    BlkVar2b,
    BlkLeft,
    BlkTwoStep,
}

impl Variant {
    pub const ALL: [Variant; 8] = [
        Variant::UnbRl,
        Variant::UnbLl,
        Variant::UnbTwoStep,
        Variant::BlkVar1,
        Variant::BlkVar2a,
        Variant::BlkVar2b,
        Variant::BlkLeft,
        Variant::BlkTwoStep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::UnbRl => "unb-rl",
            Variant::UnbLl => "unb-ll",
            Variant::UnbTwoStep => "unb-2step",
            Variant::BlkVar1 => "blk-var1",
            Variant::BlkVar2a => "blk-var2a",
            Variant::BlkVar2b => "blk-var2b",
            Variant::BlkLeft => "blk-left",
            Variant::BlkTwoStep => "blk-2step",
        }
    }

    pub fn is_blocked(self) -> bool {
        !matches!(self, Variant::UnbRl | Variant::UnbLl | Variant::UnbTwoStep)
    }

    /// Whether a pivoted form of this variant exists.
    pub fn supports_pivoting(self) -> bool {
        self != Variant::BlkLeft
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidVariant(format!("unknown variant {s:?}")))
    }
}

/// Unblocked algorithm used for the panels of a blocked driver.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PanelVariant {
    Rl,
    Ll,
    TwoStep,
}

/// Whether the Gauss transform of the column left of a panel has already been
/// applied to the matrix (`Applied`) or is still pending (`Unapplied`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FirstColumnMode {
    Applied,
    Unapplied,
}

/// Implementation switches; all on is the production configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Features {
    pub fused_l2: bool,
    pub parallel_l2: bool,
    /// τ in an external vector with explicit unit entries in L, enabling one
    /// fused trailing update; when off, the first trailing column is updated
    /// separately by a matrix-vector product followed by a smaller rank-k.
    pub external_t: bool,
    pub fused_l3: bool,
}

impl Default for Features {
    fn default() -> Self {
        Features { fused_l2: true, parallel_l2: true, external_t: true, fused_l3: true }
    }
}

impl Features {
    pub fn none() -> Self {
        Features { fused_l2: false, parallel_l2: false, external_t: false, fused_l3: false }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactorOptions {
    pub variant: Variant,
    pub pivot: bool,
    pub block: usize,
    pub panel: PanelVariant,
    pub features: Features,
    pub blocking: Blocking,
}

impl Default for FactorOptions {
    fn default() -> Self {
        FactorOptions {
            variant: Variant::BlkVar2b,
            pivot: true,
            block: 256,
            panel: PanelVariant::Ll,
            features: Features::default(),
            blocking: Blocking::default(),
        }
    }
}

impl FactorOptions {
    pub fn new(variant: Variant, pivot: bool) -> Self {
        FactorOptions { variant, pivot, ..Default::default() }
    }

    pub fn with_block(mut self, b: usize) -> Self {
        self.block = b;
        self
    }

    pub fn kernel_config(&self) -> KernelConfig {
        KernelConfig {
            fused_l2: self.features.fused_l2,
            parallel_l2: self.features.parallel_l2,
            fused_l3: self.features.fused_l3,
            blocking: self.blocking,
        }
    }
}

/// L, T and P with P·X̂·Pᵀ = L·T·Lᵀ, plus instrumentation.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub l: UnitLowerFactor,
    pub t: SkewTridiagonal,
    /// Empty when unpivoted; otherwise length m with π_0 = 0.
    pub p: PermutationVector,
    pub flops: FlopCounter,
    pub trace: Vec<KernelCall>,
}

pub type FactorizationResult = Factorization;

impl Factorization {
    pub fn residual(&self, original: &SkewMatrix) -> Result<f64> {
        crate::skewcore::relative_residual(original, &self.l, &self.t, &self.p)
    }
}

/// Factors `x` with the driver selected by `opts`.
pub fn factor(x: &SkewMatrix, opts: &FactorOptions) -> Result<Factorization> {
    if opts.pivot && !opts.variant.supports_pivoting() {
        return Err(Error::PivotUnsupported);
    }
    if opts.variant.is_blocked() && opts.block == 0 {
        return Err(Error::InvalidVariant("block size must be at least 1".into()));
    }
    let mut w = Work::new(x, opts.pivot, opts);
    match opts.variant {
        Variant::UnbRl => unblocked::run(&mut w, PanelVariant::Rl)?,
        Variant::UnbLl => unblocked::run(&mut w, PanelVariant::Ll)?,
        Variant::UnbTwoStep => unblocked::run(&mut w, PanelVariant::TwoStep)?,
        Variant::BlkVar1 => blocked::var1(&mut w, opts.block, opts.panel)?,
        Variant::BlkVar2a => blocked::var2(&mut w, opts.block, opts.panel, false, Trailing::Sandwich)?,
        Variant::BlkVar2b => blocked::var2(&mut w, opts.block, opts.panel, true, Trailing::Sandwich)?,
        Variant::BlkLeft => blocked::left(&mut w, opts.block, opts.panel)?,
        Variant::BlkTwoStep => blocked::var2(&mut w, opts.block, opts.panel, false, Trailing::Rank2k)?,
    }
    Ok(w.finish())
}

/// How the trailing matrix of a fused blocked driver is updated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Trailing {
    Sandwich,
    Rank2k,
}

/// Mutable factorization state shared by all drivers.
pub(crate) struct Work {
    pub x: SkewMatrix,
    pub tau: Vec<f64>,
    pub piv: Vec<usize>,
    pub pivot: bool,
    pub first: Option<Vec<f64>>,
    pub cfg: KernelConfig,
    pub external_t: bool,
    pub flops: FlopCounter,
    pub trace: Vec<KernelCall>,
}

impl Work {
    pub fn new(x: &SkewMatrix, pivot: bool, opts: &FactorOptions) -> Self {
        let m = x.dim();
        Work {
            x: x.clone(),
            tau: vec![0.0; m.saturating_sub(1)],
            piv: if pivot { vec![0; m] } else { Vec::new() },
            pivot,
            first: None,
            cfg: opts.kernel_config(),
            external_t: opts.features.external_t,
            flops: FlopCounter::default(),
            trace: Vec::new(),
        }
    }

    pub fn m(&self) -> usize {
        self.x.dim()
    }

    /// Number of columns with a τ: m − 1.
    pub fn nred(&self) -> usize {
        self.m().saturating_sub(1)
    }

    pub fn finish(self) -> Factorization {
        let m = self.x.dim();
        Factorization {
            l: UnitLowerFactor::from_factored(self.x, self.first),
            t: SkewTridiagonal::with_dim(m, self.tau),
            p: PermutationVector::new(self.piv),
            flops: self.flops,
            trace: self.trace,
        }
    }

    pub fn record_call(&mut self, kernel: Kernel, scope: Scope, rows: usize, cols: usize, inner: usize, flops: u64) {
        match kernel {
            Kernel::SkewRank2 | Kernel::GenRank2 | Kernel::SkewTridiagGemv => self.flops.level2 += flops,
            Kernel::SkewTridiagRankK | Kernel::SkewTridiagGemm | Kernel::SkewRank2K => self.flops.level3 += flops,
            Kernel::RowPivots => self.flops.pivot += flops,
        }
        self.trace.push(KernelCall { kernel, scope, rows, cols, inner, flops });
    }

    /// Symmetric interchange of a and b; rows of columns below `col_floor` are deferred.
    pub fn swap(&mut self, a: usize, b: usize, col_floor: usize) {
        if a == b {
            return;
        }
        let moved = swap_symmetric(&mut self.x.view_mut(), a, b, col_floor);
        self.flops.pivot += moved;
        if let Some(f) = self.first.as_mut() {
            f.swap(a - 1, b - 1);
        }
    }

    /// Finishes column c, whose entries X[c+1.., c] must be fully updated:
    /// optional pivot search and interchange, τ_c, column c + 1 of L, unit entry.
    pub fn reduce_column(&mut self, c: usize, col_floor: usize) -> Result<()> {
        let m = self.m();
        if self.pivot {
            let mut r = c + 1;
            let mut best = self.x.raw(c + 1, c).abs();
            for i in c + 2..m {
                let v = self.x.raw(i, c).abs();
                if v > best {
                    best = v;
                    r = i;
                }
            }
            self.swap(c + 1, r, col_floor);
            self.piv[c + 1] = r - (c + 1);
        }
        let chi = self.x.raw(c + 1, c);
        self.tau[c] = chi;
        if chi == 0.0 {
            if (c + 2..m).any(|i| self.x.raw(i, c) != 0.0) {
                return Err(Error::ZeroPivot { column: c });
            }
        } else {
            for i in c + 2..m {
                *self.x.raw_mut(i, c) /= chi;
            }
            self.flops.panel += (m - c - 2) as u64;
        }
        *self.x.raw_mut(c + 1, c) = 1.0;
        Ok(())
    }

    /// Column `c` of stored rows `r0..`.
    pub fn col_below(&self, c: usize, r0: usize) -> Vec<f64> {
        (r0..self.m()).map(|i| self.x.raw(i, c)).collect()
    }

    /// X[r0.., r0..] += l·yᵀ − y·lᵀ (vectors over rows r0..), restricted to
    /// columns r0..e when `e` is given: the square block as a skew rank-2 and
    /// the rectangle below it as a general rank-2.
    pub fn skew_update(&mut self, r0: usize, e: Option<usize>, l: &[f64], y: &[f64], scope: Scope) -> Result<()> {
        let m = self.m();
        if r0 >= m {
            return Ok(());
        }
        let n = m - r0;
        let cfg = self.cfg;
        match e {
            Some(e) if e < m => {
                let w = e.saturating_sub(r0);
                if w == 0 {
                    return Ok(());
                }
                let top = self.x.view_mut().sub_mut(r0, r0, w, w);
                kernels::skew_rank2(&cfg, top, 1.0, &l[..w], &y[..w], 1.0)?;
                let neg_l: Vec<f64> = l[..w].iter().map(|v| -v).collect();
                let bot = self.x.view_mut().sub_mut(r0 + w, r0, n - w, w);
                kernels::gen_rank2(&cfg, bot, 1.0, &l[w..], &y[..w], &y[w..], &neg_l, 1.0)?;
                self.record_call(Kernel::SkewRank2, scope, w, w, 2, cost::skew_rank2(w));
                self.record_call(Kernel::GenRank2, scope, n - w, w, 2, cost::gen_rank2(n - w, w));
            }
            _ => {
                let view = self.x.view_mut().sub_mut(r0, r0, n, n);
                kernels::skew_rank2(&cfg, view, 1.0, l, y, 1.0)?;
                self.record_call(Kernel::SkewRank2, scope, n, n, 2, cost::skew_rank2(n));
            }
        }
        Ok(())
    }

    /// Brings column c up to date from the left:
    /// X[c+1.., c] −= L[c+1.., lcol0..=c]·T(τ_lcol0..τ_{c−1})·L[c, lcol0..=c]ᵀ,
    /// reading L column j from stored column j − 1.
    pub fn ll_update_column(&mut self, c: usize, lcol0: usize, scope: Scope) -> Result<()> {
        let m = self.m();
        if c + 1 >= m || lcol0 > c || lcol0 == 0 {
            return Ok(());
        }
        let c0 = lcol0 - 1;
        let kdim = c - c0;
        let p = m - c - 1;
        let xrow: Vec<f64> = (c0..c).map(|j| self.x.raw(c, j)).collect();
        let tau = &self.tau[lcol0..c];
        let cfg = self.cfg;
        let (left, mut right) = self.x.view_mut().split_cols(c);
        let a = left.into_ref().sub(c + 1, c0, p, kdim);
        let y = &mut right.col_mut(0)[c + 1..];
        kernels::skew_tridiag_gemv(&cfg, y, -1.0, a, tau, &xrow, 1.0)?;
        self.record_call(Kernel::SkewTridiagGemv, scope, p, kdim, kdim, cost::skew_tridiag_gemv(p, kdim));
        Ok(())
    }

    /// X[s.., s..] −= A·T·Aᵀ with A = stored columns c0..c1 (L columns
    /// c0+1..=c1) and T over τ_{c0+1}..τ_{c1−1}.
    pub fn trailing_sandwich(&mut self, s: usize, c0: usize, c1: usize, scope: Scope) -> Result<()> {
        let m = self.m();
        let k = c1 - c0;
        if s >= m || k < 2 {
            return Ok(());
        }
        let cfg = self.cfg;
        let n = m - s;
        let tau: Vec<f64> = self.tau[c0 + 1..c1].to_vec();
        if self.external_t {
            {
                let (left, right) = self.x.view_mut().split_cols(s);
                let a = left.into_ref().sub(s, c0, n, k);
                let c = right.sub_mut(s, 0, n, n);
                kernels::skew_tridiag_rankk(&cfg, c, -1.0, a, &tau, 1.0)?;
            }
            self.record_call(Kernel::SkewTridiagRankK, scope, n, n, k, cost::skew_tridiag_rankk(n, k));
        } else {
            // Split form: first trailing column by a matrix-vector product whose
            // x holds row s of A (its unit entry made explicit in a temporary),
            // then the remaining square by a rank-k update one row/column smaller.
            let xrow: Vec<f64> = (c0..c1).map(|j| self.x.raw(s, j)).collect();
            {
                let (left, mut right) = self.x.view_mut().split_cols(s);
                let a = left.into_ref().sub(s + 1, c0, n - 1, k);
                kernels::skew_tridiag_gemv(&cfg, &mut right.col_mut(0)[s + 1..], -1.0, a, &tau, &xrow, 1.0)?;
            }
            self.record_call(Kernel::SkewTridiagGemv, scope, n - 1, k, k, cost::skew_tridiag_gemv(n - 1, k));
            if n > 1 {
                {
                    let (left, right) = self.x.view_mut().split_cols(s + 1);
                    let a = left.into_ref().sub(s + 1, c0, n - 1, k);
                    let c = right.sub_mut(s + 1, 0, n - 1, n - 1);
                    kernels::skew_tridiag_rankk(&cfg, c, -1.0, a, &tau, 1.0)?;
                }
                self.record_call(Kernel::SkewTridiagRankK, scope, n - 1, n - 1, k, cost::skew_tridiag_rankk(n - 1, k));
            }
        }
        Ok(())
    }

    /// X[s.., s..] −= A·T·Aᵀ as the skew rank-2k update A·Wᵀ − W·Aᵀ, W = A·S.
    pub fn trailing_rank2k(&mut self, s: usize, c0: usize, c1: usize, scope: Scope) -> Result<()> {
        let m = self.m();
        let k = c1 - c0;
        if s >= m || k < 2 {
            return Ok(());
        }
        let cfg = self.cfg;
        let n = m - s;
        let t = SkewTridiagonal::new(self.tau[c0 + 1..c1].to_vec());
        let split = crate::skewcore::form_s_splitting(&t);
        let knz;
        {
            let (left, right) = self.x.view_mut().split_cols(s);
            let a = left.into_ref().sub(s, c0, n, k);
            let w = kernels::form_w(a, &split)?;
            knz = kernels::level3::nonzero_columns(w.as_ref()).len();
            let c = right.sub_mut(s, 0, n, n);
            kernels::skew_rank2k(&cfg, c, 1.0, a, w.as_ref(), 1.0)?;
        }
        self.flops.panel += (n * split.entries.len()) as u64 * 2;
        self.record_call(Kernel::SkewRank2K, scope, n, n, k, cost::skew_rank2k(n, knz));
        Ok(())
    }

    /// Applies the deferred interchanges of a panel to rows k+1.. of stored
    /// columns 0..col_floor.
    pub fn apply_deferred_pivots(&mut self, k: usize, e: usize, col_floor: usize) -> Result<()> {
        if !self.pivot || col_floor == 0 {
            return Ok(());
        }
        let m = self.m();
        let p = PermutationVector::new(self.piv[k + 1..=e].to_vec());
        if p.nontrivial() == 0 {
            return Ok(());
        }
        let cfg = self.cfg;
        let block = self.x.view_mut().sub_mut(k + 1, 0, m - k - 1, col_floor);
        kernels::apply_row_pivots(&cfg, block, &p, 0, true)?;
        let moved = 2 * p.nontrivial() * col_floor;
        self.record_call(Kernel::RowPivots, Scope::Trailing, m - k - 1, col_floor, 0, moved as u64);
        Ok(())
    }
}
