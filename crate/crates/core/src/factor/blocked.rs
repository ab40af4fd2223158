//! Blocked drivers: right-looking Variant 1, fused Variants 2a/2b, blocked
//! left-looking and the rank-2k (two-step) path, each optionally pivoted.

use super::{FactorOptions, Factorization, FirstColumnMode, PanelVariant, Trailing, Variant, Work};
use super::unblocked::panel;
use crate::error::{Error, Result};
use crate::skewcore::flops::{cost, Kernel, Scope};
use crate::skewcore::SkewMatrix;
use crate::kernels;

fn check_panel(w: &Work, pv: PanelVariant) -> Result<()> {
    if w.pivot && pv != PanelVariant::Ll {
        return Err(Error::InvalidVariant("pivoted blocked factorizations need a left-looking panel".into()));
    }
    Ok(())
}

/// Variant 1: panel in the fully-applied state, sandwiched rank-k update of
/// the trailing matrix with the panel's L columns, then one skew rank-2 for
/// the transform of the panel's last L column.
pub(crate) fn var1(w: &mut Work, b: usize, pv: PanelVariant) -> Result<()> {
    check_panel(w, pv)?;
    let nred = w.nred();
    let mut k = 0;
    while k < nred {
        let e = (k + b).min(nred);
        let floor = k;
        panel(w, k, e, pv, FirstColumnMode::Applied, floor, Scope::Panel)?;
        w.apply_deferred_pivots(k, e, floor)?;
        let s = e;
        if s < nred {
            w.trailing_sandwich(s, k, s, Scope::Trailing)?;
            let l = w.col_below(s - 1, s + 1);
            let y = w.col_below(s, s + 1);
            w.skew_update(s + 1, None, &l, &y, Scope::Trailing)?;
        }
        k = e;
    }
    Ok(())
}

/// Variants 2a/2b: the transform of a panel's last L column is never applied
/// on its own; it is folded into the next trailing rank-k update (b + 1
/// columns of L) and into the next panel. 2b first reduces column 0 by itself
/// so every block starts in that deferred state.
pub(crate) fn var2(w: &mut Work, b: usize, pv: PanelVariant, shifted: bool, trailing: Trailing) -> Result<()> {
    check_panel(w, pv)?;
    let nred = w.nred();
    let mut k = 0;
    if shifted && nred > 0 {
        w.reduce_column(0, 0)?;
        if nred == 1 {
            return Ok(());
        }
        k = 1;
    }
    while k < nred {
        let e = (k + b).min(nred);
        let (mode, c0) = if k == 0 { (FirstColumnMode::Applied, 0) } else { (FirstColumnMode::Unapplied, k - 1) };
        panel(w, k, e, pv, mode, c0, Scope::Panel)?;
        w.apply_deferred_pivots(k, e, c0)?;
        let s = e;
        if s < nred {
            match trailing {
                Trailing::Sandwich => w.trailing_sandwich(s, c0, s, Scope::Trailing)?,
                Trailing::Rank2k => w.trailing_rank2k(s, c0, s, Scope::Trailing)?,
            }
        }
        k = e;
    }
    Ok(())
}

/// Blocked left-looking: each panel is first brought up to date from all
/// previously computed L columns (a rank-k on its top square and a general
/// sandwiched product below), then factored; the trailing matrix is never
/// touched. No pivoted form exists.
pub(crate) fn left(w: &mut Work, b: usize, pv: PanelVariant) -> Result<()> {
    if w.pivot {
        return Err(Error::PivotUnsupported);
    }
    let nred = w.nred();
    let m = w.m();
    let cfg = w.cfg;
    let mut k = 0;
    while k < nred {
        let e = (k + b).min(nred);
        if k >= 2 {
            let tau: Vec<f64> = w.tau[1..k].to_vec();
            let wd = e - k;
            {
                let (lft, rgt) = w.x.view_mut().split_cols(k);
                let a_all = lft.into_ref();
                let a_top = a_all.sub(k, 0, wd, k);
                let c = rgt.sub_mut(k, 0, wd, wd);
                kernels::skew_tridiag_rankk(&cfg, c, -1.0, a_top, &tau, 1.0)?;
            }
            w.record_call(Kernel::SkewTridiagRankK, Scope::Panel, wd, wd, k, cost::skew_tridiag_rankk(wd, k));
            if e < m {
                {
                    let (lft, rgt) = w.x.view_mut().split_cols(k);
                    let a_all = lft.into_ref();
                    let a_top = a_all.sub(k, 0, wd, k);
                    let a_bot = a_all.sub(e, 0, m - e, k);
                    let c = rgt.sub_mut(e, 0, m - e, wd);
                    kernels::skew_tridiag_gemm(&cfg, c, -1.0, a_bot, &tau, a_top.t(), 1.0)?;
                }
                w.record_call(Kernel::SkewTridiagGemm, Scope::Panel, m - e, wd, k, cost::skew_tridiag_gemm(m - e, wd, k));
            }
        }
        let mode = if k == 0 { FirstColumnMode::Applied } else { FirstColumnMode::Unapplied };
        panel(w, k, e, pv, mode, 0, Scope::Panel)?;
        k = e;
    }
    Ok(())
}

fn blocked(x: &SkewMatrix, variant: Variant, b: usize, pv: PanelVariant, pivot: bool) -> Result<Factorization> {
    let opts = FactorOptions { variant, pivot, block: b, panel: pv, ..FactorOptions::default() };
    super::factor(x, &opts)
}

pub fn ltlt_blk_var1(x: &SkewMatrix, b: usize, pv: PanelVariant) -> Result<Factorization> {
    blocked(x, Variant::BlkVar1, b, pv, false)
}

pub fn ltlt_blk_var2a(x: &SkewMatrix, b: usize, pv: PanelVariant) -> Result<Factorization> {
    blocked(x, Variant::BlkVar2a, b, pv, false)
}

pub fn ltlt_blk_var2b(x: &SkewMatrix, b: usize, pv: PanelVariant) -> Result<Factorization> {
    blocked(x, Variant::BlkVar2b, b, pv, false)
}

pub fn ltlt_blk_left(x: &SkewMatrix, b: usize) -> Result<Factorization> {
    blocked(x, Variant::BlkLeft, b, PanelVariant::Ll, false)
}

pub fn ltlt_blk_twostep(x: &SkewMatrix, b: usize) -> Result<Factorization> {
    blocked(x, Variant::BlkTwoStep, b, PanelVariant::Ll, false)
}

/// Pivoted blocked factorization with a left-looking pivoted panel.
/// `fused` selects the driver; asking for the left-looking driver yields
/// [`Error::PivotUnsupported`].
pub fn ltlt_blk_piv(x: &SkewMatrix, b: usize, fused: Variant) -> Result<Factorization> {
    match fused {
        Variant::BlkVar1 | Variant::BlkVar2a | Variant::BlkVar2b | Variant::BlkTwoStep => {
            blocked(x, fused, b, PanelVariant::Ll, true)
        }
        Variant::BlkLeft => Err(Error::PivotUnsupported),
        other => Err(Error::InvalidVariant(format!("{other} is not a blocked driver"))),
    }
}
