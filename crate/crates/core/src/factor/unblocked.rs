//! Unblocked right-looking, left-looking and two-step drivers, and the
//! panel-restricted forms used inside the blocked drivers.

use super::{FactorOptions, Factorization, FirstColumnMode, PanelVariant, Variant, Work};
use crate::error::{dim, Error, Result};
use crate::skewcore::flops::{FlopCounter, KernelCall, Scope};
use crate::skewcore::SkewMatrix;

/// Reduces columns `k..e` (computing τ_k..τ_{e−1} and L columns k+1..=e).
///
/// When `e` is the last column (m − 1) every update reaches the whole trailing
/// matrix; otherwise updates are confined to the panel columns k..e, leaving
/// everything right of the panel to the caller. Interchanges touch rows of
/// stored columns `≥ col_floor` only.
pub(crate) fn panel(
    w: &mut Work,
    k: usize,
    e: usize,
    variant: PanelVariant,
    mode: FirstColumnMode,
    col_floor: usize,
    scope: Scope,
) -> Result<()> {
    let m = w.m();
    let e = e.min(w.nred());
    if k >= e {
        return Ok(());
    }
    let restrict = if e >= w.nred() { None } else { Some(e) };
    let unapplied = mode == FirstColumnMode::Unapplied && k >= 1;
    match variant {
        PanelVariant::Ll => {
            let lcol0 = if unapplied { k } else { k + 1 };
            for c in k..e {
                w.ll_update_column(c, lcol0, scope)?;
                w.reduce_column(c, col_floor)?;
            }
        }
        PanelVariant::Rl => {
            if unapplied {
                pre_apply(w, k, restrict, scope)?;
            }
            for c in k..e {
                w.reduce_column(c, col_floor)?;
                if c + 2 < m {
                    let l = w.col_below(c, c + 2);
                    let y = w.col_below(c + 1, c + 2);
                    w.skew_update(c + 2, restrict, &l, &y, scope)?;
                }
            }
        }
        PanelVariant::TwoStep => {
            if unapplied {
                pre_apply(w, k, restrict, scope)?;
            }
            let mut c = k;
            while c < e {
                w.reduce_column(c, col_floor)?;
                if c + 1 < e {
                    // Column c + 1 is untouched by the transform just computed
                    // (its pivot entry χ_22 is zero), so reduce it right away.
                    w.reduce_column(c + 1, col_floor)?;
                    if c + 3 < m {
                        let l = w.col_below(c, c + 2);
                        let l2 = w.col_below(c + 1, c + 3);
                        let y_old = w.col_below(c + 2, c + 3);
                        if restrict.is_none_or(|e| c + 2 < e) {
                            let t1 = w.tau[c + 1];
                            for (t, i) in (c + 3..m).enumerate() {
                                *w.x.raw_mut(i, c + 2) += t1 * (l[t + 1] - l[0] * l2[t]);
                            }
                            w.flops.panel += 4 * (m - c - 3) as u64;
                        }
                        // Both transforms on X[c+3.., c+3..] collapse into one skew rank-2.
                        w.skew_update(c + 3, restrict, &l2, &y_old, scope)?;
                    }
                }
                c += 2;
            }
        }
    }
    Ok(())
}

/// Applies the pending transform of L column k (stored column k − 1) to the
/// columns right of column k.
fn pre_apply(w: &mut Work, k: usize, restrict: Option<usize>, scope: Scope) -> Result<()> {
    if k + 1 >= w.m() {
        return Ok(());
    }
    let l = w.col_below(k - 1, k + 1);
    let y = w.col_below(k, k + 1);
    w.skew_update(k + 1, restrict, &l, &y, scope)
}

pub(crate) fn run(w: &mut Work, variant: PanelVariant) -> Result<()> {
    let e = w.nred();
    panel(w, 0, e, variant, FirstColumnMode::Applied, 0, Scope::Trailing)
}

fn unblocked(x: &SkewMatrix, variant: Variant, pivot: bool) -> Result<Factorization> {
    super::factor(x, &FactorOptions::new(variant, pivot))
}

/// Right-looking (modified Parlett–Reid): about 2m³/3 flops.
pub fn ltlt_unb_rl(x: &SkewMatrix, pivot: bool) -> Result<Factorization> {
    unblocked(x, Variant::UnbRl, pivot)
}

/// Left-looking (modified Aasen): about m³/3 flops. `first_column`, when
/// given, is the whole first column of L (leading entry 1); its Gauss
/// transform is applied up front and the standard loop runs on the result.
pub fn ltlt_unb_ll(x: &SkewMatrix, pivot: bool, first_column: Option<&[f64]>) -> Result<Factorization> {
    let Some(first) = first_column else {
        return unblocked(x, Variant::UnbLl, pivot);
    };
    let m = x.dim();
    if first.len() != m || (m > 0 && first[0] != 1.0) {
        return Err(dim(format!("first column must have length {m} and a leading 1")));
    }
    let opts = FactorOptions::new(Variant::UnbLl, pivot);
    let mut w = Work::new(x, pivot, &opts);
    if m >= 2 {
        let l = first[1..].to_vec();
        let y = w.col_below(0, 1);
        w.skew_update(1, None, &l, &y, Scope::Trailing)?;
        w.first = Some(l);
    }
    run(&mut w, PanelVariant::Ll)?;
    Ok(w.finish())
}

/// Two columns per iteration: about m³/3 flops, all of L and T computed.
pub fn ltlt_unb_twostep(x: &SkewMatrix, pivot: bool) -> Result<Factorization> {
    unblocked(x, Variant::UnbTwoStep, pivot)
}

/// Output of a stand-alone panel factorization.
#[derive(Clone, Debug, PartialEq)]
pub struct PanelResult {
    /// τ_start .. τ_{end−1}.
    pub tau: Vec<f64>,
    /// Relative pivots for positions start+1 ..= end (empty when unpivoted).
    pub pivots: Vec<usize>,
    pub flops: FlopCounter,
    pub trace: Vec<KernelCall>,
}

/// Factors the `width` columns starting at `start` of the working matrix `x`
/// (which holds the state left by earlier columns), updating only the panel.
/// Pivoting requires the left-looking variant.
pub fn ltlt_unb_panel(
    x: &mut SkewMatrix,
    start: usize,
    width: usize,
    variant: PanelVariant,
    pivot: bool,
    mode: FirstColumnMode,
) -> Result<PanelResult> {
    if pivot && variant != PanelVariant::Ll {
        return Err(Error::InvalidVariant("a pivoted panel must be left-looking".into()));
    }
    let opts = FactorOptions::new(Variant::UnbLl, pivot);
    let mut w = Work::new(x, pivot, &opts);
    let e = (start + width).min(w.nred());
    panel(&mut w, start, e, variant, mode, 0, Scope::Panel)?;
    let tau = w.tau.get(start..e.max(start)).unwrap_or(&[]).to_vec();
    let pivots = if pivot { w.piv[start + 1..=e.max(start)].to_vec() } else { Vec::new() };
    *x = w.x;
    Ok(PanelResult { tau, pivots, flops: w.flops, trace: w.trace })
}
