//! Pfaffians and linear solves built on the pivoted factorization.

use crate::error::{dim, Error, Result};
use crate::factor::{factor, FactorOptions, Factorization};
use crate::skewcore::{Mat, SkewMatrix};
use rayon::prelude::*;

/// Pf(X) from a factorization P·X·Pᵀ = L·T·Lᵀ: det(P)·Pf(T) with
/// Pf(T) = ∏_r (−τ_{2r}) and Pf([[0, a], [−a, 0]]) = a. Zero for odd m.
pub fn pfaffian_from(f: &Factorization) -> f64 {
    let m = f.t.dim();
    if m % 2 == 1 {
        return 0.0;
    }
    let pf: f64 = (0..m / 2).map(|r| -f.t.tau[2 * r]).product();
    if f.p.nontrivial() % 2 == 1 {
        -pf
    } else {
        pf
    }
}

/// Pfaffian computed with the given factorization options.
pub fn pfaffian_with(x: &SkewMatrix, opts: &FactorOptions) -> Result<f64> {
    if x.dim() % 2 == 1 {
        return Ok(0.0);
    }
    Ok(pfaffian_from(&factor(x, opts)?))
}

/// Pfaffian via the default pivoted blocked factorization.
pub fn pfaffian(x: &SkewMatrix) -> f64 {
    pfaffian_with(x, &FactorOptions::default()).expect("pivoted factorization cannot break down")
}

/// Solves X·Y = B for every column of `b`, factoring X once (pivoted).
pub fn solve(x: &SkewMatrix, b: &Mat) -> Result<Mat> {
    let f = factor(x, &FactorOptions::default())?;
    solve_factored(&f, b)
}

pub fn solve_vec(x: &SkewMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let bm = Mat { nrows: b.len(), ncols: 1, data: b.to_vec() };
    Ok(solve(x, &bm)?.data)
}

/// Solves with an existing factorization: permute, unit-lower solve,
/// tridiagonal solve with partial pivoting, unit-upper solve, permute back.
/// Right-hand sides are processed in parallel.
pub fn solve_factored(f: &Factorization, b: &Mat) -> Result<Mat> {
    let m = f.t.dim();
    if b.nrows != m {
        return Err(dim(format!("right-hand side has {} rows, matrix is {m}×{m}", b.nrows)));
    }
    let tmax = f.t.tau.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let tol = 10.0 * f64::EPSILON * tmax;
    let mut out = b.clone();
    if m == 0 {
        return Ok(out);
    }
    out.data.par_chunks_mut(m).try_for_each(|col| solve_one(f, col, tol))?;
    Ok(out)
}

fn solve_one(f: &Factorization, y: &mut [f64], tol: f64) -> Result<()> {
    let m = y.len();
    let l = &f.l;
    f.p.apply_to(y, true);
    for j in 0..m {
        let yj = y[j];
        if yj != 0.0 {
            for (i, yi) in y.iter_mut().enumerate().skip(j + 1) {
                *yi -= l.get(i, j) * yj;
            }
        }
    }
    let v = tridiag_solve(&f.t.tau, y, tol)?;
    y.copy_from_slice(&v);
    for j in (0..m).rev() {
        let mut s = y[j];
        for (i, &yi) in y.iter().enumerate().skip(j + 1) {
            s -= l.get(i, j) * yi;
        }
        y[j] = s;
    }
    f.p.apply_to(y, false);
    Ok(())
}

/// Gaussian elimination with partial pivoting on the skew tridiagonal T
/// (zero diagonal, subdiagonal τ, superdiagonal −τ).
fn tridiag_solve(tau: &[f64], b: &[f64], tol: f64) -> Result<Vec<f64>> {
    let n = b.len();
    let mut b = b.to_vec();
    let mut d = vec![0.0f64; n];
    let mut dl: Vec<f64> = tau.to_vec();
    let mut du: Vec<f64> = tau.iter().map(|t| -t).collect();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    for i in 0..n.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            if d[i].abs() <= tol || d[i] == 0.0 {
                return Err(Error::SingularT { row: i });
            }
            let fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            b[i + 1] -= fact * b[i];
            dl[i] = 0.0;
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du2[i];
            }
            du[i] = temp;
            let bi = b[i];
            b[i] = b[i + 1];
            b[i + 1] = bi - fact * b[i + 1];
        }
    }
    if d[n - 1].abs() <= tol || d[n - 1] == 0.0 {
        return Err(Error::SingularT { row: n - 1 });
    }
    let mut xs = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        if i + 1 < n {
            s -= du[i] * xs[i + 1];
        }
        if i + 2 < n {
            s -= du2[i] * xs[i + 2];
        }
        xs[i] = s / d[i];
    }
    Ok(xs)
}
