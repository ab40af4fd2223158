//! Slow, obviously-correct references: dense products, exact rational
//! elimination, brute-force Pfaffians, determinants and the flop model.

use crate::error::{Error, Result};
use crate::skewcore::{Mat, SkewMatrix};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use std::ops::Neg;

pub type Rational = BigRational;
/// Dense rational matrix, row-major `r[i][j]`.
pub type RMat = Vec<Vec<Rational>>;

/// Naive (A·T)·B.
pub fn dense_sandwich(a: &Mat, t: &Mat, b: &Mat) -> Mat {
    a.matmul(t).matmul(b)
}

/// Exact conversion of a finite double.
pub fn rat(v: f64) -> Rational {
    BigRational::from_float(v).expect("finite value")
}

pub fn rat_int(v: i64) -> Rational {
    BigRational::from_integer(BigInt::from(v))
}

/// The implicit full matrix, exactly.
pub fn rational_dense(x: &SkewMatrix) -> RMat {
    let m = x.dim();
    (0..m).map(|i| (0..m).map(|j| rat(x.get(i, j))).collect()).collect()
}

/// Exact factorization: unit lower L (first column e_0), τ, and pivots
/// (length m, π_0 = 0; empty without pivoting).
#[derive(Clone, Debug, PartialEq)]
pub struct ExactFactorization {
    pub l: RMat,
    pub tau: Vec<Rational>,
    pub pivots: Vec<usize>,
}

/// Right-looking elimination on the full dense matrix in rational arithmetic:
/// at step c, τ_c = χ_21, l_32 = x_31/χ_21 and X_33 += l_32 x_32ᵀ − x_32 l_32ᵀ.
pub fn gauss_elim_exact(x: &SkewMatrix, pivot: bool) -> Result<ExactFactorization> {
    let m = x.dim();
    let mut a = rational_dense(x);
    let mut l: RMat = (0..m).map(|i| (0..m).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect();
    let mut tau = vec![Rational::zero(); m.saturating_sub(1)];
    let mut pivots = if pivot { vec![0; m] } else { Vec::new() };
    for c in 0..m.saturating_sub(1) {
        if pivot {
            let mut r = c + 1;
            for i in c + 2..m {
                if a[i][c].abs() > a[r][c].abs() {
                    r = i;
                }
            }
            if r != c + 1 {
                a.swap(c + 1, r);
                for row in a.iter_mut() {
                    row.swap(c + 1, r);
                }
                for j in 1..=c {
                    let t = l[c + 1][j].clone();
                    l[c + 1][j] = l[r][j].clone();
                    l[r][j] = t;
                }
            }
            pivots[c + 1] = r - (c + 1);
        }
        let chi = a[c + 1][c].clone();
        tau[c] = chi.clone();
        if chi.is_zero() {
            if (c + 2..m).any(|i| !a[i][c].is_zero()) {
                return Err(Error::ZeroPivot { column: c });
            }
            continue;
        }
        let lv: Vec<Rational> = (c + 2..m).map(|i| &a[i][c] / &chi).collect();
        for (t, i) in (c + 2..m).enumerate() {
            l[i][c + 1] = lv[t].clone();
        }
        let x32: Vec<Rational> = (c + 2..m).map(|i| a[i][c + 1].clone()).collect();
        for (ti, i) in (c + 2..m).enumerate() {
            for (tj, j) in (c + 2..m).enumerate() {
                let upd = &lv[ti] * &x32[tj] - &x32[ti] * &lv[tj];
                a[i][j] += upd;
            }
            a[i][c] = Rational::zero();
            a[c][i] = Rational::zero();
        }
    }
    Ok(ExactFactorization { l, tau, pivots })
}

/// Pᵀ·L·T·Lᵀ·P in exact arithmetic.
pub fn reconstruct_exact(f: &ExactFactorization) -> RMat {
    let m = f.l.len();
    let t = |i: usize, j: usize| -> Rational {
        if i == j + 1 {
            f.tau[j].clone()
        } else if j == i + 1 {
            -f.tau[i].clone()
        } else {
            Rational::zero()
        }
    };
    let mut lt = vec![vec![Rational::zero(); m]; m];
    for i in 0..m {
        for j in 0..m {
            for q in j.saturating_sub(1)..(j + 2).min(m) {
                lt[i][j] += &f.l[i][q] * t(q, j);
            }
        }
    }
    let mut prod = vec![vec![Rational::zero(); m]; m];
    for i in 0..m {
        for j in 0..m {
            for q in 0..m {
                prod[i][j] += &lt[i][q] * &f.l[j][q];
            }
        }
    }
    let mut perm: Vec<usize> = (0..m).collect();
    for (k, &p) in f.pivots.iter().enumerate() {
        perm.swap(k, k + p);
    }
    let mut out = vec![vec![Rational::zero(); m]; m];
    for i in 0..m {
        for j in 0..m {
            out[perm[i]][perm[j]] = prod[i][j].clone();
        }
    }
    out
}

/// Signed sum over perfect matchings, expanding along the first row, with
/// Pf([[0, a], [−a, 0]]) = a. Odd dimension gives 0.
pub fn pfaffian_bruteforce_generic<T>(a: &[Vec<T>]) -> T
where
    T: Clone + Num + Neg<Output = T>,
{
    fn rec<T: Clone + Num + Neg<Output = T>>(a: &[Vec<T>], idx: &[usize]) -> T {
        if idx.is_empty() {
            return T::one();
        }
        if idx.len() % 2 == 1 {
            return T::zero();
        }
        let first = idx[0];
        let mut sum = T::zero();
        for (t, &j) in idx.iter().enumerate().skip(1) {
            let v = a[first][j].clone();
            if v.is_zero() {
                continue;
            }
            let rest: Vec<usize> = idx.iter().copied().filter(|&q| q != first && q != j).collect();
            let term = v * rec(a, &rest);
            sum = if t % 2 == 1 { sum + term } else { sum - term };
        }
        sum
    }
    let idx: Vec<usize> = (0..a.len()).collect();
    rec(a, &idx)
}

pub fn pfaffian_bruteforce(x: &SkewMatrix) -> f64 {
    let d = x.to_dense();
    let rows: Vec<Vec<f64>> = (0..x.dim()).map(|i| (0..x.dim()).map(|j| d[(i, j)]).collect()).collect();
    pfaffian_bruteforce_generic(&rows)
}

pub fn pfaffian_bruteforce_exact(x: &SkewMatrix) -> Rational {
    pfaffian_bruteforce_generic(&rational_dense(x))
}

/// Pf(T)·det(P) from an exact factorization.
pub fn pfaffian_exact(f: &ExactFactorization) -> Rational {
    let m = f.l.len();
    if m % 2 == 1 {
        return Rational::zero();
    }
    let mut pf = Rational::one();
    for r in 0..m / 2 {
        pf *= -f.tau[2 * r].clone();
    }
    if f.pivots.iter().filter(|&&p| p != 0).count() % 2 == 1 {
        pf = -pf;
    }
    pf
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det_dense(a: &Mat) -> f64 {
    let n = a.nrows;
    let mut m = a.clone();
    let mut det = 1.0;
    for c in 0..n {
        let r = (c..n).max_by(|&i, &j| m[(i, c)].abs().total_cmp(&m[(j, c)].abs())).unwrap();
        if m[(r, c)] == 0.0 {
            return 0.0;
        }
        if r != c {
            for j in 0..n {
                let t = m[(r, j)];
                m[(r, j)] = m[(c, j)];
                m[(c, j)] = t;
            }
            det = -det;
        }
        let p = m[(c, c)];
        det *= p;
        for i in c + 1..n {
            let f = m[(i, c)] / p;
            for j in c..n {
                let v = m[(c, j)];
                m[(i, j)] -= f * v;
            }
        }
    }
    det
}

/// Leading-order flop count of a factorization variant (`b` is the block size).
pub fn flop_model(variant: &str, m: usize, b: usize) -> Result<f64> {
    let m3 = (m as f64).powi(3);
    let _ = b;
    match variant {
        "unb-rl" => Ok(2.0 * m3 / 3.0),
        "unb-ll" | "unb-2step" | "blk-var1" | "blk-var2a" | "blk-var2b" | "blk-left" | "blk-2step" => Ok(m3 / 3.0),
        other => Err(Error::InvalidVariant(format!("no flop model for {other:?}"))),
    }
}

/// A breakdown-free integer instance whose factorization is exactly
/// representable in binary floating point: X = 16·L·T·Lᵀ with L entries in
/// {k/4 : |k| ≤ 4} (first column e_0) and τ ∈ {±1, ±2, ±4}. Returns X and
/// the exact factors (τ already scaled by 16).
pub fn exact_instance(m: usize, seed: u64) -> (SkewMatrix, ExactFactorization) {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut l: RMat = vec![vec![Rational::zero(); m]; m];
    for (i, row) in l.iter_mut().enumerate() {
        row[i] = Rational::one();
        for (j, v) in row.iter_mut().enumerate().take(i).skip(1) {
            let _ = j;
            *v = Rational::new(BigInt::from(rng.random_range(-4i64..=4)), BigInt::from(4));
        }
    }
    let choices = [1i64, 2, 4];
    let tau: Vec<Rational> = (0..m.saturating_sub(1))
        .map(|_| {
            let v = choices[rng.random_range(0..3)] * if rng.random::<bool>() { 1 } else { -1 };
            rat_int(16 * v)
        })
        .collect();
    let f = ExactFactorization { l, tau, pivots: Vec::new() };
    let full = reconstruct_exact(&f);
    let x = SkewMatrix::from_lower_fn(m, |i, j| {
        let v = &full[i][j];
        assert!(v.is_integer(), "instance entries are integers");
        num_traits::ToPrimitive::to_f64(v).unwrap()
    });
    (x, f)
}
