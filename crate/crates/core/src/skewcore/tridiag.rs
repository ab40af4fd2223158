//! The skew-symmetric tridiagonal factor T and its splitting T = S − Sᵀ.

use super::view::Mat;

/// T with `T[i+1][i] = tau[i]`, `T[i][i+1] = −tau[i]`, zero elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewTridiagonal {
    m: usize,
    pub tau: Vec<f64>,
}

impl SkewTridiagonal {
    /// T of dimension `tau.len() + 1`.
    pub fn new(tau: Vec<f64>) -> Self {
        SkewTridiagonal { m: tau.len() + 1, tau }
    }

    /// T of dimension `m` (which may be 0) with the given subdiagonal.
    pub fn with_dim(m: usize, tau: Vec<f64>) -> Self {
        assert_eq!(tau.len(), m.saturating_sub(1), "τ must have m − 1 entries");
        SkewTridiagonal { m, tau }
    }

    pub fn zeros(m: usize) -> Self {
        SkewTridiagonal { m, tau: vec![0.0; m.saturating_sub(1)] }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j + 1 {
            self.tau[j]
        } else if j == i + 1 {
            -self.tau[i]
        } else {
            0.0
        }
    }

    pub fn to_dense(&self) -> Mat {
        let m = self.dim();
        Mat::from_fn(m, m, |i, j| self.get(i, j))
    }

    /// y = T·x, evaluated as `(T x)_i = τ_{i−1} x_{i−1} − τ_i x_{i+1}`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        tridiag_apply(&self.tau, x)
    }
}

pub(crate) fn tridiag_apply(tau: &[f64], x: &[f64]) -> Vec<f64> {
    let k = x.len();
    (0..k)
        .map(|i| {
            let lo = if i > 0 { tau[i - 1] * x[i - 1] } else { 0.0 };
            let hi = if i + 1 < k { tau[i] * x[i + 1] } else { 0.0 };
            lo - hi
        })
        .collect()
}

/// Sparse S with T = S − Sᵀ: `S[0][1] = −τ_0`, and for even rows `2r ≥ 2`,
/// `S[2r][2r−1] = τ_{2r−1}` and `S[2r][2r+1] = −τ_{2r}`; odd rows are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct SSplitting {
    pub m: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl SSplitting {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries.iter().find(|&&(r, c, _)| r == i && c == j).map_or(0.0, |e| e.2)
    }

    pub fn to_dense(&self) -> Mat {
        let mut s = Mat::zeros(self.m, self.m);
        for &(i, j, v) in &self.entries {
            s[(i, j)] = v;
        }
        s
    }
}

pub fn form_s_splitting(t: &SkewTridiagonal) -> SSplitting {
    let m = t.dim();
    let mut entries = Vec::new();
    for r in (0..m).step_by(2) {
        if r >= 1 {
            entries.push((r, r - 1, t.tau[r - 1]));
        }
        if r + 1 < m {
            entries.push((r, r + 1, -t.tau[r]));
        }
    }
    SSplitting { m, entries }
}
