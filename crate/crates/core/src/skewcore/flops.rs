//! Operation counting and kernel-call tracing.

/// Floating-point operations attributed to each class of work.
///
/// `pivot` counts stored entries moved by interchanges rather than flops, so
/// it is excluded from [`FlopCounter::total`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FlopCounter {
    pub level2: u64,
    pub level3: u64,
    pub panel: u64,
    pub pivot: u64,
}

impl FlopCounter {
    pub fn total(&self) -> u64 {
        self.level2 + self.level3 + self.panel
    }

    /// Fraction of counted flops performed by level-3 kernels.
    pub fn level3_share(&self) -> f64 {
        let t = self.total();
        if t == 0 {
            0.0
        } else {
            self.level3 as f64 / t as f64
        }
    }

    pub fn add(&mut self, other: &FlopCounter) {
        self.level2 += other.level2;
        self.level3 += other.level3;
        self.panel += other.panel;
        self.pivot += other.pivot;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kernel {
    SkewRank2,
    GenRank2,
    SkewTridiagGemv,
    SkewTridiagRankK,
    SkewTridiagGemm,
    SkewRank2K,
    RowPivots,
}

/// Whether a call updates the current panel or the trailing matrix beyond it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scope {
    Panel,
    Trailing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KernelCall {
    pub kernel: Kernel,
    pub scope: Scope,
    pub rows: usize,
    pub cols: usize,
    pub inner: usize,
    /// Flops charged for this call.
    pub flops: u64,
}

/// Flop counts of the individual kernels as charged by the drivers.
pub mod cost {
    /// Skew rank-2 update of an n×n lower triangle.
    pub fn skew_rank2(n: usize) -> u64 {
        let n = n as u64;
        2 * n * n.saturating_sub(1)
    }
    /// Rank-2 update of a p×q rectangle.
    pub fn gen_rank2(p: usize, q: usize) -> u64 {
        4 * (p * q) as u64
    }
    /// y += A·(T·x), A p×k.
    pub fn skew_tridiag_gemv(p: usize, k: usize) -> u64 {
        (2 * p * k + 3 * k) as u64
    }
    /// Lower triangle of A·T·Aᵀ, A n×k; T·Aᵀ is formed once while packing.
    pub fn skew_tridiag_rankk(n: usize, k: usize) -> u64 {
        (n * n.saturating_sub(1) * k + 3 * n * k) as u64
    }
    /// A·T·B, A p×k, B k×q.
    pub fn skew_tridiag_gemm(p: usize, q: usize, k: usize) -> u64 {
        (2 * p * q * k + 3 * q * k) as u64
    }
    /// Lower triangle of A·Bᵀ − B·Aᵀ where only `k_nonzero` columns of B are nonzero.
    pub fn skew_rank2k(n: usize, k_nonzero: usize) -> u64 {
        (2 * n * n.saturating_sub(1) * k_nonzero) as u64
    }
}
