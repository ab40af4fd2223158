//! BLAS-like kernels specialized to the skew-symmetric factorizations.

pub mod level2;
pub mod level3;
mod microkernel;

pub use level2::{apply_row_pivots, gen_rank2, skew_rank2, skew_tridiag_gemv};
pub use level3::{form_w, skew_rank2k, skew_tridiag_gemm, skew_tridiag_rankk, workspace_bound, Blocking};

/// Runtime switches selecting fused/parallel kernel implementations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KernelConfig {
    /// Single-pass, unroll-and-jammed level-2 loops (otherwise reference
    /// two-pass loops in the style of the plain BLAS routines).
    pub fused_l2: bool,
    /// Let level-2 kernels split work across the rayon pool.
    pub parallel_l2: bool,
    /// Fold the tridiagonal multiply into the packing of a blocked level-3
    /// kernel (otherwise B = T·Aᵀ is materialized and a reference loop runs).
    pub fused_l3: bool,
    pub blocking: Blocking,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig { fused_l2: true, parallel_l2: true, fused_l3: true, blocking: Blocking::default() }
    }
}

impl KernelConfig {
    /// Everything off: the reference configuration.
    pub fn naive() -> Self {
        KernelConfig { fused_l2: false, parallel_l2: false, fused_l3: false, blocking: Blocking::default() }
    }
}

/// Column boundaries splitting `n` lower-triangular columns (column j holding
/// `n − j` entries) into `parts` chunks of roughly equal work.
pub(crate) fn triangle_bounds(n: usize, parts: usize) -> Vec<usize> {
    let total = (n * (n + 1) / 2) as f64;
    let mut bounds = Vec::new();
    let mut acc = 0.0;
    let mut next = 1;
    for j in 0..n {
        acc += (n - j) as f64;
        if next < parts && acc >= total * next as f64 / parts as f64 && j + 1 < n {
            bounds.push(j + 1);
            next += 1;
        }
    }
    bounds
}

/// Uniform boundaries splitting `n` items into `parts` chunks.
pub(crate) fn uniform_bounds(n: usize, parts: usize) -> Vec<usize> {
    (1..parts).map(|t| t * n / parts).filter(|&b| b > 0 && b < n).collect::<std::collections::BTreeSet<_>>().into_iter().collect()
}

pub(crate) fn workers(parallel: bool, work: usize, threshold: usize) -> usize {
    if !parallel || work < threshold {
        1
    } else {
        rayon::current_num_threads().max(1)
    }
}
