use skewltl::kernels::level3::{peak_workspace, reset_peak_workspace};
use skewltl::kernels::*;
use skewltl::skewcore::*;

#[test]
fn packing_workspace_is_bounded_by_block_sizes() {
    let blocking = Blocking { mc: 32, kc: 24, nc: 60 };
    let cfg = KernelConfig { blocking, ..KernelConfig::default() };
    let bound = workspace_bound(&blocking);
    let mut peaks = Vec::new();
    for (n, k) in [(50, 10), (300, 40), (700, 200)] {
        let a = Mat::from_fn(n, k, |i, j| ((i + 2 * j) % 9) as f64);
        let tau = vec![0.5; k - 1];
        let mut c = SkewMatrix::zeros(n);
        reset_peak_workspace();
        skew_tridiag_rankk(&cfg, c.view_mut(), 1.0, a.as_ref(), &tau, 1.0).unwrap();
        peaks.push(peak_workspace());
        assert!(peak_workspace() <= bound, "n={n} k={k}: {} > {bound}", peak_workspace());
    }
    // The bound depends only on the blocking, far below the largest operand size.
    assert!(bound < 700 * 200 / 50);
    assert_eq!(peaks[1], peaks[2]);
}
