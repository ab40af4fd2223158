use crate::{configure_threads, parse_list, PanelArg};
use anyhow::{bail, Result};
use clap::Args;
use skewltl::apps::{pfaffian_from, solve_vec};
use skewltl::factor::{factor, Factorization, FactorOptions, Variant};
use skewltl::kernels::{form_w, skew_rank2k, skew_tridiag_gemm, skew_tridiag_rankk, KernelConfig};
use skewltl::oracle::{
    dense_sandwich, det_dense, exact_instance, gauss_elim_exact, pfaffian_bruteforce, pfaffian_exact, rat, rat_int,
    rational_dense, reconstruct_exact,
};
use skewltl::skewcore::{form_s_splitting, Kernel, Mat, Scope, SkewMatrix, SkewTridiagonal};
use skewltl::Error;

const EPS: f64 = f64::EPSILON;

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Largest matrix dimension exercised.
    #[arg(long, default_value_t = 64)]
    pub max_size: usize,
    /// Explicit comma-separated sizes (each at most --max-size).
    #[arg(long)]
    pub sizes: Option<String>,
    /// Also run the exact rational-arithmetic oracles (m ≤ 8).
    #[arg(long)]
    pub exact: bool,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Block size for the blocked variants.
    #[arg(long, default_value_t = 8)]
    pub block: usize,
    #[arg(long, value_enum, default_value = "ll")]
    pub panel: PanelArg,
    /// Negative control: perturb every computed τ so the checks must fail.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

struct Suite {
    failures: usize,
    inject_fault: bool,
}

impl Suite {
    fn check(&mut self, name: &str, pass: bool, detail: String) {
        println!("{name}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failures += 1;
        }
    }

    fn factor(&self, x: &SkewMatrix, opts: &FactorOptions) -> skewltl::Result<Factorization> {
        let mut f = factor(x, opts)?;
        if self.inject_fault {
            for t in &mut f.t.tau {
                *t *= 1.0 + 1e-6;
            }
        }
        Ok(f)
    }
}

fn default_sizes(max: usize) -> Vec<usize> {
    let mut v: Vec<usize> = [1, 2, 3, 4, 5, 8, 10, 17, max / 2, max].into_iter().filter(|&m| m >= 1 && m <= max).collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn random_mat(r: usize, c: usize, seed: u64) -> Mat {
    let src = SkewMatrix::random_gaussian(r + c + 1, seed);
    Mat::from_fn(r, c, |i, j| src.raw(i + c + 1, j))
}

fn check_factorizations(s: &mut Suite, sizes: &[usize], a: &VerifyArgs) -> Result<()> {
    for &m in sizes {
        let x = SkewMatrix::random_gaussian(m, a.seed + m as u64);
        let tol = 50.0 * EPS * m as f64;
        let mut worst = 0.0f64;
        let mut lmax = 0.0f64;
        let mut pivots_agree = true;
        let mut reference_p = None;
        for v in Variant::ALL.into_iter().filter(|v| v.supports_pivoting()) {
            let opts = FactorOptions::new(v, true).with_block(a.block);
            let f = s.factor(&x, &opts)?;
            worst = worst.max(f.residual(&x)?);
            lmax = lmax.max(f.l.max_abs_strict());
            match &reference_p {
                None => reference_p = Some(f.p.clone()),
                Some(p) => pivots_agree &= *p == f.p,
            }
        }
        s.check(&format!("residual-pivoted m={m}"), worst <= tol, format!("max {worst:.2e}, bound {tol:.2e}"));
        s.check(&format!("bounded-L m={m}"), lmax <= 1.0, format!("max |L| = {lmax}"));
        s.check(&format!("pivot-agreement m={m}"), pivots_agree, "all pivoted variants choose the same pivots".into());

        let mut worst_scaled = 0.0f64;
        for v in Variant::ALL {
            let opts = FactorOptions { panel: a.panel.into(), ..FactorOptions::new(v, false).with_block(a.block) };
            match s.factor(&x, &opts) {
                Ok(f) => {
                    let l = f.l.max_abs_strict().max(1.0);
                    let t = f.t.tau.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
                    let growth = (l * l * t / x.max_abs().max(f64::MIN_POSITIVE)).max(1.0);
                    worst_scaled = worst_scaled.max(f.residual(&x)? / (tol * growth));
                }
                Err(Error::ZeroPivot { .. }) => {}
                Err(e) => return Err(e.into()),
            }
        }
        s.check(
            &format!("residual-unpivoted m={m}"),
            worst_scaled <= 1.0,
            format!("max residual / (50εm·growth) = {worst_scaled:.3}"),
        );

        if m % 2 == 0 && m <= 12 {
            let f = s.factor(&x, &FactorOptions::new(Variant::BlkVar2b, true).with_block(a.block))?;
            let pf = pfaffian_from(&f);
            let det = det_dense(&x.to_dense());
            let mut ok = (pf * pf - det).abs() <= 1e-10 * det.abs();
            if m <= 8 {
                ok &= (pf - pfaffian_bruteforce(&x)).abs() <= 1e-10 * pf.abs();
            }
            s.check(&format!("pfaffian m={m}"), ok, format!("Pf² = {:.6e}, det = {det:.6e}", pf * pf));
        }
        if m % 2 == 0 && !s.inject_fault {
            let b: Vec<f64> = (0..m).map(|i| 1.0 + i as f64).collect();
            let y = solve_vec(&x, &b)?;
            let d = x.to_dense();
            let r = (0..m).map(|i| ((0..m).map(|j| d[(i, j)] * y[j]).sum::<f64>() - b[i]).abs()).fold(0.0, f64::max);
            let ynorm = y.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            let bound = 100.0 * EPS * m as f64 * (x.max_abs() * ynorm * m as f64 + m as f64);
            s.check(&format!("solve m={m}"), r <= bound, format!("max residual {r:.2e}"));
        }
    }
    Ok(())
}

fn check_kernels(s: &mut Suite, sizes: &[usize], seed: u64) -> Result<()> {
    let cfg = KernelConfig::default();
    let naive = KernelConfig::naive();
    for &n in sizes {
        let k = 1 + n % 11;
        let a = random_mat(n, k, seed + n as u64);
        let tau: Vec<f64> = (0..k - 1).map(|i| 1.0 - 0.3 * i as f64).collect();
        let t = SkewTridiagonal::with_dim(k, tau.clone()).to_dense();
        let c0 = SkewMatrix::random_gaussian(n, seed ^ n as u64);
        let want = dense_sandwich(&a, &t, &a.transpose());
        let scale = 4.0 * EPS * (n.max(k) as f64) * (c0.max_abs() + want.max_abs() + a.max_abs().powi(2) * k as f64 * 2.0);
        let mut err = 0.0f64;
        for c in [cfg, naive] {
            let mut r = c0.clone();
            skew_tridiag_rankk(&c, r.view_mut(), -1.0, a.as_ref(), &tau, 1.0)?;
            for (i, j, v) in r.lower_entries() {
                err = err.max((v - (c0.raw(i, j) - want[(i, j)])).abs());
            }
            let mut g = Mat::zeros(n, n);
            skew_tridiag_gemm(&c, g.as_mut(), 1.0, a.as_ref(), &tau, a.transpose().as_ref(), 0.0)?;
            err = err.max(g.data.iter().zip(&want.data).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max));
            // A·T·Aᵀ = W·Aᵀ − A·Wᵀ with W = A·S.
            let w = form_w(a.as_ref(), &form_s_splitting(&SkewTridiagonal::with_dim(k, tau.clone())))?;
            let mut r2 = SkewMatrix::zeros(n);
            skew_rank2k(&c, r2.view_mut(), 1.0, w.as_ref(), a.as_ref(), 0.0)?;
            for (i, j, v) in r2.lower_entries() {
                err = err.max((v - want[(i, j)]).abs());
            }
        }
        s.check(&format!("kernels n={n} k={k}"), err <= scale, format!("max error {err:.2e}, bound {scale:.2e}"));
    }
    Ok(())
}

fn check_structure(s: &mut Suite, max: usize, seed: u64) -> Result<()> {
    let x = SkewMatrix::random_gaussian(max.max(4), seed);
    let refused = factor(&x, &FactorOptions::new(Variant::BlkLeft, true).with_block(4));
    s.check("pivoted-left-refused", refused.as_ref().err() == Some(&Error::PivotUnsupported), format!("{:?}", refused.err()));

    let m = x.dim();
    let b = (m / 4).max(1);
    let iterations = (m - 1).div_ceil(b);
    let count = |v: Variant| -> Result<usize> {
        let f = factor(&x, &FactorOptions::new(v, true).with_block(b))?;
        Ok(f.trace.iter().filter(|c| c.kernel == Kernel::SkewRank2 && c.scope == Scope::Trailing).count())
    };
    let (v1, v2a, v2b) = (count(Variant::BlkVar1)?, count(Variant::BlkVar2a)?, count(Variant::BlkVar2b)?);
    s.check(
        "trace",
        v1 == iterations - 1 && v2a == 0 && v2b == 0,
        format!("trailing skew_rank2 calls: var1 {v1} of {iterations} iterations, var2a {v2a}, var2b {v2b}"),
    );

    let w = SkewMatrix::worked_example();
    let f = s.factor(&w, &FactorOptions::new(Variant::UnbLl, false))?;
    s.check("worked-example", f.t.tau == [2.0, 4.0, 10.5], format!("τ = {:?}", f.t.tau));
    if max >= 200 {
        let x = SkewMatrix::random_gaussian(max, seed);
        let rl = factor(&x, &FactorOptions::new(Variant::UnbRl, true))?.flops.total() as f64;
        let two = factor(&x, &FactorOptions::new(Variant::UnbTwoStep, true))?.flops.total() as f64;
        s.check("flop-halving", (rl / two - 2.0).abs() <= 0.05, format!("unb-rl / unb-2step = {:.4}", rl / two));
    }
    Ok(())
}

fn check_exact(s: &mut Suite, max: usize, seed: u64) -> Result<()> {
    let mut mismatches = 0;
    let mut runs = 0;
    for i in 0..25u64 {
        for m in 1..=max.min(8) {
            let (x, exact) = exact_instance(m, seed.wrapping_mul(1000) + i * 8 + m as u64);
            for v in Variant::ALL {
                let f = s.factor(&x, &FactorOptions::new(v, false).with_block(1 + (i as usize % 3)))?;
                runs += 1;
                let tau_ok = f.t.tau.iter().zip(&exact.tau).all(|(a, b)| &rat(*a) == b);
                let l_ok = (0..m).all(|r| (0..m).all(|c| rat(f.l.get(r, c)) == exact.l[r][c]));
                mismatches += usize::from(!(tau_ok && l_ok));
            }
        }
    }
    s.check("exact-agreement", mismatches == 0, format!("{runs} factorizations, {mismatches} mismatches"));

    let w = SkewMatrix::worked_example();
    let pf = pfaffian_exact(&gauss_elim_exact(&w, false)?);
    s.check("exact-pfaffian", pf == rat_int(21), format!("Pf = {pf}"));

    let x = SkewMatrix::from_lower_fn(max.clamp(2, 8), |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0);
    let f = gauss_elim_exact(&x, true)?;
    s.check("exact-pivoted-reconstruction", reconstruct_exact(&f) == rational_dense(&x), format!("m = {}", x.dim()));
    Ok(())
}

pub fn run(a: &VerifyArgs) -> Result<()> {
    configure_threads(a.threads)?;
    if a.max_size == 0 || a.block == 0 {
        bail!("--max-size and --block must be positive");
    }
    let sizes = match &a.sizes {
        Some(list) => {
            let v = parse_list(list)?;
            if let Some(&big) = v.iter().find(|&&m| m > a.max_size) {
                bail!("size {big} exceeds --max-size {}", a.max_size);
            }
            v
        }
        None => default_sizes(a.max_size),
    };
    let mut s = Suite { failures: 0, inject_fault: a.inject_fault };
    check_factorizations(&mut s, &sizes, a)?;
    check_kernels(&mut s, &sizes, a.seed)?;
    check_structure(&mut s, a.max_size, a.seed)?;
    if a.exact {
        check_exact(&mut s, a.max_size, a.seed)?;
    }
    if s.failures > 0 {
        bail!("{} check(s) failed", s.failures);
    }
    println!("all checks passed");
    Ok(())
}
