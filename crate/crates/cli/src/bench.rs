use crate::{configure_threads, parse_list, AlgoArgs};
use anyhow::{bail, Result};
use clap::Args;
use skewltl::factor::{factor, FactorOptions, Features, Variant};
use skewltl::oracle::flop_model;
use skewltl::skewcore::SkewMatrix;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

pub const CSV_HEADER: &str = "variant,m,block,threads,pivot,seconds,gflops,flops_l2,flops_l3";

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[command(flatten)]
    pub algo: AlgoArgs,
    /// Single matrix size (alternative to --sizes).
    #[arg(long, conflicts_with = "sizes")]
    pub size: Option<usize>,
    /// Comma-separated matrix sizes.
    #[arg(long)]
    pub sizes: Option<String>,
    /// Single block size (alternative to --blocks).
    #[arg(long, conflicts_with = "blocks")]
    pub block: Option<usize>,
    /// Comma-separated block sizes.
    #[arg(long)]
    pub blocks: Option<String>,
    /// Timed repetitions per configuration; the median is reported.
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
    /// Write the CSV to this file instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Step through the optimization ladder: blk-var1 with every feature off,
    /// then each feature turned on in turn, then the fused variant.
    #[arg(long)]
    pub opt_ladder: bool,
}

/// (label, options) for each configuration of one (m, b) point.
fn configurations(a: &BenchArgs, b: usize) -> Vec<(String, FactorOptions)> {
    if !a.opt_ladder {
        return vec![(a.algo.variant.name().to_string(), a.algo.options(b))];
    }
    let base = |features: Features| FactorOptions { features, ..FactorOptions::new(Variant::BlkVar1, a.algo.pivot).with_block(b) };
    let mut f = Features::none();
    let mut steps = vec![("blk-var1@step0".to_string(), base(f))];
    f.fused_l2 = true;
    steps.push(("blk-var1@step1".into(), base(f)));
    f.parallel_l2 = true;
    steps.push(("blk-var1@step2".into(), base(f)));
    f.external_t = true;
    steps.push(("blk-var1@step3".into(), base(f)));
    f.fused_l3 = true;
    steps.push(("blk-var1@step4".into(), base(f)));
    let fused = if a.algo.variant.is_blocked() && a.algo.variant != Variant::BlkVar1 { a.algo.variant } else { Variant::BlkVar2b };
    let o = FactorOptions { panel: a.algo.panel.into(), ..FactorOptions::new(fused, a.algo.pivot).with_block(b) };
    steps.push((format!("{fused}@step5"), o));
    steps
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn run(a: &BenchArgs) -> Result<()> {
    let sizes = match (&a.sizes, a.size) {
        (Some(s), _) => parse_list(s)?,
        (None, Some(m)) => vec![m],
        (None, None) => vec![1000],
    };
    let blocks = match (&a.blocks, a.block) {
        (Some(s), _) => parse_list(s)?,
        (None, Some(b)) => vec![b],
        (None, None) => vec![256],
    };
    if sizes.contains(&0) || blocks.contains(&0) {
        bail!("sizes and block sizes must be positive");
    }
    if a.reps == 0 {
        bail!("--reps must be at least 1");
    }
    if a.algo.pivot && !a.algo.variant.supports_pivoting() && !a.opt_ladder {
        bail!("{} has no pivoted form", a.algo.variant);
    }
    let threads = configure_threads(a.algo.threads)?;
    let mut csv = format!("# seed={}\n{CSV_HEADER}\n", a.algo.seed);
    let write_now = a.out.is_none();
    if write_now {
        print!("{csv}");
    }
    for &m in &sizes {
        let x = SkewMatrix::random_gaussian(m, a.algo.seed);
        // An unblocked variant ignores the block size: one row per size.
        let blocks_here: &[usize] = if a.algo.variant.is_blocked() || a.opt_ladder { &blocks } else { &blocks[..1] };
        for &b in blocks_here {
            for (label, opts) in configurations(a, b) {
                let mut seconds = Vec::with_capacity(a.reps);
                let mut last = None;
                for _ in 0..a.reps {
                    let t = Instant::now();
                    let f = factor(&x, &opts)?;
                    seconds.push(t.elapsed().as_secs_f64());
                    last = Some(f);
                }
                let f = last.expect("at least one repetition");
                let s = median(seconds);
                let gflops = flop_model(opts.variant.name(), m, b)? / s / 1e9;
                let block = if opts.variant.is_blocked() { b } else { 0 };
                let row = format!(
                    "{label},{m},{block},{threads},{},{s:.6},{gflops:.3},{},{}\n",
                    opts.pivot,
                    f.flops.level2 + f.flops.panel,
                    f.flops.level3
                );
                if write_now {
                    print!("{row}");
                } else {
                    let _ = write!(csv, "{row}");
                }
            }
        }
    }
    if let Some(path) = &a.out {
        std::fs::write(path, csv)?;
    }
    Ok(())
}
