use crate::{configure_threads, AlgoArgs};
use anyhow::{bail, Context, Result};
use clap::Args;
use skewltl::factor::factor;
use skewltl::skewcore::{mm_read, mm_write, mm_write_general, SkewMatrix};
use std::path::PathBuf;

#[derive(Args, Debug)]
pub struct FactorArgs {
    #[command(flatten)]
    pub algo: AlgoArgs,
    /// Block size of blocked variants.
    #[arg(long, default_value_t = 256)]
    pub block: usize,
    /// Dimension of a random Gaussian test matrix.
    #[arg(long)]
    pub size: Option<usize>,
    /// Read the matrix from a Matrix Market file.
    #[arg(long = "in", value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Output prefix: writes PREFIX.L.mtx, PREFIX.T.mtx and PREFIX.p.txt.
    #[arg(long, value_name = "PREFIX")]
    pub out: Option<PathBuf>,
    /// Built-in matrix; `worked-example` is the 4×4 example with τ = (2, 4, 10.5).
    #[arg(long)]
    pub preset: Option<String>,
}

fn with_suffix(prefix: &std::path::Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn input_matrix(a: &FactorArgs) -> Result<SkewMatrix> {
    match (&a.preset, &a.input, a.size) {
        (Some(p), None, size) => {
            if p != "worked-example" {
                bail!("unknown preset {p:?} (available: worked-example)");
            }
            if size.is_some_and(|s| s != 4) {
                bail!("the worked-example preset is 4×4");
            }
            Ok(SkewMatrix::worked_example())
        }
        (None, Some(path), None) => mm_read(path).with_context(|| format!("reading {}", path.display())),
        (None, None, Some(m)) => Ok(SkewMatrix::random_gaussian(m, a.algo.seed)),
        (None, None, None) => bail!("one of --size, --in or --preset is required"),
        _ => bail!("--size, --in and --preset are mutually exclusive"),
    }
}

pub fn run(a: &FactorArgs) -> Result<()> {
    let threads = configure_threads(a.algo.threads)?;
    let x = input_matrix(a)?;
    let opts = a.algo.options(a.block);
    let f = factor(&x, &opts).with_context(|| format!("{} factorization of a {}×{} matrix failed", opts.variant, x.dim(), x.dim()))?;
    let residual = f.residual(&x)?;
    let block = if opts.variant.is_blocked() { opts.block.to_string() } else { "-".into() };
    println!("variant={} m={} block={block} pivot={} threads={threads} seed={}", opts.variant, x.dim(), opts.pivot, a.algo.seed);
    println!("residual = {residual:e}");
    if x.dim() <= 16 {
        let tau: Vec<String> = f.t.tau.iter().map(|t| t.to_string()).collect();
        println!("tau = {}", tau.join(", "));
    }
    println!(
        "flops: level2 = {}, level3 = {}, panel = {}, total = {}",
        f.flops.level2,
        f.flops.level3,
        f.flops.panel,
        f.flops.total()
    );
    if let Some(prefix) = &a.out {
        mm_write_general(with_suffix(prefix, ".L.mtx"), &f.l.to_dense())?;
        mm_write(with_suffix(prefix, ".T.mtx"), &SkewMatrix::from_dense_lower(&f.t.to_dense()))?;
        let p: Vec<String> = f.p.pivots.iter().map(|v| v.to_string()).collect();
        let p_path = with_suffix(prefix, ".p.txt");
        std::fs::write(&p_path, if p.is_empty() { String::new() } else { p.join("\n") + "\n" })
            .with_context(|| format!("writing {}", p_path.display()))?;
    }
    Ok(())
}
