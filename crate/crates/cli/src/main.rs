//! `skewltl` command-line harness: factor a matrix, run the invariant suite,
//! or benchmark the factorization variants with CSV output.

mod bench;
mod factor_cmd;
mod verify;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use skewltl::factor::{FactorOptions, Features, PanelVariant, Variant};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "skewltl", version, about = "Skew-symmetric L·T·Lᵀ factorization harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Factor one matrix and write L, T and the pivots.
    Factor(factor_cmd::FactorArgs),
    /// Run the invariant suite; exits non-zero if any check fails.
    Verify(verify::VerifyArgs),
    /// Time the variants over a grid of sizes and block sizes (CSV).
    Bench(bench::BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PanelArg {
    Rl,
    Ll,
    #[value(name = "2step")]
    TwoStep,
}

impl From<PanelArg> for PanelVariant {
    fn from(p: PanelArg) -> Self {
        match p {
            PanelArg::Rl => PanelVariant::Rl,
            PanelArg::Ll => PanelVariant::Ll,
            PanelArg::TwoStep => PanelVariant::TwoStep,
        }
    }
}

/// Algorithm selection shared by `factor` and `bench`.
#[derive(Args, Debug, Clone)]
pub struct AlgoArgs {
    /// unb-rl, unb-ll, unb-2step, blk-var1, blk-var2a, blk-var2b, blk-left or blk-2step.
    #[arg(long, default_value = "blk-var2b")]
    pub variant: Variant,
    /// Symmetric partial pivoting.
    #[arg(long)]
    pub pivot: bool,
    /// Unblocked algorithm used inside the panels of blocked variants.
    #[arg(long, value_enum, default_value = "ll")]
    pub panel: PanelArg,
    /// Worker threads (overrides OMP_NUM_THREADS).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Seed of the random test matrix.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Disable the unroll-and-jam level-2 kernels.
    #[arg(long)]
    pub no_fused_l2: bool,
    /// Run level-2 kernels on one thread.
    #[arg(long)]
    pub no_parallel_l2: bool,
    /// Split the trailing update instead of using the external-T fused form.
    #[arg(long)]
    pub no_external_t: bool,
    /// Form T·B explicitly instead of during packing.
    #[arg(long)]
    pub no_fused_l3: bool,
}

impl AlgoArgs {
    pub fn features(&self) -> Features {
        Features {
            fused_l2: !self.no_fused_l2,
            parallel_l2: !self.no_parallel_l2,
            external_t: !self.no_external_t,
            fused_l3: !self.no_fused_l3,
        }
    }

    pub fn options(&self, block: usize) -> FactorOptions {
        FactorOptions {
            panel: self.panel.into(),
            features: self.features(),
            ..FactorOptions::new(self.variant, self.pivot).with_block(block)
        }
    }
}

/// Sets the global worker count from `--threads`, else `OMP_NUM_THREADS`,
/// and returns the count in effect.
pub fn configure_threads(threads: Option<usize>) -> Result<usize> {
    let requested = match threads {
        Some(n) => Some(n),
        None => match std::env::var("OMP_NUM_THREADS") {
            Ok(v) if !v.trim().is_empty() => {
                Some(v.trim().parse::<usize>().with_context(|| format!("OMP_NUM_THREADS={v:?} is not a number"))?)
            }
            _ => None,
        },
    };
    if let Some(n) = requested {
        if n == 0 {
            bail!("thread count must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring worker threads")?;
    }
    Ok(rayon::current_num_threads())
}

/// Parses a comma-separated list of positive integers.
pub fn parse_list(s: &str) -> Result<Vec<usize>> {
    let v = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().with_context(|| format!("invalid list entry {t:?}")))
        .collect::<Result<Vec<_>>>()?;
    if v.is_empty() || v.contains(&0) {
        bail!("list {s:?} must contain positive integers");
    }
    Ok(v)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Factor(a) => factor_cmd::run(&a),
        Command::Verify(a) => verify::run(&a),
        Command::Bench(a) => bench::run(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
