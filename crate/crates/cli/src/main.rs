//! `diracspec` — experiment runner for truncated Dirac spectra on
//! low-dimensional tori.
//!
//! One JSON config per run; deterministic CSV/JSON artifacts.  Exit codes:
//! `0` success, `2` validation failure (bad config, file, or parameters),
//! `3` numerical-regime failure (aliasing or Hermiticity guards tripped —
//! raise the grid resolution or shrink the truncation).

mod config;
mod output;
mod runs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use runs::RunContext;

#[derive(Parser)]
#[command(
    name = "diracspec",
    version,
    about = "Truncated Dirac spectra, convergence reports, and distance bounds on tori"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (JSON); data files resolve relative to it
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSV/JSON artifacts
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Override the config's truncation radius N
    #[arg(long)]
    trunc: Option<usize>,
    /// Override the config's interval bound Λ
    #[arg(long)]
    lambda: Option<f64>,
    /// Override the config's eigenvalue clustering tolerance
    #[arg(long)]
    cluster_tol: Option<f64>,
    /// Worker threads for sweep steps (default: one per core)
    #[arg(long)]
    threads: Option<usize>,
    /// Stamp wall-clock metadata into table headers (off by default so
    /// identical runs produce byte-identical files)
    #[arg(long, default_value_t = false)]
    timestamps: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Eigenvalues of one operator (quantum-torus, circle, or torus2)
    Spectrum(RunArgs),
    /// Convergence report of a perturbation sweep against its base operator
    Converge(RunArgs),
    /// Eigenvalues of an even-sided product operator (torus2 × finite)
    Product(RunArgs),
    /// Per-step distance-bound table along a perturbation sweep
    Bound(RunArgs),
    /// C¹ distance between two metric files, printed to standard output
    C1dist {
        /// Base metric file
        g_file: PathBuf,
        /// Comparison metric file (same dimension and grid)
        h_file: PathBuf,
    },
}

fn context(args: &RunArgs) -> dirac_core::Result<RunContext> {
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(dirac_core::Error::InvalidInput(
                "--threads must be >= 1".into(),
            ));
        }
        // A second initialization (e.g. in-process tests) keeps the first
        // pool; that only affects parallelism, never results.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(RunContext {
        out_dir: args.out.clone(),
        trunc: args.trunc,
        lambda: args.lambda,
        cluster_tol: args.cluster_tol,
        timestamps: args.timestamps,
    })
}

fn dispatch(cli: Cli) -> dirac_core::Result<()> {
    match cli.cmd {
        Cmd::Spectrum(a) => runs::run_spectrum(&context(&a)?, &a.config),
        Cmd::Converge(a) => runs::run_converge(&context(&a)?, &a.config),
        Cmd::Product(a) => runs::run_product(&context(&a)?, &a.config),
        Cmd::Bound(a) => runs::run_bound(&context(&a)?, &a.config),
        Cmd::C1dist { g_file, h_file } => runs::run_c1dist(&g_file, &h_file),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical_regime() { 3 } else { 2 })
        }
    }
}
