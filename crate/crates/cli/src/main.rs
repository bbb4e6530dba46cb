mod bench;
mod commands;
mod generate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Dominating Set above an r-independent set: solve, kernelize, generate
/// and benchmark instances.
///
/// Exit status: 0 success or YES, 1 NO or invalid, 2 error.
#[derive(Parser, Debug)]
#[command(name = "dsai", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether the instance has a dominating set within its budget.
    Solve(SolveArgs),
    /// Shrink an instance (r >= 3) and report the budget offset.
    Kernelize(KernelizeArgs),
    /// Write reduction gadgets or random instances.
    Generate(GenerateArgs),
    /// Check an instance and optionally a witness.
    Verify(VerifyArgs),
    /// Run the exhaustive reference solvers.
    Oracle(OracleArgs),
    /// Solve every instance of a corpus and write a CSV table.
    Bench(BenchArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Algo {
    /// Dynamic program over residual guesses (r >= 3).
    Dp,
    /// Same dynamic program over the whole trace family.
    Xp,
    /// Branch and bound on the whole graph.
    Oracle,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long, value_enum, default_value = "dp")]
    algo: Algo,
    #[arg(long)]
    input: PathBuf,
    /// Write the witness as 1-based ids.
    #[arg(long)]
    witness: Option<PathBuf>,
    #[arg(long, default_value_t = dsai::dp::DEFAULT_MASK_WIDTH_GUARD)]
    mask_width_guard: usize,
    #[arg(long, default_value_t = dsai::dp::DEFAULT_RESIDUAL_GUARD)]
    residual_guard: usize,
}

#[derive(Args, Debug)]
struct KernelizeArgs {
    #[arg(long)]
    input: PathBuf,
    /// Reduced instance; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// JSON report; stderr when absent.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Balls with more than 2·tau residual vertices are left alone.
    /// Defaults to the degeneracy of the graph.
    #[arg(long)]
    tau: Option<usize>,
    /// Keep min{|bucket|, |R|} interchangeable balls instead of
    /// min{|bucket|, |R'|}.
    #[arg(long)]
    strict_paper: bool,
    #[arg(long, default_value_t = dsai::kernel::DEFAULT_BOUNDARY_CAP)]
    rprime_cap: usize,
    /// Apply the r >= 4 component removal first.
    #[arg(long)]
    r4: bool,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[command(subcommand)]
    kind: generate::Kind,
    /// Instance file; stdout when absent.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// JSON vertex-role map for gadget instances.
    #[arg(long, global = true)]
    map: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    /// Id list or the JSON printed by `solve`.
    #[arg(long)]
    witness: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(subcommand)]
    kind: OracleKind,
}

#[derive(Subcommand, Debug)]
enum OracleKind {
    /// Minimum dominating set of the graph.
    Ds {
        #[arg(long)]
        input: PathBuf,
    },
    /// Minimum set dominating all non-`y` vertices and meeting every `grp`.
    Annotated {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// One vertex per colour class dominating colour 0.
    Colourful {
        #[arg(long)]
        input: PathBuf,
    },
    /// Brute-force satisfiability of a DIMACS formula.
    Sat {
        #[arg(long)]
        cnf: PathBuf,
    },
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Directory of `.dsai` files.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Largest instance the exact oracle is run on.
    #[arg(long, default_value_t = 40)]
    oracle_guard: usize,
    #[arg(long, default_value_t = 1)]
    tau: usize,
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("DSAI_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| anyhow::anyhow!("DSAI_THREADS must be a positive integer, got `{v}`"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    configure_threads()?;
    match cli.command {
        Command::Solve(a) => commands::solve(&a),
        Command::Kernelize(a) => commands::kernelize(&a),
        Command::Generate(a) => generate::run(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Oracle(a) => commands::oracle(&a.kind),
        Command::Bench(a) => bench::run(&a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
