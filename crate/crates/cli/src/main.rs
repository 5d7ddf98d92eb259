mod commands;
mod config;
mod error;
mod format;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::Common;

/// Conditionally optimal lower confidence bounds for the mean of a finitely
/// supported distribution.
///
/// Exit codes: 0 success, 2 invalid input, 3 oracle mismatch,
/// 4 solver non-convergence, 5 size cap refusal.
#[derive(Debug, Parser)]
#[command(name = "mnbound", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the sample space in lexicographic order
    Lattice {
        #[command(flatten)]
        common: Common,
    },
    /// Bound table for one ordering, with its admissibility report
    Bound {
        #[command(flatten)]
        common: Common,
        /// lex, mean, file:PATH or perm:I,J,...
        #[arg(long)]
        order: Option<String>,
        /// Cross-check every entry against the grid oracle at this resolution
        #[arg(long, value_name = "D")]
        check_oracle: Option<u32>,
        /// Allowed solver/oracle gap; defaults to m·max(S)/D
        #[arg(long, requires = "check_oracle")]
        oracle_tol: Option<f64>,
    },
    /// Largest error probability of a bound function
    Verify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        source: Source,
        /// Barycentric grid resolution
        #[arg(long, default_value_t = 1000)]
        resolution: u32,
        /// Skip the local ascent that polishes each grid maximum
        #[arg(long)]
        grid_only: bool,
    },
    /// Monte Carlo error rate of a bound function under one distribution
    Coverage {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        source: Source,
        /// Probabilities on the support, comma separated
        #[arg(long)]
        dist: String,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Compare two bound functions
    Compare {
        #[command(flatten)]
        common: Common,
        /// First bound: an order spec or bounds:PATH
        #[arg(long)]
        a: String,
        /// Second bound: an order spec or bounds:PATH
        #[arg(long)]
        b: String,
        #[arg(long, value_enum, default_value_t = MetricArg::SampleAligned)]
        metric: MetricArg,
        /// Dirichlet concentration: one value or one per support point
        #[arg(long, default_value = "1")]
        concentration: String,
        #[arg(long, default_value_t = 10_000)]
        draws: u64,
    },
    /// Every distinct admissible bound for the sample space
    Enumerate {
        #[command(flatten)]
        common: Common,
        /// Largest number of orderings to examine
        #[arg(long, default_value_t = 1_000_000)]
        cap: u128,
    },
    /// Likelihood of a set of samples over a barycentric grid
    Contour {
        #[command(flatten)]
        common: Common,
        /// Lexicographic sample indices, comma separated
        #[arg(long, conflicts_with = "samples")]
        members: Option<String>,
        /// Samples as values, e.g. "1,1,3;1,3,3;3,3,3"
        #[arg(long)]
        samples: Option<String>,
        #[arg(long, default_value_t = 100)]
        resolution: u32,
    },
}

/// Where a bound function comes from.
#[derive(Debug, Clone, clap::Args)]
struct Source {
    /// Ordering whose optimal bound is used
    #[arg(long, conflicts_with = "bounds")]
    order: Option<String>,
    /// File of `index value` lines
    #[arg(long)]
    bounds: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricArg {
    SampleAligned,
    RankOrdered,
    ExpectedValue,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::dispatch(cli.command) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.as_bytes());
            let _ = stdout.flush();
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("mnbound: {e}");
            e.exit_code()
        }
    }
}
