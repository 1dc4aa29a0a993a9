//! `powerdomain`: order checks, representations and samplers for simple
//! valuations on finite posets.
//!
//! Exit status is 0 on success, 1 on a negative verdict and 2 on usage or
//! input errors.

mod commands;
mod workspace;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "powerdomain", version, about = "Exact simple valuations on finite posets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Poset file (`element`, `cover`, `bottom` lines).
    #[arg(long)]
    poset: PathBuf,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a Graphviz rendering here.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct Pair {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    mu: PathBuf,
    #[arg(long)]
    nu: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Decide mu <= nu; prints a transport plan or a separating upper set.
    Order(Pair),
    /// Decide mu << nu.
    Waybelow {
        #[command(flatten)]
        pair: Pair,
        /// Work in the probability powerdomain instead of subprobabilities.
        #[arg(long)]
        normalized: bool,
    },
    /// Print transport numbers for mu <= nu.
    Transport(Pair),
    /// Report chain, bounded-completeness and lattice flags.
    Classify(Common),
    /// Print the approximation schedule of a probability valuation.
    Schedule {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        mu: PathBuf,
        #[arg(long = "K", short = 'K')]
        k: usize,
    },
    /// Build a representation map for a probability valuation.
    Represent {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        mu: PathBuf,
        #[arg(long = "K", short = 'K')]
        k: usize,
    },
    /// Draw samples from a representation map with a seeded bit source.
    Sample {
        #[command(flatten)]
        common: Common,
        /// A map file; alternatively give --mu and --K to build one.
        #[arg(long, conflicts_with = "mu")]
        map: Option<PathBuf>,
        #[arg(long, requires = "k")]
        mu: Option<PathBuf>,
        #[arg(long = "K", short = 'K')]
        k: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Represent a convergent sequence and its limit, then check pointwise convergence on the grid.
    Converge {
        #[command(flatten)]
        common: Common,
        /// Comma-separated valuation files.
        #[arg(long, value_delimiter = ',', required = true)]
        seq: Vec<PathBuf>,
        /// The limit valuation.
        #[arg(long)]
        mu: PathBuf,
        #[arg(long = "K", short = 'K')]
        k: usize,
        #[arg(long, default_value_t = 0)]
        from: usize,
    },
    /// Tabulate a unit-interval sampler over its grid.
    Skorohod {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        mu: PathBuf,
        #[arg(long = "K", short = 'K')]
        k: usize,
        /// Accept mass below one by routing the rest to a fresh bottom.
        #[arg(long)]
        subprobability: bool,
    },
    /// Cumulative distribution function on a chain.
    Cdf {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        mu: PathBuf,
    },
    /// Quantile map (lower adjoint of the CDF) on a chain.
    Quantile {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        mu: PathBuf,
    },
    /// Law of a quantile map under Lebesgue measure.
    PushforwardLebesgue {
        #[command(flatten)]
        common: Common,
        /// Quantile file (`break <dyadic> <element>` lines).
        #[arg(long)]
        quantile: PathBuf,
    },
    /// Finite-tail Portmanteau check of a sequence against a limit.
    Portmanteau {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', required = true)]
        seq: Vec<PathBuf>,
        #[arg(long)]
        mu: PathBuf,
        #[arg(long, default_value_t = 0)]
        from: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
