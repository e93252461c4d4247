//! `invkit`: exact proportions, bound chains, Monte Carlo estimates and
//! small-involution search from the command line.
//!
//! Exit status is 0 when every check passes, 1 when a theorem check or a
//! cross-check fails, and 2 on invalid input.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use invkit_core::{Epsilon, Family, PermGroup};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "invkit",
    version,
    about = "Small-support involutions in permutation and matrix groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct FormatArg {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args)]
struct SamplingArgs {
    #[arg(long, default_value_t = 10_000)]
    trials: u64,

    /// Base seed; trial `i` uses its own stream derived from it.
    #[arg(long, env = "INVKIT_SEED", default_value_t = 0)]
    seed: u64,

    #[arg(long, default_value_t = invkit_core::monte_carlo::DEFAULT_CONFIDENCE)]
    confidence: f64,
}

/// A matrix group: `GL_l(q)` or `SL_l(q)`, or a generator file.
#[derive(Debug, Args)]
struct MatrixGroupArgs {
    /// Rank parameter; the natural dimension follows from the family.
    #[arg(long)]
    l: Option<u64>,

    /// Field order, an odd prime power.
    #[arg(long)]
    q: Option<u64>,

    /// Use `SL_l(q)` instead of `GL_l(q)`.
    #[arg(long, conflicts_with = "gens")]
    sl: bool,

    /// Generator file: header `n q count`, then blank-line separated matrices.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["q", "sl"])]
    gens: Option<PathBuf>,

    /// Classical-group row the group belongs to.
    #[arg(long, default_value = "gl")]
    family: Family,

    /// The group lies strictly between the quasisimple group and the full group.
    #[arg(long)]
    strict: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact proportions in S_n and A_n, with the theorem check when --eps is given.
    Exact {
        #[arg(long)]
        n: usize,
        #[arg(long, required_unless_present = "m", conflicts_with = "m")]
        eps: Option<Epsilon>,
        /// Raw support bound; skips the theorem check.
        #[arg(long)]
        m: Option<usize>,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Bound chains for S_n and A_n, and classical-group constants.
    Bounds {
        #[arg(long, required_unless_present = "family")]
        n: Option<u64>,
        #[arg(long)]
        eps: Epsilon,
        #[arg(long)]
        family: Option<Family>,
        #[arg(long, requires = "family")]
        strict: bool,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Monte Carlo estimate of the proportion in S_n or A_n.
    Estimate {
        #[arg(long)]
        n: usize,
        #[arg(long, required_unless_present = "m", conflicts_with = "m")]
        eps: Option<Epsilon>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value = "sn")]
        group: PermGroup,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Monte Carlo estimate of the proportion in a matrix group.
    Matrix {
        #[command(flatten)]
        group: MatrixGroupArgs,
        #[arg(long, required_unless_present = "rmax")]
        eps: Option<Epsilon>,
        /// Largest admissible (-1)-eigenspace dimension.
        #[arg(long)]
        rmax: Option<usize>,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Search for one involution of small support or eigenspace dimension.
    Find {
        /// Permutation degree; omit for matrix groups.
        #[arg(long, conflicts_with_all = ["l", "q", "gens"])]
        n: Option<usize>,
        #[arg(long, default_value = "sn")]
        group: PermGroup,
        #[command(flatten)]
        matrix: MatrixGroupArgs,
        #[arg(long)]
        eps: Option<Epsilon>,
        /// Support threshold for permutations.
        #[arg(long)]
        m: Option<usize>,
        /// Eigenspace threshold for matrices.
        #[arg(long)]
        rmax: Option<usize>,
        #[arg(long, env = "INVKIT_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        max_tries: u64,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Exhaustive cross-checks on small cases.
    Oracle {
        /// Compare the counting engine with enumeration of S_n (n <= 10).
        #[arg(long, conflicts_with_all = ["l", "q", "gens"])]
        n: Option<usize>,
        #[command(flatten)]
        matrix: MatrixGroupArgs,
        /// Largest group enumerated.
        #[arg(long, default_value_t = invkit_core::group::DEFAULT_ENUMERATION_CAP)]
        cap: usize,
        #[command(flatten)]
        format: FormatArg,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("invkit: {e}");
            ExitCode::from(2)
        }
    }
}
