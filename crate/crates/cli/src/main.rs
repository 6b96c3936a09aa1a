//! `probedepth`: probing strategies and evasiveness checks from the command line.
//!
//! Exit codes: 0 on success, 1 when the input is well formed but the request
//! cannot be met (over the search cap, not acyclic, a disagreement in
//! `crosscheck`), 2 for usage and parse errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "probedepth", version, about = "Minimal probing strategies for sets of Boolean expressions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SearchArgs {
    /// Give up after exploring this many search states.
    #[arg(long)]
    budget: Option<u64>,
    /// Worker threads for the exact search.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Minimal worst-case number of probes.
    Depth {
        file: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        json: bool,
    },
    /// Whether every variable must be probed in the worst case.
    Evasive {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        json: bool,
    },
    /// Export a strategy as a decision diagram.
    Strategy {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        out: Format,
        /// Use the greedy heuristic instead of the exact search.
        #[arg(long)]
        greedy: bool,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Run a probing session against scripted or typed answers.
    Probe {
        file: PathBuf,
        /// File of `variable=value` lines.
        #[arg(long, conflicts_with = "interactive", required_unless_present = "interactive")]
        answers: Option<PathBuf>,
        /// Read answers (y/n/true/false/1/0) from standard input.
        #[arg(long)]
        interactive: bool,
        #[arg(long)]
        greedy: bool,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        json: bool,
    },
    /// Provenance of relational queries.
    Prov {
        #[command(subcommand)]
        command: ProvCommand,
    },
    /// Compare the acyclic decision procedure with exhaustive search on trees and forests.
    Crosscheck {
        #[arg(long, default_value_t = 7)]
        max_nodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random forests checked in addition to the exhaustive tree enumeration.
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long)]
        json: bool,
    },
    /// Print a member of a built-in family as an expression file.
    Family {
        #[arg(value_parser = ["psi", "path", "and", "or"])]
        kind: String,
        parameter: usize,
        /// Print a strategy for it as DOT instead.
        #[arg(long)]
        dot: bool,
    },
    /// Rewrite monotone members as read-once formulas where possible.
    Factor { file: PathBuf },
}

#[derive(Subcommand)]
enum ProvCommand {
    /// Evaluate a query over an annotated database.
    Eval {
        #[arg(long)]
        db: PathBuf,
        #[arg(long)]
        query: PathBuf,
    },
    /// Encode a monotone DNF as a database and a join query.
    ToDb {
        #[arg(long)]
        dnf: PathBuf,
        #[arg(long)]
        k: usize,
        /// Where to write the database; both documents go to stdout when omitted.
        #[arg(long, requires = "query_out")]
        db_out: Option<PathBuf>,
        #[arg(long, requires = "db_out")]
        query_out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Auto,
    Brute,
    Acyclic,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Dot,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            if let Some(out) = failure.stdout() {
                print!("{out}");
            }
            eprintln!("probedepth: {failure}");
            ExitCode::from(failure.code())
        }
    }
}
