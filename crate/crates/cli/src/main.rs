mod commands;
mod failure;
mod inputs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Outcome;

/// Event-B refinement chains, event-based LTL model checking and property preservation.
#[derive(Debug, Parser)]
#[command(name = "ebltl", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Maximum number of explored states per machine.
    #[arg(long, global = true, value_name = "N", default_value_t = 100_000)]
    pub bound_states: usize,
    /// Longest lasso prefix tried by the bounded beta-dependence search.
    #[arg(long, global = true, value_name = "P", default_value_t = 4)]
    pub lasso_prefix: usize,
    /// Longest lasso cycle tried by the bounded beta-dependence search.
    #[arg(long, global = true, value_name = "Q", default_value_t = 4)]
    pub lasso_cycle: usize,
}

#[derive(Debug, Clone, Args)]
pub struct PropArgs {
    /// A formula, `@file`, or the name of a property in the properties file.
    #[arg(long)]
    pub prop: String,
    /// Properties file used to resolve property names.
    #[arg(long, value_name = "FILE")]
    pub props: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and typecheck a machine, or parse a formula.
    Parse {
        file: Option<PathBuf>,
        #[arg(long, conflicts_with = "file")]
        prop: Option<String>,
    },
    /// Explore the reachable states of a machine.
    Explore {
        file: PathBuf,
        /// Include every state and edge in the report.
        #[arg(long)]
        graph: bool,
    },
    /// Refinement proof obligations for each step of a chain.
    Po {
        #[arg(long)]
        chain: PathBuf,
        /// Only the step from machine `STEP - 1` to machine `STEP`.
        #[arg(long)]
        step: Option<usize>,
    },
    /// Strategy rules on status labels.
    Strategy {
        #[arg(long)]
        chain: PathBuf,
        /// Also derive the divergence guarantee for the last machine and check it directly.
        #[arg(long)]
        divergence: bool,
    },
    /// Model check a property on a machine.
    Mc {
        /// Machine file; alternatively `--chain` with `--at`.
        file: Option<PathBuf>,
        #[arg(long, conflicts_with = "file")]
        chain: Option<PathBuf>,
        /// Machine index within the chain (default: the last one).
        #[arg(long, requires = "chain")]
        at: Option<usize>,
        #[command(flatten)]
        prop: PropArgs,
    },
    /// Is a property insensitive to events outside beta?
    Beta {
        #[command(flatten)]
        prop: PropArgs,
        /// Comma-separated events (default: the events of the property).
        #[arg(long, value_delimiter = ',')]
        beta: Option<Vec<String>>,
        /// Machine whose alphabet is the ambient event set.
        file: Option<PathBuf>,
        #[arg(long, conflicts_with = "file")]
        chain: Option<PathBuf>,
        #[arg(long, requires = "chain")]
        at: Option<usize>,
    },
    /// Translate a property of machine `--at` to the events of the last machine.
    Translate {
        #[arg(long)]
        chain: PathBuf,
        #[arg(long, default_value_t = 0)]
        at: usize,
        #[command(flatten)]
        prop: PropArgs,
    },
    /// Certify that the last machine keeps performing events descended from the first.
    Gf {
        #[arg(long)]
        chain: PathBuf,
        /// Skip the direct model check of the conclusion.
        #[arg(long)]
        no_cross_validate: bool,
    },
    /// Carry a property of machine `--at` down to the last machine.
    Preserve {
        #[arg(long)]
        chain: PathBuf,
        #[arg(long)]
        at: usize,
        #[command(flatten)]
        prop: PropArgs,
        #[arg(long, value_delimiter = ',')]
        beta: Option<Vec<String>>,
        /// Accept beta-dependence when the bounded search finds no witness.
        #[arg(long)]
        accept_bounded: bool,
        #[arg(long)]
        no_cross_validate: bool,
    },
    /// Compare the model checker with the brute-force oracle.
    Oracle {
        /// Corpus root (default: $EBLTL_CORPUS, then the bundled corpus).
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Number of random (graph, formula) pairs.
        #[arg(long, default_value_t = 500)]
        random: usize,
        #[arg(long, default_value_t = 2)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let name = commands::name(&cli.command);
    let outcome = match commands::run(&cli.command, &cli.common) {
        Ok(o) => o,
        Err(f) => Outcome::from_failure(f),
    };
    outcome.emit(name, cli.common.json);
    ExitCode::from(outcome.status.code())
}
