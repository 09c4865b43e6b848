//! Command-line entry points wiring the library into reproducible
//! experiments: `gen`, `learn`, `sketch`, `ingest`, and `bench`.
//!
//! Every command is deterministic given `--seed`; per-trial randomness is
//! derived through the library's lane-seed rule. Exit codes are stable:
//! 0 success, 1 usage or IO failure, 2 algorithmic failure.

pub mod commands;
pub mod config;
pub mod instances;
pub mod report;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

pub use config::FileConfig;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable files, malformed inputs.
    Usage(String),
    /// The algorithm itself failed (candidate blow-up, infeasible program,
    /// ambiguous reconstruction, ...).
    Algorithm { stage: String, message: String },
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Algorithm { stage, message } => write!(f, "[{stage}] {message}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Algorithm { .. } => 2,
        }
    }

    pub(crate) fn io(context: &str, err: std::io::Error) -> Self {
        CliError::Usage(format!("{context}: {err}"))
    }
}

#[derive(Parser, Debug)]
#[command(name = "boolsketch", version, about = "Sparse Boolean polynomial learning and hypergraph sketching experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(clap::Subcommand, Debug)]
pub enum Command {
    /// Generate a planted instance: polynomial, hypergraph, or synthetic log
    Gen(commands::gen::GenArgs),
    /// Learn a sparse polynomial from labeled samples of a planted instance
    Learn(commands::learn::LearnArgs),
    /// Sketch a hypergraph from random cut-complement queries
    Sketch(commands::sketch::SketchArgs),
    /// Parse a message log and emit windowed difference hypergraphs
    Ingest(commands::ingest::IngestArgs),
    /// Seeded trial sweeps (runtime over n, or error rate over sample scale)
    Bench(commands::bench::BenchArgs),
}

pub fn main_entry() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("BOOLSKETCH_LOG")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err)
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp
                    | ErrorKind::DisplayVersion
                    | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            ) =>
        {
            print!("{err}");
            return ExitCode::SUCCESS;
        }
        Err(err) => {
            eprint!("{err}");
            return ExitCode::from(1);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen(args) => commands::gen::run(args),
        Command::Learn(args) => commands::learn::run(args),
        Command::Sketch(args) => commands::sketch::run(args),
        Command::Ingest(args) => commands::ingest::run(args),
        Command::Bench(args) => commands::bench::run(args).map(|_| ()),
    }
}
