//! Command-line front end: `extract` builds a feature database from a
//! directory of office documents, `search` ranks its pages against a query,
//! and `eval` scores query sets against labeled groups.
//!
//! Results go to standard output; logs and progress notices go to standard
//! error. Exit codes are a contract: 0 success, 1 usage error, 2 I/O error,
//! 3 validation error.

mod config;
mod eval_cmd;
mod extract;
mod search;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "layoutret",
    version,
    about = "Extract office-document layout features and search them"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan a directory tree and write a feature database
    Extract(extract::ExtractArgs),
    /// Rank the pages of a feature database against a query file
    Search(search::SearchArgs),
    /// Run query files against labeled groups and report precision/recall
    Eval(eval_cmd::EvalArgs),
}

/// How result bodies are written to standard output.
#[derive(Clone, Copy, clap::ValueEnum)]
pub enum OutputFormat {
    /// Aligned plain-text columns
    Table,
    /// Header line plus one JSON record per row
    Records,
}

/// A command failure carrying its exit-code class.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(String),
    Validation(String),
}

impl Failure {
    /// Finishes a stdout-writing command. A closed pipe (e.g. `| head`) is
    /// normal termination, not an error.
    pub fn from_write(result: std::io::Result<()>) -> Result<(), Failure> {
        match result {
            Ok(()) => Ok(()),
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
            Err(e) => Err(Failure::Io(format!("writing results: {e}"))),
        }
    }

    fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Io(_) => 2,
            Failure::Validation(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Validation(m) => m,
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // help and version requests are not usage errors
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Err(failure) = run(cli) {
        eprintln!("error: {}", failure.message());
        std::process::exit(failure.exit_code());
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let settings = config::load()?;
    env_logger::Builder::from_env(
        env_logger::Env::default().default_filter_or(&settings.log),
    )
    .format_timestamp(None)
    .init();
    match cli.command {
        Command::Extract(args) => extract::run(args, &settings),
        Command::Search(args) => search::run(args, &settings),
        Command::Eval(args) => eval_cmd::run(args, &settings),
    }
}
