//! `eval` subcommand: run every query file in a directory against the
//! database and report retrieval counts, precision, and recall per query,
//! judged at the document level against labeled groups.

use std::io::{self, Write};
use std::path::PathBuf;

use clap::Args;
use layoutret::eval::{BenchQuery, EvalError, GroundTruth, run_benchmark};
use layoutret::query::parse_query;

use crate::config::Settings;
use crate::{Failure, OutputFormat};

#[derive(Args)]
pub struct EvalArgs {
    /// Feature database produced by `extract`
    #[arg(long, value_name = "DB")]
    db: PathBuf,

    /// Directory of query files (*.json); the file-name stem before the
    /// first `.` names the ground-truth group
    #[arg(long, value_name = "DIR")]
    queries: PathBuf,

    /// Ground-truth file (JSON object: group -> list of document ids)
    #[arg(long, value_name = "FILE")]
    truth: PathBuf,

    /// Output shape
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
}

pub fn run(args: EvalArgs, settings: &Settings) -> Result<(), Failure> {
    let db = crate::search::load_db(&args.db)?;
    let truth = GroundTruth::load(&args.truth).map_err(|e| match e {
        EvalError::Io(_) => Failure::Io(format!("reading {}: {e}", args.truth.display())),
        other => Failure::Validation(format!("{}: {other}", args.truth.display())),
    })?;

    let mut query_files: Vec<PathBuf> = std::fs::read_dir(&args.queries)
        .map_err(|e| Failure::Io(format!("reading {}: {e}", args.queries.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .is_some_and(|ext| ext.eq_ignore_ascii_case("json"))
        })
        .collect();
    query_files.sort();
    if query_files.is_empty() {
        return Err(Failure::Usage(format!(
            "{} contains no .json query files",
            args.queries.display()
        )));
    }

    let mut queries = Vec::with_capacity(query_files.len());
    for path in &query_files {
        let label = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let group = label.split('.').next().unwrap_or(&label).to_string();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Io(format!("reading {}: {e}", path.display())))?;
        let query =
            parse_query(&text).map_err(|e| Failure::Validation(format!("{label}: {e}")))?;
        queries.push(BenchQuery {
            group,
            label,
            query,
        });
    }

    for (group, doc) in truth.unknown_docs(&db) {
        log::warn!("ground-truth document {doc} (group {group}) is not in the database");
    }

    let report = run_benchmark(&settings.matcher, &db, &queries, &truth)
        .map_err(|e| Failure::Validation(e.to_string()))?;

    let stdout = io::stdout();
    let mut out = stdout.lock();
    Failure::from_write(match args.format {
        OutputFormat::Table => writeln!(out, "{}", report.to_table().trim_end_matches('\n')),
        OutputFormat::Records => report.write_records(&mut out),
    })
}
