//! `search` subcommand: load a feature database, score every page of the
//! query's document type, and print the pages that clear the threshold,
//! best first.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::Args;
use layoutret::matcher::{MatchedRef, ScoredPage, search, write_results};
use layoutret::query::{Threshold, parse_query};
use layoutret::store::{FeatureDb, StoreError};

use crate::config::Settings;
use crate::{Failure, OutputFormat};

#[derive(Args)]
pub struct SearchArgs {
    /// Feature database produced by `extract`
    #[arg(long, value_name = "DB")]
    db: PathBuf,

    /// Query file (JSON)
    #[arg(long, value_name = "FILE")]
    query: PathBuf,

    /// `auto` or a fixed value in [0, 1]; overrides the query file
    #[arg(long, value_name = "auto|FLOAT")]
    threshold: Option<String>,

    /// Keep only the N best pages
    #[arg(long, value_name = "N")]
    top: Option<usize>,

    /// Add per-item and per-field match traces to table output
    #[arg(long)]
    explain: bool,

    /// Output shape
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
}

pub fn run(args: SearchArgs, settings: &Settings) -> Result<(), Failure> {
    let db = load_db(&args.db)?;
    let text = std::fs::read_to_string(&args.query)
        .map_err(|e| Failure::Io(format!("reading {}: {e}", args.query.display())))?;
    let mut query = parse_query(&text)
        .map_err(|e| Failure::Validation(format!("{}: {e}", args.query.display())))?;
    if let Some(raw) = &args.threshold {
        query.threshold = parse_threshold_flag(raw)?;
    }

    let scanned = db.pages_of_type(query.doc_type).count();
    if scanned == 0 {
        eprintln!("0 pages scanned of type {}", query.doc_type.as_str());
    }
    let hits = search(&settings.matcher, &query, &db, args.top);
    let threshold = settings
        .matcher
        .resolve_threshold(query.threshold, query.query_count());
    log::info!(
        "{scanned} pages scanned, {} at or above threshold {threshold}",
        hits.len()
    );

    let stdout = io::stdout();
    let mut out = stdout.lock();
    Failure::from_write(match args.format {
        OutputFormat::Records => write_results(&mut out, threshold, &hits),
        OutputFormat::Table => print_table(&mut out, &hits, args.explain),
    })
}

/// Shared with `eval`: database read failures are I/O errors, anything wrong
/// with the bytes themselves (schema, malformed records) is validation.
pub fn load_db(path: &Path) -> Result<FeatureDb, Failure> {
    FeatureDb::load(path).map_err(|e| match e {
        StoreError::Io(_) => Failure::Io(format!("reading {}: {e}", path.display())),
        other => Failure::Validation(format!("{}: {other}", path.display())),
    })
}

pub fn parse_threshold_flag(raw: &str) -> Result<Threshold, Failure> {
    if raw.eq_ignore_ascii_case("auto") {
        return Ok(Threshold::Auto);
    }
    match raw.parse::<f64>() {
        Ok(v) if (0.0..=1.0).contains(&v) => Ok(Threshold::Fixed(v)),
        _ => Err(Failure::Usage(format!(
            "--threshold must be `auto` or a number in [0, 1], got `{raw}`"
        ))),
    }
}

fn print_table(out: &mut impl Write, hits: &[ScoredPage], explain: bool) -> io::Result<()> {
    if hits.is_empty() {
        return Ok(());
    }
    let doc_width = hits
        .iter()
        .map(|h| h.doc_id.len())
        .max()
        .unwrap_or(0)
        .max("doc".len());
    writeln!(out, "{:<doc_width$}  {:>4}  {:>7}", "doc", "page", "s_value")?;
    for hit in hits {
        writeln!(
            out,
            "{:<doc_width$}  {:>4}  {:>7.4}",
            hit.doc_id, hit.page_index, hit.s_value_final
        )?;
        if explain {
            print_traces(out, hit)?;
        }
    }
    Ok(())
}

fn print_traces(out: &mut impl Write, hit: &ScoredPage) -> io::Result<()> {
    for trace in &hit.traces {
        let matched = match &trace.matched {
            Some(MatchedRef::PageGeometry) => "page geometry".to_string(),
            Some(MatchedRef::Object { ordinal }) => format!("object #{ordinal}"),
            None => "no match".to_string(),
        };
        writeln!(
            out,
            "  item {} {} -> {matched}  s={:.4}",
            trace.item_index, trace.kind, trace.s_value_item
        )?;
        for field in &trace.fields {
            let method = format!("{:?}", field.method).to_lowercase();
            let mut line = format!("    {} [{method}] q={}", field.field, field.query_value);
            if let Some(value) = &field.feature_value {
                line.push_str(&format!(" f={value}"));
            }
            if let (Some(d), Some(range)) = (field.d, field.distance_range) {
                line.push_str(&format!(" d={d:.4}/{range:.4}"));
            }
            writeln!(out, "{line}  s={:.4}", field.s_value_field)?;
        }
    }
    Ok(())
}
