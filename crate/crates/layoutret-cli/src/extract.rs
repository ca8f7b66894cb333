//! `extract` subcommand: walk a directory tree, pull layout features out of
//! every office document found, and save one feature database.
//!
//! Per-file failures are logged and skipped; the command still exits 0 so a
//! handful of corrupt files cannot abort a large indexing run.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::Args;
use layoutret::extractor::extract_document;
use layoutret::feature::DocType;
use layoutret::store::FeatureDb;
use rayon::prelude::*;
use walkdir::WalkDir;

use crate::Failure;
use crate::config::Settings;

#[derive(Args)]
pub struct ExtractArgs {
    /// Directory scanned recursively for documents
    #[arg(long = "in", value_name = "DIR")]
    input: PathBuf,

    /// Feature database file to write
    #[arg(long, value_name = "DB")]
    out: PathBuf,

    /// Comma-separated document types to index
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "pptx,docx,xlsx",
        value_name = "TYPES"
    )]
    types: Vec<TypeFilter>,

    /// Extraction threads; defaults to the logical core count
    #[arg(long, value_name = "N")]
    workers: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
enum TypeFilter {
    Pptx,
    Docx,
    Xlsx,
}

impl TypeFilter {
    fn extension(self) -> &'static str {
        match self {
            TypeFilter::Pptx => "pptx",
            TypeFilter::Docx => "docx",
            TypeFilter::Xlsx => "xlsx",
        }
    }

    fn doc_type(self) -> DocType {
        match self {
            TypeFilter::Pptx => DocType::Presentation,
            TypeFilter::Docx => DocType::Wordprocessing,
            TypeFilter::Xlsx => DocType::Spreadsheet,
        }
    }
}

pub fn run(args: ExtractArgs, settings: &Settings) -> Result<(), Failure> {
    let allowed: BTreeSet<TypeFilter> = args.types.iter().copied().collect();
    if allowed.is_empty() {
        return Err(Failure::Usage("--types must name at least one type".into()));
    }
    let workers = args.workers.or(settings.workers);
    if workers == Some(0) {
        return Err(Failure::Usage("--workers must be at least 1".into()));
    }
    if !args.input.is_dir() {
        return Err(Failure::Io(format!(
            "input {} is not a readable directory",
            args.input.display()
        )));
    }

    // Walk in file-name order so document ids, logs, and the saved database
    // come out identical across runs regardless of filesystem order.
    let mut candidates: Vec<(String, PathBuf)> = Vec::new();
    for entry in WalkDir::new(&args.input).sort_by_file_name() {
        let entry =
            entry.map_err(|e| Failure::Io(format!("scanning {}: {e}", args.input.display())))?;
        if !entry.file_type().is_file() {
            continue;
        }
        let Some(ext) = entry
            .path()
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase())
        else {
            continue;
        };
        if !allowed.iter().any(|t| t.extension() == ext) {
            continue;
        }
        candidates.push((relative_id(&args.input, entry.path()), entry.path().to_path_buf()));
    }
    let seen = candidates.len();

    let pool = build_pool(workers)?;
    let outcomes: Vec<_> = pool.install(|| {
        candidates
            .par_iter()
            .map(|(doc_id, path)| (doc_id, path, extract_document(path, doc_id)))
            .collect()
    });

    // Insert sequentially in walk order: parallelism above only affects
    // timing, never database contents.
    let wanted: BTreeSet<DocType> = allowed.iter().map(|t| t.doc_type()).collect();
    let mut db = FeatureDb::new();
    let mut extracted = 0usize;
    let mut skipped = 0usize;
    for (doc_id, path, outcome) in outcomes {
        match outcome {
            Ok((doc_type, pages)) if wanted.contains(&doc_type) => {
                db.insert_document(doc_id, &path.display().to_string(), doc_type, pages);
                extracted += 1;
            }
            Ok((doc_type, _)) => {
                log::warn!(
                    "{}: contains a {} document, which --types excludes",
                    path.display(),
                    doc_type.as_str()
                );
                skipped += 1;
            }
            Err(e) => {
                log::warn!("{}: {e}", path.display());
                skipped += 1;
            }
        }
    }

    db.save(&args.out)
        .map_err(|e| Failure::Io(format!("writing {}: {e}", args.out.display())))?;
    eprintln!("files seen: {seen} / extracted: {extracted} / skipped: {skipped}");
    Ok(())
}

/// Document id: the path relative to the scan root, `/`-separated on every
/// platform so databases built on different systems agree.
fn relative_id(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

fn build_pool(workers: Option<usize>) -> Result<rayon::ThreadPool, Failure> {
    // A local pool, not the global one: the worker count is per-invocation
    // state and must not leak into other uses of rayon in this process.
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Failure::Validation(format!("worker pool: {e}")))
}
