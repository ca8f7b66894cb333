//! Feature database persistence.
//!
//! A [`FeatureDb`] maps document ids to their extracted pages and round-trips
//! through a line-delimited JSON file: one header line carrying the schema
//! version, then exactly one line per page, sorted by `(doc_id, page_index)`.
//! Lengths travel as fixed four-decimal strings (see [`crate::feature`]), so
//! a database survives save→load→save byte-for-byte.
//!
//! Writes go to a temporary file in the target directory followed by an
//! atomic rename: concurrent writers race to last-writer-wins, but a reader
//! can never observe a torn file.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::feature::{DocType, PageFeature};

/// On-disk schema version this build reads and writes.
pub const SCHEMA_VERSION: u32 = 1;

/// Canonical length unit of every stored geometry value.
pub const DB_UNIT: &str = "cm";

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("failed to access feature database: {0}")]
    Io(#[from] std::io::Error),
    #[error("feature database has schema {found}, this build reads schema {expected}")]
    SchemaMismatch { found: u32, expected: u32 },
    #[error("malformed record at line {line}: {detail}")]
    MalformedRecord { line: usize, detail: String },
}

/// Everything known about one document.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentRecord {
    pub source_path: String,
    pub doc_type: DocType,
    /// Sorted by `page_index` (1-based document order; extraction may skip
    /// a broken page, leaving a gap).
    pub pages: Vec<PageFeature>,
}

/// An in-memory feature database.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureDb {
    /// RFC 3339 creation stamp, preserved across save/load.
    pub created: String,
    documents: BTreeMap<String, DocumentRecord>,
}

impl Default for FeatureDb {
    fn default() -> Self {
        Self::new()
    }
}

impl FeatureDb {
    pub fn new() -> FeatureDb {
        let created = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
        FeatureDb { created, documents: BTreeMap::new() }
    }

    /// Adds (or replaces) a document. Pages are sorted by index; their
    /// `doc_id` fields must agree with `doc_id`.
    pub fn insert_document(
        &mut self,
        doc_id: impl Into<String>,
        source_path: impl Into<String>,
        doc_type: DocType,
        mut pages: Vec<PageFeature>,
    ) {
        let doc_id = doc_id.into();
        debug_assert!(pages.iter().all(|p| p.doc_id == doc_id && p.doc_type == doc_type));
        pages.sort_by_key(|p| p.page_index);
        self.documents.insert(
            doc_id,
            DocumentRecord { source_path: source_path.into(), doc_type, pages },
        );
    }

    pub fn documents(&self) -> &BTreeMap<String, DocumentRecord> {
        &self.documents
    }

    pub fn document(&self, doc_id: &str) -> Option<&DocumentRecord> {
        self.documents.get(doc_id)
    }

    pub fn doc_count(&self) -> usize {
        self.documents.len()
    }

    pub fn page_count(&self) -> usize {
        self.documents.values().map(|d| d.pages.len()).sum()
    }

    /// All pages of one document family, ordered by `(doc_id, page_index)`.
    pub fn pages_of_type(&self, doc_type: DocType) -> impl Iterator<Item = &PageFeature> {
        self.documents
            .values()
            .filter(move |d| d.doc_type == doc_type)
            .flat_map(|d| d.pages.iter())
    }

    /// Serializes to `path` atomically (temp file + rename).
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), StoreError> {
        let path = path.as_ref();
        let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        let tmp_path = dir.join(tmp_name(path));

        let result = (|| {
            let mut w = BufWriter::new(fs::File::create(&tmp_path)?);
            serde_json::to_writer(
                &mut w,
                &Header {
                    schema: SCHEMA_VERSION,
                    unit: DB_UNIT.to_string(),
                    created: self.created.clone(),
                },
            )
            .map_err(std::io::Error::other)?;
            w.write_all(b"\n")?;
            for (doc_id, doc) in &self.documents {
                for page in &doc.pages {
                    let record = PageRecord {
                        doc_id: doc_id.clone(),
                        source_path: doc.source_path.clone(),
                        doc_type: doc.doc_type,
                        page_index: page.page_index,
                        page_geometry: page.page_geometry.clone(),
                        objects: page.objects.clone(),
                    };
                    serde_json::to_writer(&mut w, &record).map_err(std::io::Error::other)?;
                    w.write_all(b"\n")?;
                }
            }
            let file = w.into_inner().map_err(|e| e.into_error())?;
            file.sync_all()?;
            fs::rename(&tmp_path, path)?;
            Ok(())
        })();
        if result.is_err() {
            let _ = fs::remove_file(&tmp_path);
        }
        result
    }

    /// Loads and validates a database file.
    pub fn load(path: impl AsRef<Path>) -> Result<FeatureDb, StoreError> {
        let reader = BufReader::new(fs::File::open(path.as_ref())?);
        let mut lines = reader.lines();

        let header_line = lines
            .next()
            .transpose()?
            .ok_or_else(|| malformed(1, "file is empty, expected a header line"))?;
        let header: Header = serde_json::from_str(&header_line)
            .map_err(|e| malformed(1, format!("invalid header: {e}")))?;
        if header.schema != SCHEMA_VERSION {
            return Err(StoreError::SchemaMismatch {
                found: header.schema,
                expected: SCHEMA_VERSION,
            });
        }
        if header.unit != DB_UNIT {
            return Err(malformed(1, format!("unsupported unit `{}`", header.unit)));
        }

        let mut documents: BTreeMap<String, DocumentRecord> = BTreeMap::new();
        for (idx, line) in lines.enumerate() {
            let line_no = idx + 2;
            let line = line?;
            if line.trim().is_empty() {
                return Err(malformed(line_no, "blank line inside record stream"));
            }
            let record: PageRecord = serde_json::from_str(&line)
                .map_err(|e| malformed(line_no, e.to_string()))?;
            let page = PageFeature {
                doc_id: record.doc_id.clone(),
                doc_type: record.doc_type,
                page_index: record.page_index,
                page_geometry: record.page_geometry,
                objects: record.objects,
            };
            let doc = documents.entry(record.doc_id).or_insert_with(|| DocumentRecord {
                source_path: record.source_path.clone(),
                doc_type: record.doc_type,
                pages: Vec::new(),
            });
            if doc.source_path != record.source_path {
                return Err(malformed(line_no, "conflicting source_path within one document"));
            }
            if doc.doc_type != record.doc_type {
                return Err(malformed(line_no, "conflicting doc_type within one document"));
            }
            if doc.pages.iter().any(|p| p.page_index == page.page_index) {
                return Err(malformed(
                    line_no,
                    format!("duplicate page_index {} in document", page.page_index),
                ));
            }
            doc.pages.push(page);
        }
        for doc in documents.values_mut() {
            doc.pages.sort_by_key(|p| p.page_index);
        }
        Ok(FeatureDb { created: header.created, documents })
    }
}

fn malformed(line: usize, detail: impl Into<String>) -> StoreError {
    StoreError::MalformedRecord { line, detail: detail.into() }
}

fn tmp_name(target: &Path) -> String {
    static COUNTER: AtomicU64 = AtomicU64::new(0);
    let stem = target.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    format!(
        ".{stem}.{}.{}.tmp",
        std::process::id(),
        COUNTER.fetch_add(1, Ordering::Relaxed)
    )
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    schema: u32,
    unit: String,
    created: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PageRecord {
    doc_id: String,
    source_path: String,
    doc_type: DocType,
    page_index: u32,
    page_geometry: crate::feature::PageGeometry,
    objects: Vec<crate::feature::LayoutObject>,
}
