//! Precision/recall benchmarking over labeled document groups.
//!
//! Ground truth assigns documents to layout groups; each benchmark query
//! targets one group. A document counts as retrieved when any of its pages
//! clears the threshold, so group membership and per-page scoring can be
//! compared on equal footing.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use crate::matcher::{MatcherConfig, search};
use crate::query::RetrievalQuery;
use crate::store::FeatureDb;
use crate::units::fmt2;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("reading ground truth: {0}")]
    Io(#[from] io::Error),
    #[error("malformed ground truth: {detail}")]
    Malformed { detail: String },
    #[error("query group `{group}` is not in the ground truth")]
    UnknownGroup { group: String },
}

/// Labeled relevance: group id → the documents belonging to that layout
/// group.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroundTruth {
    pub groups: BTreeMap<String, BTreeSet<String>>,
}

impl GroundTruth {
    pub fn load(path: &Path) -> Result<Self, EvalError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Parses `{"groups": {"g1": ["a.pptx", ...], ...}}`.
    pub fn from_json(text: &str) -> Result<Self, EvalError> {
        let malformed = |detail: String| EvalError::Malformed { detail };
        let root: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| malformed(format!("invalid JSON: {e}")))?;
        let obj = root
            .as_object()
            .ok_or_else(|| malformed("top level must be an object".into()))?;
        for key in obj.keys() {
            if key != "groups" {
                return Err(malformed(format!("unknown key `{key}`")));
            }
        }
        let raw_groups = obj
            .get("groups")
            .and_then(|g| g.as_object())
            .ok_or_else(|| malformed("`groups` must be an object".into()))?;
        let mut groups = BTreeMap::new();
        for (id, members) in raw_groups {
            let arr = members
                .as_array()
                .ok_or_else(|| malformed(format!("group `{id}` must be an array")))?;
            let mut set = BTreeSet::new();
            for m in arr {
                match m.as_str() {
                    Some(s) if !s.is_empty() => set.insert(s.to_string()),
                    _ => {
                        return Err(malformed(format!(
                            "group `{id}` contains a non-string member"
                        )));
                    }
                };
            }
            groups.insert(id.clone(), set);
        }
        Ok(GroundTruth { groups })
    }

    /// Labeled documents missing from the feature db, for operator warnings.
    pub fn unknown_docs<'a>(&'a self, db: &FeatureDb) -> Vec<(&'a str, &'a str)> {
        self.groups
            .iter()
            .flat_map(|(g, members)| members.iter().map(move |m| (g.as_str(), m.as_str())))
            .filter(|(_, m)| db.document(m).is_none())
            .collect()
    }
}

/// Retrieval outcome counts against one relevance set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrCounts {
    /// Relevant documents retrieved.
    pub a: usize,
    /// Irrelevant documents retrieved.
    pub b: usize,
    /// Relevant documents missed.
    pub c: usize,
}

impl PrCounts {
    /// a/(a+b); undefined when nothing was retrieved.
    pub fn precision(&self) -> Option<f64> {
        match self.a + self.b {
            0 => None,
            n => Some(self.a as f64 / n as f64),
        }
    }

    /// a/(a+c); undefined when nothing is relevant.
    pub fn recall(&self) -> Option<f64> {
        match self.a + self.c {
            0 => None,
            n => Some(self.a as f64 / n as f64),
        }
    }
}

pub fn precision_recall(
    retrieved: &BTreeSet<String>,
    relevant: &BTreeSet<String>,
) -> PrCounts {
    let a = retrieved.intersection(relevant).count();
    PrCounts { a, b: retrieved.len() - a, c: relevant.len() - a }
}

/// One benchmark query bound to its target group.
#[derive(Debug, Clone)]
pub struct BenchQuery {
    pub group: String,
    /// Operator-facing name (normally the query's file name).
    pub label: String,
    pub query: RetrievalQuery,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalRow {
    pub group: String,
    pub query: String,
    pub threshold: f64,
    /// Query item count.
    pub n: usize,
    #[serde(flatten)]
    pub counts: PrCounts,
    pub pages_retrieved: usize,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
}

impl EvalReport {
    /// Plain-text table, one row per (group, query).
    pub fn to_table(&self) -> String {
        let mut cells: Vec<[String; 10]> = vec![[
            "group".into(),
            "query".into(),
            "threshold".into(),
            "n".into(),
            "A".into(),
            "B".into(),
            "C".into(),
            "pages".into(),
            "precision".into(),
            "recall".into(),
        ]];
        let ratio = |v: Option<f64>| v.map_or_else(|| "-".to_string(), fmt2);
        for r in &self.rows {
            cells.push([
                r.group.clone(),
                r.query.clone(),
                fmt2(r.threshold),
                r.n.to_string(),
                r.counts.a.to_string(),
                r.counts.b.to_string(),
                r.counts.c.to_string(),
                r.pages_retrieved.to_string(),
                ratio(r.precision),
                ratio(r.recall),
            ]);
        }
        let widths: Vec<usize> = (0..10)
            .map(|i| cells.iter().map(|row| row[i].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in &cells {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push_str("  ");
                }
                // names left-aligned, numbers right-aligned
                if i < 2 {
                    let _ = write!(out, "{cell:<width$}", width = widths[i]);
                } else {
                    let _ = write!(out, "{cell:>width$}", width = widths[i]);
                }
            }
            while out.ends_with(' ') {
                out.pop();
            }
            out.push('\n');
        }
        out
    }

    /// One JSON record per line, preceded by a header line.
    pub fn write_records<W: Write>(&self, mut w: W) -> io::Result<()> {
        #[derive(Serialize)]
        struct Header {
            schema: u32,
            created: String,
            row_count: usize,
        }
        let header = Header {
            schema: crate::store::SCHEMA_VERSION,
            created: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            row_count: self.rows.len(),
        };
        writeln!(w, "{}", serde_json::to_string(&header)?)?;
        for row in &self.rows {
            writeln!(w, "{}", serde_json::to_string(row)?)?;
        }
        Ok(())
    }
}

/// Runs every query against the db and tabulates per-group retrieval
/// quality. Rows keep the input query order.
pub fn run_benchmark(
    cfg: &MatcherConfig,
    db: &FeatureDb,
    queries: &[BenchQuery],
    truth: &GroundTruth,
) -> Result<EvalReport, EvalError> {
    let mut rows = Vec::with_capacity(queries.len());
    for bq in queries {
        let relevant = truth
            .groups
            .get(&bq.group)
            .ok_or_else(|| EvalError::UnknownGroup { group: bq.group.clone() })?;
        let hits = search(cfg, &bq.query, db, None);
        let retrieved: BTreeSet<String> =
            hits.iter().map(|h| h.doc_id.clone()).collect();
        let counts = precision_recall(&retrieved, relevant);
        rows.push(EvalRow {
            group: bq.group.clone(),
            query: bq.label.clone(),
            threshold: cfg.resolve_threshold(bq.query.threshold, bq.query.query_count()),
            n: bq.query.query_count(),
            counts,
            pages_retrieved: hits.len(),
            precision: counts.precision(),
            recall: counts.recall(),
        });
    }
    Ok(EvalReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feature::{
        DocType, LayoutObject, PageFeature, PageGeometry, TableProps, TextProps,
    };
    use crate::query::parse_query;

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn counts_follow_set_arithmetic() {
        let counts = precision_recall(
            &set(&["a", "b", "c"]),
            &set(&["b", "c", "d", "e"]),
        );
        assert_eq!(counts, PrCounts { a: 2, b: 1, c: 2 });

        let none = precision_recall(&set(&[]), &set(&["a"]));
        assert_eq!(none.precision(), None);
        assert_eq!(none.recall(), Some(0.0));

        let empty = precision_recall(&set(&[]), &set(&[]));
        assert_eq!(empty.precision(), None);
        assert_eq!(empty.recall(), None);

        let perfect = precision_recall(&set(&["a", "b"]), &set(&["a", "b"]));
        assert_eq!(perfect.precision(), Some(1.0));
        assert_eq!(perfect.recall(), Some(1.0));
    }

    #[test]
    fn two_decimal_display_of_reference_count_sets() {
        // (A, B, C) triples with their expected 2 d.p. precision/recall
        let rows = [
            (5, 1, 0, "0.83", "1.00"),
            (5, 3, 0, "0.63", "1.00"),
            (4, 0, 0, "1.00", "1.00"),
            (4, 0, 0, "1.00", "1.00"),
            (9, 5, 3, "0.64", "0.75"),
            (12, 7, 0, "0.63", "1.00"),
        ];
        for (a, b, c, precision, recall) in rows {
            let counts = PrCounts { a, b, c };
            assert_eq!(fmt2(counts.precision().unwrap()), precision, "A={a} B={b}");
            assert_eq!(fmt2(counts.recall().unwrap()), recall, "A={a} C={c}");
        }
    }

    #[test]
    fn truth_parses_and_rejects_garbage() {
        let truth = GroundTruth::from_json(
            r#"{"groups": {"g1": ["a.pptx", "b.pptx"], "g2": ["c.pptx"]}}"#,
        )
        .unwrap();
        assert_eq!(truth.groups.len(), 2);
        assert!(truth.groups["g1"].contains("a.pptx"));

        for bad in [
            "[]",
            r#"{"groups": {"g1": [1]}}"#,
            r#"{"groups": {"g1": "a"}}"#,
            r#"{"groups": {}, "extra": 1}"#,
            "not json",
        ] {
            assert!(
                matches!(GroundTruth::from_json(bad), Err(EvalError::Malformed { .. })),
                "accepted: {bad}"
            );
        }
    }

    fn table_page(doc_id: &str, rows: u32, cols: u32) -> PageFeature {
        PageFeature {
            doc_id: doc_id.to_string(),
            doc_type: DocType::Presentation,
            page_index: 1,
            page_geometry: PageGeometry {
                width: Some(25.4),
                height: Some(19.05),
                ..PageGeometry::default()
            },
            objects: vec![LayoutObject::table(
                None,
                TableProps { rows, cols },
                TextProps::default(),
            )],
        }
    }

    fn planted_db() -> FeatureDb {
        let mut db = FeatureDb::new();
        for (doc, rows, cols) in [
            ("g1-a.pptx", 3, 2),
            ("g1-b.pptx", 3, 2),
            ("g1-c.pptx", 3, 2),
            ("noise.pptx", 9, 4),
        ] {
            db.insert_document(doc, doc, DocType::Presentation, vec![table_page(doc, rows, cols)]);
        }
        db
    }

    #[test]
    fn benchmark_tabulates_per_group_rows() {
        let db = planted_db();
        let truth = GroundTruth::from_json(
            r#"{"groups": {"g1": ["g1-a.pptx", "g1-b.pptx", "g1-c.pptx"]}}"#,
        )
        .unwrap();
        let query = parse_query(
            r#"{"doc_type":"presentation","items":[
                {"kind":"table","fields":{"rows":3,"columns":2}}]}"#,
        )
        .unwrap();
        let queries = vec![
            BenchQuery { group: "g1".into(), label: "g1.tables".into(), query: query.clone() },
            BenchQuery { group: "g1".into(), label: "g1.again".into(), query },
        ];
        let report =
            run_benchmark(&MatcherConfig::default(), &db, &queries, &truth).unwrap();
        assert_eq!(report.rows.len(), 2);
        let row = &report.rows[0];
        assert_eq!((row.counts.a, row.counts.b, row.counts.c), (3, 0, 0));
        assert_eq!(row.precision, Some(1.0));
        assert_eq!(row.recall, Some(1.0));
        assert_eq!(row.threshold, 0.90); // auto at n = 1
        assert_eq!(row.pages_retrieved, 3);

        let table = report.to_table();
        assert!(table.starts_with("group"));
        assert_eq!(table.lines().count(), 3);
        assert!(table.contains("1.00"));

        let mut buf = Vec::new();
        report.write_records(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        let row: serde_json::Value =
            serde_json::from_str(text.lines().nth(1).unwrap()).unwrap();
        assert_eq!(row["a"], 3);
        assert_eq!(row["recall"], 1.0);
    }

    #[test]
    fn benchmark_rejects_unknown_groups() {
        let db = planted_db();
        let truth = GroundTruth::from_json(r#"{"groups": {"g1": ["g1-a.pptx"]}}"#).unwrap();
        let query = parse_query(
            r#"{"doc_type":"presentation","items":[
                {"kind":"table","fields":{"rows":3,"columns":2}}]}"#,
        )
        .unwrap();
        let queries =
            vec![BenchQuery { group: "g9".into(), label: "q".into(), query }];
        let err = run_benchmark(&MatcherConfig::default(), &db, &queries, &truth)
            .unwrap_err();
        assert!(matches!(err, EvalError::UnknownGroup { group } if group == "g9"));
    }

    #[test]
    fn missing_labeled_docs_are_reported() {
        let db = planted_db();
        let truth = GroundTruth::from_json(
            r#"{"groups": {"g1": ["g1-a.pptx", "ghost.pptx"]}}"#,
        )
        .unwrap();
        assert_eq!(truth.unknown_docs(&db), vec![("g1", "ghost.pptx")]);
    }
}
