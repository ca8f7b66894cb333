//! End-to-end tests of the `layoutret` binary: real processes, real files,
//! asserting on stdout/stderr bodies and the exit-code contract
//! (0 ok, 1 usage, 2 I/O, 3 validation).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ooxml_fixtures::{DocxBuilder, PptxBuilder, Run, XlsxBuilder};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_layoutret"));
    // isolate from the invoking environment
    cmd.env_remove("LAYOUTRET_CONFIG").env_remove("RUST_LOG");
    cmd
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process exited normally")
}

/// Corpus layout used by most tests:
///
/// ```text
/// docs/decks/a.pptx   textbox at x=2.0  (family)
/// docs/decks/b.pptx   textbox at x=2.1  (family)
/// docs/noise.pptx     textbox at x=14.0
/// docs/memo.docx
/// docs/book.xlsx
/// docs/broken.pptx    not a zip archive
/// docs/notes.txt      ignored extension
/// ```
fn write_corpus(root: &Path) {
    let decks = root.join("decks");
    fs::create_dir_all(&decks).unwrap();
    for (name, x) in [("decks/a.pptx", 2.0), ("decks/b.pptx", 2.1), ("noise.pptx", 14.0)] {
        PptxBuilder::new(25.4, 19.05)
            .slide(|s| s.textbox(x, 1.0, 10.0, 3.0, &[Run::sized("t", 18.0)]))
            .slide(|s| s.textbox(x, 1.0, 10.0, 3.0, &[Run::sized("t", 18.0)]))
            .write_to(root.join(name))
            .unwrap();
    }
    DocxBuilder::new()
        .section(|s| s.page_size(21.0, 29.7).paragraph(&[Run::plain("memo")]))
        .write_to(root.join("memo.docx"))
        .unwrap();
    XlsxBuilder::new()
        .sheet(|s| s.zoom(100).cell(3, 3, 0))
        .write_to(root.join("book.xlsx"))
        .unwrap();
    fs::write(root.join("broken.pptx"), b"this is not a zip archive").unwrap();
    fs::write(root.join("notes.txt"), b"ignored").unwrap();
}

/// Runs `extract` over a fresh corpus and returns (corpus dir, db path).
fn extracted_corpus() -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let docs = dir.path().join("docs");
    fs::create_dir_all(&docs).unwrap();
    write_corpus(&docs);
    let db = dir.path().join("features.db");
    let out = bin()
        .args(["extract", "--in"])
        .arg(&docs)
        .arg("--out")
        .arg(&db)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "extract failed: {}", stderr_of(&out));
    (dir, db)
}

fn write_query(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

const FAMILY_QUERY: &str = r#"{
    "doc_type": "presentation",
    "threshold": 0.8,
    "items": [{"kind": "textbox", "fields": {"x": 2.0, "y": 1.0}}]
}"#;

// ---------------------------------------------------------------- extract

#[test]
fn extract_indexes_tree_and_survives_corrupt_files() {
    let (dir, db) = extracted_corpus();

    // summary counts: corrupt file skipped, run still succeeds
    let docs = dir.path().join("docs");
    let out = bin()
        .args(["extract", "--in"])
        .arg(&docs)
        .arg("--out")
        .arg(dir.path().join("again.db"))
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let err = stderr_of(&out);
    assert!(
        err.contains("files seen: 6 / extracted: 5 / skipped: 1"),
        "unexpected summary: {err}"
    );
    assert!(err.contains("broken.pptx"), "skip should be logged: {err}");

    // document ids are /-separated paths relative to --in
    let db = layoutret::store::FeatureDb::load(&db).unwrap();
    assert_eq!(db.doc_count(), 5);
    assert!(db.document("decks/a.pptx").is_some());
    assert!(db.document("memo.docx").is_some());

    // two identical runs write byte-identical databases apart from the
    // header timestamp
    let body = |p: &Path| {
        let text = fs::read_to_string(p).unwrap();
        text.lines().skip(1).collect::<Vec<_>>().join("\n")
    };
    assert_eq!(body(&dir.path().join("features.db")), body(&dir.path().join("again.db")));
}

#[test]
fn extract_type_filter_limits_what_is_indexed() {
    let dir = tempfile::tempdir().unwrap();
    let docs = dir.path().join("docs");
    fs::create_dir_all(&docs).unwrap();
    write_corpus(&docs);
    let db_path = dir.path().join("slides.db");
    let out = bin()
        .args(["extract", "--types", "pptx", "--in"])
        .arg(&docs)
        .arg("--out")
        .arg(&db_path)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(stderr_of(&out).contains("files seen: 4 / extracted: 3 / skipped: 1"));

    let db = layoutret::store::FeatureDb::load(&db_path).unwrap();
    assert_eq!(db.doc_count(), 3);
    assert_eq!(db.pages_of_type(layoutret::feature::DocType::Wordprocessing).count(), 0);
}

#[test]
fn extract_rejects_zero_workers_and_missing_input() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["extract", "--workers", "0", "--in"])
        .arg(dir.path())
        .arg("--out")
        .arg(dir.path().join("x.db"))
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);

    let out = bin()
        .args(["extract", "--in"])
        .arg(dir.path().join("no-such-dir"))
        .arg("--out")
        .arg(dir.path().join("x.db"))
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

// ----------------------------------------------------------------- search

#[test]
fn search_table_ranks_family_pages_first() {
    let (dir, db) = extracted_corpus();
    let query = write_query(dir.path(), "q.json", FAMILY_QUERY);

    let out = bin()
        .args(["search", "--db"])
        .arg(&db)
        .arg("--query")
        .arg(&query)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    // header + 4 family pages (2 docs x 2 slides); noise stays below 0.8
    assert_eq!(lines.len(), 5, "unexpected table:\n{text}");
    let header: Vec<&str> = lines[0].split_whitespace().collect();
    assert_eq!(header, ["doc", "page", "s_value"]);
    let row: Vec<&str> = lines[1].split_whitespace().collect();
    assert_eq!(row, ["decks/a.pptx", "1", "1.0000"]);
    assert!(lines[2].starts_with("decks/a.pptx"));
    assert!(lines[3].starts_with("decks/b.pptx"));
    assert!(!text.contains("noise.pptx"));

    // --top truncates after ranking
    let out = bin()
        .args(["search", "--top", "1", "--db"])
        .arg(&db)
        .arg("--query")
        .arg(&query)
        .output()
        .unwrap();
    assert_eq!(stdout_of(&out).lines().count(), 2);
}

#[test]
fn search_explain_prints_item_and_field_traces() {
    let (dir, db) = extracted_corpus();
    let query = write_query(dir.path(), "q.json", FAMILY_QUERY);
    let out = bin()
        .args(["search", "--explain", "--top", "1", "--db"])
        .arg(&db)
        .arg("--query")
        .arg(&query)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let text = stdout_of(&out);
    assert!(text.contains("item 0 textbox -> object #0"), "missing item trace:\n{text}");
    assert!(text.contains("[am4]"), "missing field method:\n{text}");
    assert!(text.contains("s=1.0000"), "missing field score:\n{text}");
}

#[test]
fn search_records_format_is_line_json() {
    let (dir, db) = extracted_corpus();
    let query = write_query(dir.path(), "q.json", FAMILY_QUERY);
    let out = bin()
        .args(["search", "--format", "records", "--db"])
        .arg(&db)
        .arg("--query")
        .arg(&query)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let text = stdout_of(&out);
    let mut lines = text.lines();

    let header: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(header["threshold"], 0.8);
    assert_eq!(header["result_count"], 4);

    let first: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(first["doc_id"], "decks/a.pptx");
    assert_eq!(first["page_index"], 1);
    assert_eq!(first["s_value_final"], 1.0);
    assert!(first["traces"].is_array());
    assert_eq!(lines.count(), 3);
}

#[test]
fn search_threshold_flag_overrides_query_file() {
    let (dir, db) = extracted_corpus();
    let query = write_query(dir.path(), "q.json", FAMILY_QUERY);

    // 0.1 lets the noise deck through as well: 5 docs x 2 pages of pptx,
    // but memo/book are a different type and never scanned
    let out = bin()
        .args(["search", "--threshold", "0.1", "--format", "records", "--db"])
        .arg(&db)
        .arg("--query")
        .arg(&query)
        .output()
        .unwrap();
    let text = stdout_of(&out);
    let header: serde_json::Value =
        serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(header["threshold"], 0.1);
    assert_eq!(header["result_count"], 6);

    // `auto` resolves from the item count (one item -> 0.90)
    let out = bin()
        .args(["search", "--threshold", "auto", "--format", "records", "--db"])
        .arg(&db)
        .arg("--query")
        .arg(&query)
        .output()
        .unwrap();
    let text = stdout_of(&out);
    let header: serde_json::Value =
        serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(header["threshold"], 0.9);

    // out-of-range and non-numeric values are usage errors
    for bad in ["1.5", "-0.2", "soon"] {
        let out = bin()
            .args(["search", "--threshold", bad, "--db"])
            .arg(&db)
            .arg("--query")
            .arg(&query)
            .output()
            .unwrap();
        assert_eq!(code(&out), 1, "--threshold {bad} should be a usage error");
    }
}

#[test]
fn search_notices_empty_type_population() {
    let (dir, db) = extracted_corpus();
    let query = write_query(
        dir.path(),
        "q.json",
        r#"{"doc_type": "wordprocessing",
            "items": [{"kind": "image", "fields": {"width": 9.5}}]}"#,
    );
    // build a slides-only database so no wordprocessing page exists
    let slides_db = dir.path().join("slides.db");
    let out = bin()
        .args(["extract", "--types", "pptx", "--in"])
        .arg(dir.path().join("docs"))
        .arg("--out")
        .arg(&slides_db)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);

    let out = bin()
        .args(["search", "--db"])
        .arg(&slides_db)
        .arg("--query")
        .arg(&query)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(stdout_of(&out).is_empty());
    assert!(
        stderr_of(&out).contains("0 pages scanned of type wordprocessing"),
        "missing notice: {}",
        stderr_of(&out)
    );
    drop(db);
}

#[test]
fn search_error_classes_map_to_exit_codes() {
    let (dir, db) = extracted_corpus();
    let query = write_query(dir.path(), "q.json", FAMILY_QUERY);

    // missing database file: I/O
    let out = bin()
        .args(["search", "--db"])
        .arg(dir.path().join("absent.db"))
        .arg("--query")
        .arg(&query)
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert!(stderr_of(&out).contains("error:"));

    // present but not a feature database: validation
    let junk = dir.path().join("junk.db");
    fs::write(&junk, "not a database\n").unwrap();
    let out = bin()
        .args(["search", "--db"])
        .arg(&junk)
        .arg("--query")
        .arg(&query)
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);

    // query with a field the registry does not define: validation
    let bad_query = write_query(
        dir.path(),
        "bad.json",
        r#"{"doc_type": "presentation",
            "items": [{"kind": "textbox", "fields": {"sparkle": 1.0}}]}"#,
    );
    let out = bin()
        .args(["search", "--db"])
        .arg(&db)
        .arg("--query")
        .arg(&bad_query)
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);
    assert!(stderr_of(&out).contains("sparkle"), "diagnostic should name the field");

    // missing query file: I/O
    let out = bin()
        .args(["search", "--db"])
        .arg(&db)
        .arg("--query")
        .arg(dir.path().join("absent.json"))
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

// ------------------------------------------------------------------- eval

#[test]
fn eval_reports_per_query_rows_grouped_by_file_stem() {
    let (dir, db) = extracted_corpus();
    let queries = dir.path().join("queries");
    fs::create_dir_all(&queries).unwrap();
    write_query(&queries, "fam.q1.json", FAMILY_QUERY);
    write_query(
        &queries,
        "fam.q2.json",
        r#"{"doc_type": "presentation", "threshold": 0.99,
            "items": [{"kind": "textbox", "fields": {"x": 2.0, "y": 1.0}}]}"#,
    );
    let truth = write_query(
        dir.path(),
        "truth.json",
        r#"{"groups": {"fam": ["decks/a.pptx", "decks/b.pptx", "ghost.pptx"]}}"#,
    );

    let out = bin()
        .args(["eval", "--db"])
        .arg(&db)
        .arg("--queries")
        .arg(&queries)
        .arg("--truth")
        .arg(&truth)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "eval failed: {}", stderr_of(&out));
    // truth names a document the extractor never saw: warn, don't fail
    assert!(stderr_of(&out).contains("ghost.pptx"));

    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3, "header + one row per query:\n{text}");
    let header: Vec<&str> = lines[0].split_whitespace().collect();
    assert_eq!(
        header,
        ["group", "query", "threshold", "n", "A", "B", "C", "pages", "precision", "recall"]
    );
    // q1 at 0.8 retrieves both family decks; ghost counts as a miss
    let q1: Vec<&str> = lines[1].split_whitespace().collect();
    assert_eq!(q1, ["fam", "fam.q1.json", "0.80", "1", "2", "0", "1", "4", "1.00", "0.67"]);
    // q2 at 0.99 retrieves only the exact-layout deck
    let q2: Vec<&str> = lines[2].split_whitespace().collect();
    assert_eq!(q2, ["fam", "fam.q2.json", "0.99", "1", "1", "0", "2", "2", "1.00", "0.33"]);

    // records shape carries the same counts
    let out = bin()
        .args(["eval", "--format", "records", "--db"])
        .arg(&db)
        .arg("--queries")
        .arg(&queries)
        .arg("--truth")
        .arg(&truth)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let text = stdout_of(&out);
    let mut lines = text.lines();
    let header: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(header["row_count"], 2);
    let row: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(row["group"], "fam");
    assert_eq!(row["query"], "fam.q1.json");
    assert_eq!(row["a"], 2);
    assert_eq!(row["c"], 1);
}

#[test]
fn eval_rejects_empty_query_dir_and_bad_truth() {
    let (dir, db) = extracted_corpus();
    let queries = dir.path().join("queries");
    fs::create_dir_all(&queries).unwrap();

    let truth = write_query(dir.path(), "truth.json", r#"{"groups": {"fam": []}}"#);
    let out = bin()
        .args(["eval", "--db"])
        .arg(&db)
        .arg("--queries")
        .arg(&queries)
        .arg("--truth")
        .arg(&truth)
        .output()
        .unwrap();
    assert_eq!(code(&out), 1, "empty query dir is a usage error");

    write_query(&queries, "fam.q1.json", FAMILY_QUERY);
    let bad_truth = write_query(dir.path(), "bad-truth.json", "[1, 2, 3]");
    let out = bin()
        .args(["eval", "--db"])
        .arg(&db)
        .arg("--queries")
        .arg(&queries)
        .arg("--truth")
        .arg(&bad_truth)
        .output()
        .unwrap();
    assert_eq!(code(&out), 3, "malformed truth is a validation error");

    // a query group with no truth entry is a validation error
    write_query(&queries, "unlabeled.json", FAMILY_QUERY);
    let out = bin()
        .args(["eval", "--db"])
        .arg(&db)
        .arg("--queries")
        .arg(&queries)
        .arg("--truth")
        .arg(&truth)
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);
    assert!(stderr_of(&out).contains("unlabeled"));
}

// ----------------------------------------------------------------- config

#[test]
fn config_file_adjusts_auto_thresholds_and_flags_still_win() {
    let (dir, db) = extracted_corpus();
    let query = write_query(
        dir.path(),
        "q.json",
        r#"{"doc_type": "presentation",
            "items": [{"kind": "textbox", "fields": {"x": 2.0, "y": 1.0}}]}"#,
    );
    let config = dir.path().join("layoutret.toml");
    fs::write(&config, "[[thresholds]]\nn = 1\ns = 0.15\n").unwrap();

    // auto threshold for a 1-item query now resolves to the override
    let out = bin()
        .env("LAYOUTRET_CONFIG", &config)
        .args(["search", "--format", "records", "--db"])
        .arg(&db)
        .arg("--query")
        .arg(&query)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    let text = stdout_of(&out);
    let header: serde_json::Value =
        serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(header["threshold"], 0.15);
    assert_eq!(header["result_count"], 6);

    // an explicit flag still overrides the config file
    let out = bin()
        .env("LAYOUTRET_CONFIG", &config)
        .args(["search", "--threshold", "0.9", "--format", "records", "--db"])
        .arg(&db)
        .arg("--query")
        .arg(&query)
        .output()
        .unwrap();
    let text = stdout_of(&out);
    let header: serde_json::Value =
        serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(header["threshold"], 0.9);
}

#[test]
fn config_errors_use_io_and_validation_codes() {
    let (dir, db) = extracted_corpus();
    let query = write_query(dir.path(), "q.json", FAMILY_QUERY);
    let search = |config: &Path| {
        let out = bin()
            .env("LAYOUTRET_CONFIG", config)
            .args(["search", "--db"])
            .arg(&db)
            .arg("--query")
            .arg(&query)
            .output()
            .unwrap();
        (code(&out), stderr_of(&out))
    };

    // named but unreadable: I/O
    let (exit, _) = search(&dir.path().join("absent.toml"));
    assert_eq!(exit, 2);

    // decay shape that can exceed full credit: validation
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "lambda = 0.3\n").unwrap();
    let (exit, err) = search(&bad);
    assert_eq!(exit, 3, "{err}");

    // unknown keys are rejected rather than ignored
    let typo = dir.path().join("typo.toml");
    fs::write(&typo, "lamda = 0.2\n").unwrap();
    let (exit, err) = search(&typo);
    assert_eq!(exit, 3);
    assert!(err.contains("lamda"), "diagnostic should name the key: {err}");
}

// ------------------------------------------------------------- invocation

#[test]
fn help_exits_zero_and_bad_usage_exits_one() {
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(code(&out), 0);
    assert!(stdout_of(&out).contains("extract"));

    let out = bin().arg("shred").output().unwrap();
    assert_eq!(code(&out), 1);

    let out = bin().arg("search").output().unwrap(); // missing required flags
    assert_eq!(code(&out), 1);
}
