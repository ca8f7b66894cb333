//! The closed registry of queryable fields.
//!
//! Every `(document family, item kind, field)` triple a query may mention is
//! enumerated here together with its value class, matching method, and
//! bounds. The parser rejects anything outside this table, so the matcher
//! can assume every field it sees is well-typed and in range.

use std::sync::LazyLock;

use crate::feature::{DocType, ObjectKind};

/// What shape of value a field takes in a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueClass {
    /// Scalar length in centimeters (inch queries are converted).
    Length,
    /// Non-negative integer (counts, zoom percent).
    Count,
    /// Free text compared case-insensitively (preset shape names).
    Text,
    /// Chart family with dimensionality split out (`barChart`, `bar3DChart`).
    Chart,
    /// R1C1 cell reference.
    CellRef,
    /// List of numbers (font sizes in points).
    Numbers,
    /// List of hex colors, six digits each.
    Colors,
    /// List of free-text values (font names, fill patterns, border styles).
    Texts,
}

/// Which matching method scores a field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Exact match (0/1).
    Em,
    /// Unordered multiset match rate over a value list.
    Am1,
    /// Chart-kind match with half credit for a dimensionality mismatch.
    Am2,
    /// Exponential decay over normalized scalar distance.
    Am3,
    /// Exponential decay over normalized planar distance.
    Am4,
}

/// Upper bound of a scalar field, fixed or resolved per candidate page.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundMax {
    Unbounded,
    Fixed(f64),
    /// Candidate page width (width-like fields).
    PageWidth,
    /// Candidate page height (height-like fields).
    PageHeight,
}

/// What a query item addresses: the page itself or one object kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ItemKind {
    PageGeometry,
    Object(ObjectKind),
}

impl ItemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ItemKind::PageGeometry => "page_geometry",
            ItemKind::Object(k) => k.as_str(),
        }
    }

    /// Parses a kind name; `page_layout` is accepted as the wordprocessing
    /// spelling of `page_geometry`.
    pub fn parse(s: &str) -> Option<ItemKind> {
        match s {
            "page_geometry" | "page_layout" => Some(ItemKind::PageGeometry),
            other => other.parse::<ObjectKind>().ok().map(ItemKind::Object),
        }
    }
}

impl std::fmt::Display for ItemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One registry row.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryFieldSpec {
    pub doc_type: DocType,
    pub kind: ItemKind,
    pub field: &'static str,
    pub class: ValueClass,
    pub method: Method,
    pub bound_min: Option<f64>,
    pub bound_max: BoundMax,
}

/// Smallest and largest legal slide edge, in centimeters (1–56 inches).
pub const SLIDE_EDGE_MIN_CM: f64 = 2.54;
pub const SLIDE_EDGE_MAX_CM: f64 = 142.24;

/// Largest legal wordprocessing page dimension, in centimeters.
pub const PAGE_DIM_MAX_CM: f64 = 55.87;

/// Legal worksheet zoom range, in percent.
pub const ZOOM_MIN: f64 = 10.0;
pub const ZOOM_MAX: f64 = 400.0;

static REGISTRY: LazyLock<Vec<QueryFieldSpec>> = LazyLock::new(build_registry);

/// All registry rows, grouped by document family and kind.
pub fn rows() -> &'static [QueryFieldSpec] {
    &REGISTRY
}

/// Looks up the spec for a field, applying the `page_layout` kind alias.
pub fn lookup(doc_type: DocType, kind: ItemKind, field: &str) -> Option<&'static QueryFieldSpec> {
    REGISTRY
        .iter()
        .find(|r| r.doc_type == doc_type && r.kind == kind && r.field == field)
}

/// Whether any field of this kind is queryable for the document family.
pub fn kind_known(doc_type: DocType, kind: ItemKind) -> bool {
    REGISTRY.iter().any(|r| r.doc_type == doc_type && r.kind == kind)
}

fn build_registry() -> Vec<QueryFieldSpec> {
    use BoundMax::*;
    use DocType::*;
    use ItemKind::PageGeometry as PG;
    use Method::*;
    use ObjectKind::*;
    use ValueClass::*;

    let obj = ItemKind::Object;
    let mut t = Vec::with_capacity(66);
    let mut row = |doc_type, kind, field, class, method, bound_min, bound_max| {
        t.push(QueryFieldSpec { doc_type, kind, field, class, method, bound_min, bound_max });
    };

    // ---- presentations ----------------------------------------------------
    for field in ["height", "width"] {
        row(Presentation, PG, field, Length, Am3, Some(SLIDE_EDGE_MIN_CM), Fixed(SLIDE_EDGE_MAX_CM));
    }
    // positioned, sized slide objects share the same geometry rows
    for kind in [Textbox, Image, Table, Shape] {
        row(Presentation, obj(kind), "x", Length, Am4, Some(0.0), Unbounded);
        row(Presentation, obj(kind), "y", Length, Am4, Some(0.0), Unbounded);
        row(Presentation, obj(kind), "width", Length, Am3, Some(0.0), PageWidth);
        row(Presentation, obj(kind), "height", Length, Am3, Some(0.0), PageHeight);
    }
    row(Presentation, obj(Textbox), "font_name", Texts, Am1, None, Unbounded);
    row(Presentation, obj(Textbox), "font_color", Colors, Am1, None, Unbounded);
    row(Presentation, obj(Table), "rows", Count, Em, None, Unbounded);
    row(Presentation, obj(Table), "columns", Count, Em, None, Unbounded);
    row(Presentation, obj(Table), "font_name", Texts, Am1, None, Unbounded);
    row(Presentation, obj(Shape), "shape_type", Text, Em, None, Unbounded);
    row(Presentation, obj(Shape), "font_color", Colors, Am1, None, Unbounded);

    // ---- wordprocessing ---------------------------------------------------
    for field in [
        "height",
        "width",
        "columns",
        "column_margin",
        "upper_margin",
        "right_margin",
        "lower_margin",
        "left_margin",
        "header_margin",
        "footer_margin",
        "gutter_margin",
    ] {
        let class = if field == "columns" { Count } else { Length };
        row(Wordprocessing, PG, field, class, Am3, Some(0.0), Fixed(PAGE_DIM_MAX_CM));
    }
    for kind in [BodyText, Footnote, Header, Footer] {
        row(Wordprocessing, obj(kind), "font_size", Numbers, Am1, None, Unbounded);
        row(Wordprocessing, obj(kind), "font_color", Colors, Am1, None, Unbounded);
        row(Wordprocessing, obj(kind), "font_name", Texts, Am1, None, Unbounded);
    }
    row(Wordprocessing, obj(Image), "height", Length, Am3, Some(0.0), PageHeight);
    row(Wordprocessing, obj(Image), "width", Length, Am3, Some(0.0), PageWidth);
    row(Wordprocessing, obj(Table), "rows", Count, Em, None, Unbounded);
    row(Wordprocessing, obj(Table), "columns", Count, Em, None, Unbounded);
    row(Wordprocessing, obj(Table), "font_size", Numbers, Am1, None, Unbounded);
    row(Wordprocessing, obj(Table), "font_color", Colors, Am1, None, Unbounded);
    row(Wordprocessing, obj(Table), "font_name", Texts, Am1, None, Unbounded);

    // ---- spreadsheets -----------------------------------------------------
    row(Spreadsheet, PG, "zoom_scale", Count, Am3, Some(ZOOM_MIN), Fixed(ZOOM_MAX));
    row(Spreadsheet, obj(CellStyles), "font_size", Numbers, Am1, None, Unbounded);
    row(Spreadsheet, obj(CellStyles), "font_name", Texts, Am1, None, Unbounded);
    row(Spreadsheet, obj(CellStyles), "fill_pattern", Texts, Am1, None, Unbounded);
    row(Spreadsheet, obj(CellStyles), "fill_color", Texts, Am1, None, Unbounded);
    row(Spreadsheet, obj(CellStyles), "border", Texts, Am1, None, Unbounded);
    row(Spreadsheet, obj(SheetImage), "from", CellRef, Am4, None, Unbounded);
    row(Spreadsheet, obj(SheetImage), "to", CellRef, Am4, None, Unbounded);
    row(Spreadsheet, obj(ObjectKind::Chart), "chart_type", ValueClass::Chart, Am2, None, Unbounded);
    row(Spreadsheet, obj(ObjectKind::Chart), "from", CellRef, Am4, None, Unbounded);
    row(Spreadsheet, obj(ObjectKind::Chart), "to", CellRef, Am4, None, Unbounded);

    t
}
