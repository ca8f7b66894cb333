//! Query parsing and validation.
//!
//! A retrieval query is a small JSON document:
//!
//! ```json
//! {
//!   "doc_type": "presentation",
//!   "unit": "cm",
//!   "threshold": "auto",
//!   "items": [
//!     {"kind": "page_geometry", "fields": {"height": 19.05, "width": 25.4}},
//!     {"kind": "textbox", "fields": {"x": 1.06, "y": 4.02, "height": 12.90, "width": 23.28}}
//!   ]
//! }
//! ```
//!
//! Parsing validates every field against the [`registry`], converts inch
//! lengths to centimeters, normalizes colors and chart names, and enforces
//! fixed bounds — so downstream scoring never sees an ill-typed or
//! out-of-range value.

pub mod registry;

use serde_json::Value;

use crate::feature::{CellRef, ChartProps, DocType};
use crate::units::{inch_to_cm, round4};
use registry::{BoundMax, ItemKind, QueryFieldSpec, ValueClass};

#[derive(Debug, thiserror::Error)]
pub enum QueryError {
    #[error("syntax error: {detail}")]
    Syntax { detail: String },
    #[error("`{field}` is not a queryable field of {kind} for {doc_type} documents")]
    UnknownField { doc_type: DocType, kind: String, field: String },
    #[error("{kind} is not a queryable kind for {doc_type} documents")]
    UnknownKind { doc_type: DocType, kind: String },
    #[error("unit must be `cm` or `inch`, got `{unit}`")]
    UnitError { unit: String },
    #[error("query has no items")]
    EmptyQuery,
    #[error("{kind}.{field} = {value} is outside [{min}, {max}]")]
    OutOfBounds { kind: String, field: String, value: f64, min: f64, max: f64 },
}

fn syntax(detail: impl Into<String>) -> QueryError {
    QueryError::Syntax { detail: detail.into() }
}

/// Retrieval threshold: a fixed S-value or the query-count-driven default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Auto,
    Fixed(f64),
}

/// A validated query. All lengths are centimeters, all colors uppercase
/// six-digit hex, all chart names split into family + dimensionality.
#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalQuery {
    pub doc_type: DocType,
    pub threshold: Threshold,
    pub items: Vec<QueryItem>,
}

impl RetrievalQuery {
    /// Number of query items; drives the default threshold.
    pub fn query_count(&self) -> usize {
        self.items.len()
    }
}

/// One item: a target kind plus the fields to compare, in authoring order.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryItem {
    pub kind: ItemKind,
    pub fields: Vec<QueryField>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryField {
    /// Canonical field name from the registry.
    pub name: &'static str,
    pub spec: &'static QueryFieldSpec,
    pub value: QueryValue,
}

/// A parsed, normalized query value.
#[derive(Debug, Clone, PartialEq)]
pub enum QueryValue {
    /// Centimeters, on the 1/10000 grid.
    Length(f64),
    Count(u64),
    Text(String),
    Chart(ChartProps),
    Cell(CellRef),
    /// Font sizes in points.
    Numbers(Vec<f64>),
    /// Uppercase six-digit hex.
    Colors(Vec<String>),
    Texts(Vec<String>),
}

impl QueryValue {
    /// Scalar view for decay scoring (lengths and counts).
    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            QueryValue::Length(v) => Some(*v),
            QueryValue::Count(v) => Some(*v as f64),
            _ => None,
        }
    }

    /// Human-readable form used in score traces and serialization.
    pub fn display(&self) -> String {
        match self {
            QueryValue::Length(v) => format!("{v}"),
            QueryValue::Count(v) => format!("{v}"),
            QueryValue::Text(s) => s.clone(),
            QueryValue::Chart(c) => chart_to_string(c),
            QueryValue::Cell(r) => r.to_string(),
            QueryValue::Numbers(v) => {
                v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
            }
            QueryValue::Colors(v) | QueryValue::Texts(v) => v.join(", "),
        }
    }
}

pub(crate) fn chart_to_string(c: &ChartProps) -> String {
    if c.dimensionality == 3 {
        match c.chart_type.strip_suffix("chart") {
            Some(stem) => format!("{stem}3dchart"),
            None => format!("{}3d", c.chart_type),
        }
    } else {
        c.chart_type.clone()
    }
}

/// Parses and validates a query document.
pub fn parse_query(text: &str) -> Result<RetrievalQuery, QueryError> {
    let root: Value =
        serde_json::from_str(text).map_err(|e| syntax(format!("invalid JSON: {e}")))?;
    let obj = root.as_object().ok_or_else(|| syntax("query must be a JSON object"))?;

    for key in obj.keys() {
        if !matches!(key.as_str(), "doc_type" | "unit" | "threshold" | "items") {
            return Err(syntax(format!("unknown query key `{key}`")));
        }
    }

    let doc_type: DocType = obj
        .get("doc_type")
        .and_then(Value::as_str)
        .ok_or_else(|| syntax("`doc_type` must be present and a string"))?
        .parse()
        .map_err(|e: String| syntax(e))?;

    let inches = match obj.get("unit") {
        None => false,
        Some(Value::String(u)) if u == "cm" => false,
        Some(Value::String(u)) if u == "inch" => true,
        Some(Value::String(u)) => return Err(QueryError::UnitError { unit: u.clone() }),
        Some(other) => return Err(QueryError::UnitError { unit: other.to_string() }),
    };

    let threshold = match obj.get("threshold") {
        None => Threshold::Auto,
        Some(Value::String(s)) if s == "auto" => Threshold::Auto,
        Some(v) => {
            let t = v
                .as_f64()
                .ok_or_else(|| syntax("`threshold` must be `auto` or a number"))?;
            if !(0.0..=1.0).contains(&t) {
                return Err(syntax(format!("threshold {t} is outside [0, 1]")));
            }
            Threshold::Fixed(t)
        }
    };

    let raw_items = match obj.get("items") {
        None => return Err(QueryError::EmptyQuery),
        Some(v) => v
            .as_array()
            .ok_or_else(|| syntax("`items` must be an array"))?,
    };
    if raw_items.is_empty() {
        return Err(QueryError::EmptyQuery);
    }

    let mut items = Vec::with_capacity(raw_items.len());
    for (i, raw) in raw_items.iter().enumerate() {
        items.push(parse_item(raw, doc_type, inches).map_err(|e| match e {
            QueryError::Syntax { detail } => syntax(format!("item {}: {detail}", i + 1)),
            other => other,
        })?);
    }
    Ok(RetrievalQuery { doc_type, threshold, items })
}

fn parse_item(raw: &Value, doc_type: DocType, inches: bool) -> Result<QueryItem, QueryError> {
    let obj = raw.as_object().ok_or_else(|| syntax("each item must be an object"))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "kind" | "fields") {
            return Err(syntax(format!("unknown item key `{key}`")));
        }
    }
    let kind_str = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| syntax("item `kind` must be present and a string"))?;
    let kind = ItemKind::parse(kind_str).ok_or_else(|| QueryError::UnknownKind {
        doc_type,
        kind: kind_str.to_string(),
    })?;
    if !registry::kind_known(doc_type, kind) {
        return Err(QueryError::UnknownKind { doc_type, kind: kind_str.to_string() });
    }

    let raw_fields = obj
        .get("fields")
        .and_then(Value::as_object)
        .ok_or_else(|| syntax("item `fields` must be an object"))?;
    if raw_fields.is_empty() {
        return Err(syntax(format!("{kind} item queries no fields")));
    }

    let mut fields = Vec::with_capacity(raw_fields.len());
    for (name, value) in raw_fields {
        let spec = registry::lookup(doc_type, kind, name).ok_or_else(|| {
            QueryError::UnknownField {
                doc_type,
                kind: kind.as_str().to_string(),
                field: name.clone(),
            }
        })?;
        let value = parse_value(spec, value, inches)?;
        fields.push(QueryField { name: spec.field, spec, value });
    }
    Ok(QueryItem { kind, fields })
}

fn parse_value(
    spec: &'static QueryFieldSpec,
    raw: &Value,
    inches: bool,
) -> Result<QueryValue, QueryError> {
    let field_err = |detail: String| syntax(format!("{}.{}: {detail}", spec.kind, spec.field));
    match spec.class {
        ValueClass::Length => {
            let v = raw
                .as_f64()
                .filter(|v| v.is_finite())
                .ok_or_else(|| field_err("expected a finite number".into()))?;
            let cm = if inches { inch_to_cm(v) } else { round4(v) };
            check_bounds(spec, cm)?;
            Ok(QueryValue::Length(cm))
        }
        ValueClass::Count => {
            let v = raw
                .as_u64()
                .ok_or_else(|| field_err("expected a non-negative integer".into()))?;
            check_bounds(spec, v as f64)?;
            Ok(QueryValue::Count(v))
        }
        ValueClass::Text => {
            let s = non_empty_str(raw).map_err(field_err)?;
            Ok(QueryValue::Text(s))
        }
        ValueClass::Chart => {
            let s = non_empty_str(raw).map_err(field_err)?;
            let chart = ChartProps::parse(&s)
                .ok_or_else(|| field_err(format!("`{s}` is not a chart kind")))?;
            Ok(QueryValue::Chart(chart))
        }
        ValueClass::CellRef => {
            let s = non_empty_str(raw).map_err(field_err)?;
            let cell: CellRef = s.parse().map_err(field_err)?;
            Ok(QueryValue::Cell(cell))
        }
        ValueClass::Numbers => {
            let nums = scalar_list(raw, |v| {
                // comma-split list entries arrive as strings
                let n = match v {
                    Value::String(s) => s.trim().parse::<f64>().ok(),
                    other => other.as_f64(),
                };
                n.filter(|x| x.is_finite() && *x > 0.0)
                    .map(round4)
                    .ok_or_else(|| "font sizes must be positive numbers".to_string())
            })
            .map_err(field_err)?;
            Ok(QueryValue::Numbers(nums))
        }
        ValueClass::Colors => {
            let colors = scalar_list(raw, |v| {
                let s = v.as_str().ok_or_else(|| "expected a color string".to_string())?;
                parse_hex_color(s)
            })
            .map_err(field_err)?;
            Ok(QueryValue::Colors(colors))
        }
        ValueClass::Texts => {
            let texts = scalar_list(raw, |v| match v.as_str().map(str::trim) {
                Some(s) if !s.is_empty() => Ok(s.to_string()),
                _ => Err("expected a non-empty string".to_string()),
            })
            .map_err(field_err)?;
            Ok(QueryValue::Texts(texts))
        }
    }
}

fn check_bounds(spec: &QueryFieldSpec, v: f64) -> Result<(), QueryError> {
    let min = spec.bound_min.unwrap_or(f64::NEG_INFINITY);
    let max = match spec.bound_max {
        BoundMax::Fixed(m) => m,
        // page-relative bounds can only be checked against a candidate page
        _ => f64::INFINITY,
    };
    if v < min || v > max {
        return Err(QueryError::OutOfBounds {
            kind: spec.kind.as_str().to_string(),
            field: spec.field.to_string(),
            value: v,
            min: spec.bound_min.unwrap_or(0.0),
            max,
        });
    }
    Ok(())
}

/// Accepts a JSON array, a single scalar (one-element list), or a
/// comma-separated string, mapping each element through `one`.
fn scalar_list<T>(
    raw: &Value,
    one: impl Fn(&Value) -> Result<T, String>,
) -> Result<Vec<T>, String> {
    match raw {
        Value::Array(items) => {
            if items.is_empty() {
                return Err("list must not be empty".to_string());
            }
            items.iter().map(&one).collect()
        }
        Value::String(s) if s.contains(',') => s
            .split(',')
            .map(|part| one(&Value::String(part.trim().to_string())))
            .collect(),
        other => Ok(vec![one(other)?]),
    }
}

fn non_empty_str(raw: &Value) -> Result<String, String> {
    match raw.as_str().map(str::trim) {
        Some(s) if !s.is_empty() => Ok(s.to_string()),
        _ => Err("expected a non-empty string".to_string()),
    }
}

/// Query-side color parsing: strictly six hex digits, `#` optional.
fn parse_hex_color(s: &str) -> Result<String, String> {
    let hex = s.trim().strip_prefix('#').unwrap_or_else(|| s.trim());
    if hex.len() == 6 && hex.chars().all(|c| c.is_ascii_hexdigit()) {
        Ok(hex.to_ascii_uppercase())
    } else {
        Err(format!("`{s}` is not a six-digit hex color"))
    }
}

/// Renders a query back to its canonical text form (unit `cm`, normalized
/// values). `parse_query(serialize_query(q)) == q` for every valid query.
pub fn serialize_query(rq: &RetrievalQuery) -> String {
    use serde_json::{Map, Number, json};

    let value_json = |v: &QueryValue| -> Value {
        match v {
            QueryValue::Length(x) => json!(x),
            QueryValue::Count(x) => json!(x),
            QueryValue::Text(s) => json!(s),
            QueryValue::Chart(c) => json!(chart_to_string(c)),
            QueryValue::Cell(r) => json!(r.to_string()),
            QueryValue::Numbers(v) => Value::Array(
                v.iter().map(|x| Value::Number(Number::from_f64(*x).expect("finite"))).collect(),
            ),
            QueryValue::Colors(v) | QueryValue::Texts(v) => json!(v),
        }
    };

    let items: Vec<Value> = rq
        .items
        .iter()
        .map(|item| {
            let mut fields = Map::new();
            for f in &item.fields {
                fields.insert(f.name.to_string(), value_json(&f.value));
            }
            json!({"kind": item.kind.as_str(), "fields": fields})
        })
        .collect();

    let threshold = match rq.threshold {
        Threshold::Auto => json!("auto"),
        Threshold::Fixed(t) => json!(t),
    };
    let doc = json!({
        "doc_type": rq.doc_type.as_str(),
        "unit": "cm",
        "threshold": threshold,
        "items": items,
    });
    serde_json::to_string_pretty(&doc).expect("query serialization is infallible")
}
