//! Shared support for the integration suites: an independent naive scorer,
//! a registry-driven random query generator, and random feature builders.
#![allow(dead_code)]

use layoutret::feature::{
    CellAnchor, CellRef, ChartProps, DocType, LayoutObject, Margins, ObjectGeometry,
    PageFeature, PageGeometry, TableProps, TextProps,
};
use layoutret::query::registry::{self, BoundMax, ItemKind, QueryFieldSpec, ValueClass};
use layoutret::query::{RetrievalQuery, parse_query};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub const FONT_POOL: &[&str] = &["arial", "calibri", "georgia", "consolas", "verdana", "cambria"];
pub const COLOR_POOL: &[&str] =
    &["1F4E79", "C00000", "2E7D32", "7030A0", "ED7D31", "404040", "FF0000"];
pub const SIZE_POOL: &[f64] = &[9.0, 10.5, 11.0, 12.0, 14.0, 18.0, 24.0, 32.0, 40.0];

/// A from-scratch reimplementation of the scoring rules as plain loops,
/// kept deliberately free of the production scorer's helpers so the two
/// can cross-check each other.
pub mod oracle {
    use std::collections::BTreeMap;

    use layoutret::feature::{CellRef, ChartProps, LayoutObject, PageFeature};
    use layoutret::matcher::MatcherConfig;
    use layoutret::query::registry::{BoundMax, ItemKind, Method, QueryFieldSpec};
    use layoutret::query::{QueryItem, QueryValue, RetrievalQuery};
    use layoutret::store::FeatureDb;

    fn r4(x: f64) -> f64 {
        (x * 10_000.0).round() / 10_000.0
    }

    /// Restores the exact decimal when a difference of grid values drifted
    /// a few ulps off it.
    fn grid_snap(x: f64) -> f64 {
        let scaled = x * 10_000.0;
        let nearest = scaled.round();
        if (scaled - nearest).abs() <= 1e-9 { nearest / 10_000.0 } else { x }
    }

    fn decay(cfg: &MatcherConfig, d: f64, range: f64) -> f64 {
        let x = cfg.decay_scale * (d / range).min(1.0);
        4.0 * cfg.lambda * (-cfg.lambda * x).exp()
    }

    fn scalar_decay(cfg: &MatcherConfig, q: f64, f: f64, lo: f64, hi: f64) -> f64 {
        let range = grid_snap((q - lo).abs().max((q - hi).abs()));
        if range == 0.0 {
            return if r4(q) == r4(f) { 1.0 } else { 0.0 };
        }
        decay(cfg, (f - q).abs(), range)
    }

    fn planar_decay(
        cfg: &MatcherConfig,
        q: (f64, f64),
        f: (f64, f64),
        min: (f64, f64),
        max: (f64, f64),
    ) -> f64 {
        let dx = (q.0 - min.0).max(max.0 - q.0);
        let dy = (q.1 - min.1).max(max.1 - q.1);
        let max_distance = (dx * dx + dy * dy).sqrt();
        let d = ((q.0 - f.0).powi(2) + (q.1 - f.1).powi(2)).sqrt();
        if max_distance == 0.0 {
            let exact = r4(q.0) == r4(f.0) && r4(q.1) == r4(f.1);
            return if exact { 1.0 } else { 0.0 };
        }
        decay(cfg, d, max_distance)
    }

    fn multiset_rate<Q, F>(qs: &[Q], fs: &[F], eq: impl Fn(&Q, &F) -> bool) -> f64 {
        if qs.is_empty() {
            return 0.0;
        }
        let mut used = vec![false; fs.len()];
        let mut hits = 0usize;
        for q in qs {
            for (i, f) in fs.iter().enumerate() {
                if !used[i] && eq(q, f) {
                    used[i] = true;
                    hits += 1;
                    break;
                }
            }
        }
        hits as f64 / qs.len() as f64
    }

    enum Feat<'a> {
        Num(f64),
        Text(&'a str),
        Chart(&'a ChartProps),
        Cell(CellRef),
        Nums(&'a [f64]),
        Strs(&'a [String]),
    }

    fn lookup<'a>(
        field: &str,
        pf: &'a PageFeature,
        obj: Option<&'a LayoutObject>,
    ) -> Option<Feat<'a>> {
        let Some(obj) = obj else {
            let pg = &pf.page_geometry;
            return match field {
                "width" => pg.width.map(Feat::Num),
                "height" => pg.height.map(Feat::Num),
                "columns" => pg.columns.map(|v| Feat::Num(v as f64)),
                "zoom_scale" => pg.zoom_scale.map(|v| Feat::Num(v as f64)),
                other => {
                    let m = pg.margins.as_ref()?;
                    let v = match other {
                        "upper_margin" => m.upper,
                        "right_margin" => m.right,
                        "lower_margin" => m.lower,
                        "left_margin" => m.left,
                        "header_margin" => m.header,
                        "footer_margin" => m.footer,
                        "gutter_margin" => m.gutter,
                        "column_margin" => m.column,
                        _ => return None,
                    };
                    Some(Feat::Num(v))
                }
            };
        };
        match field {
            "x" => obj.geometry.as_ref().and_then(|g| g.x).map(Feat::Num),
            "y" => obj.geometry.as_ref().and_then(|g| g.y).map(Feat::Num),
            "width" => obj.geometry.as_ref().map(|g| Feat::Num(g.width)),
            "height" => obj.geometry.as_ref().map(|g| Feat::Num(g.height)),
            "font_size" => obj.text_props.as_ref().map(|t| Feat::Nums(&t.font_sizes)),
            "font_color" => obj.text_props.as_ref().map(|t| Feat::Strs(&t.font_colors)),
            "font_name" => obj.text_props.as_ref().map(|t| Feat::Strs(&t.font_names)),
            "rows" => obj.table_props.map(|t| Feat::Num(t.rows as f64)),
            "columns" => obj.table_props.map(|t| Feat::Num(t.cols as f64)),
            "shape_type" => obj.shape_type.as_deref().map(Feat::Text),
            "chart_type" => obj.chart_props.as_ref().map(Feat::Chart),
            "from" => obj.cell_anchor.map(|a| Feat::Cell(a.from)),
            "to" => obj.cell_anchor.map(|a| Feat::Cell(a.to)),
            "fill_pattern" => obj.cell_style_props.as_ref().map(|c| Feat::Strs(&c.fill_patterns)),
            "fill_color" => obj.cell_style_props.as_ref().map(|c| Feat::Strs(&c.fill_colors)),
            "border" => obj.cell_style_props.as_ref().map(|c| Feat::Strs(&c.borders)),
            _ => None,
        }
    }

    fn field_score(
        cfg: &MatcherConfig,
        spec: &QueryFieldSpec,
        value: &QueryValue,
        pf: &PageFeature,
        obj: Option<&LayoutObject>,
    ) -> f64 {
        let Some(feat) = lookup(spec.field, pf, obj) else {
            return 0.0;
        };
        match (spec.method, value, &feat) {
            (Method::Em, q, Feat::Num(f)) => match q.as_scalar() {
                Some(q) if r4(q) == r4(*f) => 1.0,
                _ => 0.0,
            },
            (Method::Em, QueryValue::Text(q), Feat::Text(f)) => {
                if q.eq_ignore_ascii_case(f) { 1.0 } else { 0.0 }
            }
            (Method::Am1, QueryValue::Numbers(q), Feat::Nums(f)) => {
                multiset_rate(q, f, |a, b| r4(*a) == r4(*b))
            }
            (Method::Am1, QueryValue::Colors(q) | QueryValue::Texts(q), Feat::Strs(f)) => {
                multiset_rate(q, f, |a: &String, b: &String| a.eq_ignore_ascii_case(b))
            }
            (Method::Am2, QueryValue::Chart(q), Feat::Chart(f)) => {
                if q.chart_type != f.chart_type {
                    0.0
                } else if q.dimensionality == f.dimensionality {
                    1.0
                } else {
                    0.5
                }
            }
            (Method::Am3, q, Feat::Num(f)) => {
                let Some(q) = q.as_scalar() else { return 0.0 };
                let lo = spec.bound_min.unwrap_or(0.0);
                let hi = match spec.bound_max {
                    BoundMax::Fixed(m) => Some(m),
                    BoundMax::PageWidth => pf.page_geometry.width,
                    BoundMax::PageHeight => pf.page_geometry.height,
                    BoundMax::Unbounded => None,
                };
                match hi {
                    Some(hi) => scalar_decay(cfg, q, *f, lo, hi),
                    None => 0.0,
                }
            }
            (Method::Am4, QueryValue::Cell(q), Feat::Cell(f)) => {
                let rows = pf.page_geometry.used_rows.unwrap_or(1) as f64;
                let cols = pf.page_geometry.used_cols.unwrap_or(1) as f64;
                planar_decay(
                    cfg,
                    (q.row as f64, q.col as f64),
                    (f.row as f64, f.col as f64),
                    (1.0, 1.0),
                    (rows, cols),
                )
            }
            // lone coordinate: decay along its own axis
            (Method::Am4, q, Feat::Num(f)) => {
                let Some(q) = q.as_scalar() else { return 0.0 };
                let extent = match spec.field {
                    "x" => pf.page_geometry.width,
                    _ => pf.page_geometry.height,
                };
                match extent {
                    Some(extent) => scalar_decay(cfg, q, *f, 0.0, extent),
                    None => 0.0,
                }
            }
            _ => 0.0,
        }
    }

    fn pair_score(
        cfg: &MatcherConfig,
        item: &QueryItem,
        pf: &PageFeature,
        obj: Option<&LayoutObject>,
        xi: usize,
        yi: usize,
    ) -> f64 {
        let (qx, qy) =
            match (item.fields[xi].value.as_scalar(), item.fields[yi].value.as_scalar()) {
                (Some(x), Some(y)) => (x, y),
                _ => (0.0, 0.0),
            };
        let Some(geometry) = obj.and_then(|o| o.geometry.as_ref()) else {
            return 0.0;
        };
        let (Some(fx), Some(fy)) = (geometry.x, geometry.y) else {
            return 0.0;
        };
        let w = pf.page_geometry.width.unwrap_or(0.0);
        let h = pf.page_geometry.height.unwrap_or(0.0);
        planar_decay(cfg, (qx, qy), (fx, fy), (0.0, 0.0), (w, h))
    }

    fn candidate_score(
        cfg: &MatcherConfig,
        item: &QueryItem,
        pf: &PageFeature,
        obj: Option<&LayoutObject>,
    ) -> f64 {
        let coord = |name: &str| {
            item.fields
                .iter()
                .position(|f| f.name == name && f.spec.method == Method::Am4)
        };
        let pair = match (coord("x"), coord("y")) {
            (Some(a), Some(b)) => Some((a, b)),
            _ => None,
        };
        let mut total = 0.0;
        let mut count = 0usize;
        for (i, field) in item.fields.iter().enumerate() {
            if let Some((xi, yi)) = pair {
                if i == xi.max(yi) {
                    continue;
                }
                if i == xi.min(yi) {
                    total += pair_score(cfg, item, pf, obj, xi, yi);
                    count += 1;
                    continue;
                }
            }
            total += field_score(cfg, field.spec, &field.value, pf, obj);
            count += 1;
        }
        total / count as f64
    }

    pub fn score_item_naive(cfg: &MatcherConfig, item: &QueryItem, pf: &PageFeature) -> f64 {
        match item.kind {
            ItemKind::PageGeometry => candidate_score(cfg, item, pf, None),
            ItemKind::Object(kind) => {
                let mut best: Option<f64> = None;
                for obj in pf.objects.iter().filter(|o| o.kind == kind) {
                    let s = candidate_score(cfg, item, pf, Some(obj));
                    if best.is_none_or(|b| s > b) {
                        best = Some(s);
                    }
                }
                best.unwrap_or(0.0)
            }
        }
    }

    pub fn score_page_naive(cfg: &MatcherConfig, rq: &RetrievalQuery, pf: &PageFeature) -> f64 {
        let total: f64 =
            rq.items.iter().map(|item| score_item_naive(cfg, item, pf)).sum();
        total / rq.items.len() as f64
    }

    /// Scores every page of the query's type: `(doc_id, page_index) → s`.
    pub fn score_all(
        cfg: &MatcherConfig,
        rq: &RetrievalQuery,
        db: &FeatureDb,
    ) -> BTreeMap<(String, u32), f64> {
        db.pages_of_type(rq.doc_type)
            .map(|pf| ((pf.doc_id.clone(), pf.page_index), score_page_naive(cfg, rq, pf)))
            .collect()
    }
}

// ---- registry-driven random queries -----------------------------------------

fn random_value(rng: &mut ChaCha8Rng, spec: &QueryFieldSpec) -> serde_json::Value {
    use serde_json::json;
    match spec.class {
        ValueClass::Length => {
            let lo = spec.bound_min.unwrap_or(0.0);
            let hi = match spec.bound_max {
                BoundMax::Fixed(m) => m,
                _ => 30.0,
            };
            let v = lo + rng.random::<f64>() * (hi - lo);
            json!((v * 100.0).round() / 100.0)
        }
        ValueClass::Count => {
            let lo = spec.bound_min.map(|m| m as u64).unwrap_or(1).max(1);
            let hi = match spec.bound_max {
                BoundMax::Fixed(m) => m as u64,
                _ => 12,
            };
            json!(rng.random_range(lo..=hi))
        }
        ValueClass::Text => {
            json!(
                *["rect", "roundRect", "ellipse", "leftRightArrow", "triangle", "starburst"]
                    .choose(rng)
                    .unwrap()
            )
        }
        ValueClass::Chart => {
            json!(
                *["barChart", "bar3DChart", "pieChart", "pie3DChart", "lineChart", "areaChart"]
                    .choose(rng)
                    .unwrap()
            )
        }
        ValueClass::CellRef => {
            json!(format!("R{}C{}", rng.random_range(1..=40), rng.random_range(1..=26)))
        }
        ValueClass::Numbers => {
            let n = rng.random_range(1..=3);
            json!((0..n).map(|_| *SIZE_POOL.choose(rng).unwrap()).collect::<Vec<_>>())
        }
        ValueClass::Colors => {
            let n = rng.random_range(1..=2);
            json!((0..n).map(|_| *COLOR_POOL.choose(rng).unwrap()).collect::<Vec<_>>())
        }
        ValueClass::Texts => {
            let pool: &[&str] = match spec.field {
                "fill_pattern" => &["solid", "none", "gray125"],
                "border" => &["thin", "double", "none", "medium"],
                "fill_color" => COLOR_POOL,
                _ => FONT_POOL,
            };
            let n = rng.random_range(1..=2);
            json!((0..n).map(|_| *pool.choose(rng).unwrap()).collect::<Vec<_>>())
        }
    }
}

/// Builds a random valid query for the document family by sampling registry
/// rows and value ranges. `threshold` 0 keeps every page in the result so
/// scorer comparisons see the full population.
pub fn random_query(rng: &mut ChaCha8Rng, doc_type: DocType) -> RetrievalQuery {
    use serde_json::{Map, Value, json};

    let rows: Vec<&QueryFieldSpec> =
        registry::rows().iter().filter(|r| r.doc_type == doc_type).collect();
    let mut kinds: Vec<ItemKind> = rows.iter().map(|r| r.kind).collect();
    kinds.sort();
    kinds.dedup();

    let n_items = rng.random_range(1..=4);
    let items: Vec<Value> = (0..n_items)
        .map(|_| {
            let kind = *kinds.choose(rng).unwrap();
            let kind_rows: Vec<&&QueryFieldSpec> =
                rows.iter().filter(|r| r.kind == kind).collect();
            let mut order: Vec<usize> = (0..kind_rows.len()).collect();
            order.shuffle(rng);
            let take = rng.random_range(1..=kind_rows.len().min(3));
            let mut fields = Map::new();
            for &i in order.iter().take(take) {
                let row = kind_rows[i];
                fields.insert(row.field.to_string(), random_value(rng, row));
            }
            json!({"kind": kind.as_str(), "fields": Value::Object(fields)})
        })
        .collect();

    let doc = json!({"doc_type": doc_type.as_str(), "threshold": 0.0, "items": items});
    parse_query(&doc.to_string()).expect("generated query must parse")
}

// ---- random feature pages ----------------------------------------------------

fn len4(rng: &mut ChaCha8Rng, max: f64) -> f64 {
    ((rng.random::<f64>() * max) * 10_000.0).round() / 10_000.0
}

fn len4_in(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    ((lo + rng.random::<f64>() * (hi - lo)) * 10_000.0).round() / 10_000.0
}

fn random_text_props(rng: &mut ChaCha8Rng) -> TextProps {
    let n = rng.random_range(0..=4);
    TextProps {
        font_sizes: (0..n).map(|_| *SIZE_POOL.choose(rng).unwrap()).collect(),
        font_colors: (0..n).map(|_| COLOR_POOL.choose(rng).unwrap().to_string()).collect(),
        font_names: (0..n).map(|_| FONT_POOL.choose(rng).unwrap().to_string()).collect(),
    }
}

fn random_anchor(rng: &mut ChaCha8Rng) -> CellAnchor {
    let from = CellRef { row: rng.random_range(1..=30), col: rng.random_range(1..=15) };
    CellAnchor {
        from,
        to: CellRef {
            row: from.row + rng.random_range(0..=10),
            col: from.col + rng.random_range(0..=8),
        },
    }
}

pub fn random_doc_type(rng: &mut ChaCha8Rng) -> DocType {
    *[DocType::Presentation, DocType::Wordprocessing, DocType::Spreadsheet].choose(rng).unwrap()
}

/// A random, structurally valid page of the given family, with every length
/// already on the serialization grid.
pub fn random_page(
    rng: &mut ChaCha8Rng,
    doc_type: DocType,
    doc_id: &str,
    page_index: u32,
) -> PageFeature {
    let placed = |rng: &mut ChaCha8Rng| {
        ObjectGeometry::placed(len4(rng, 30.0), len4(rng, 20.0), len4(rng, 25.0), len4(rng, 15.0))
    };
    let (page_geometry, objects) = match doc_type {
        DocType::Presentation => {
            let geometry = PageGeometry {
                width: Some(len4_in(rng, 2.54, 102.54)),
                height: Some(len4_in(rng, 2.54, 102.54)),
                ..PageGeometry::default()
            };
            let objects = (0..rng.random_range(0..=5))
                .map(|_| match rng.random_range(0..4) {
                    0 => LayoutObject::textbox(placed(rng), random_text_props(rng)),
                    1 => LayoutObject::image(placed(rng)),
                    2 => LayoutObject::shape(
                        placed(rng),
                        (*["rect", "ellipse", "hexagon"].choose(rng).unwrap()).to_string(),
                        random_text_props(rng),
                    ),
                    _ => LayoutObject::table(
                        rng.random_bool(0.5).then(|| placed(rng)),
                        TableProps {
                            rows: rng.random_range(1..=12),
                            cols: rng.random_range(1..=8),
                        },
                        random_text_props(rng),
                    ),
                })
                .collect();
            (geometry, objects)
        }
        DocType::Wordprocessing => {
            let geometry = PageGeometry {
                width: Some(len4_in(rng, 5.0, 45.0)),
                height: Some(len4_in(rng, 5.0, 45.0)),
                columns: Some(rng.random_range(1..=3)),
                margins: rng.random_bool(0.8).then(|| Margins {
                    upper: len4(rng, 5.0),
                    right: len4(rng, 5.0),
                    lower: len4(rng, 5.0),
                    left: len4(rng, 5.0),
                    header: len4(rng, 2.0),
                    footer: len4(rng, 2.0),
                    gutter: len4(rng, 1.0),
                    column: len4(rng, 2.0),
                }),
                ..PageGeometry::default()
            };
            let mut objects = vec![LayoutObject::text_block(
                layoutret::feature::ObjectKind::BodyText,
                random_text_props(rng),
            )];
            if rng.random_bool(0.4) {
                objects.push(LayoutObject::table(
                    None,
                    TableProps { rows: rng.random_range(1..=20), cols: rng.random_range(1..=8) },
                    random_text_props(rng),
                ));
            }
            if rng.random_bool(0.4) {
                objects.push(LayoutObject::image(ObjectGeometry::sized(
                    len4_in(rng, 0.5, 16.5),
                    len4_in(rng, 0.5, 16.5),
                )));
            }
            (geometry, objects)
        }
        DocType::Spreadsheet => {
            let geometry = PageGeometry {
                zoom_scale: Some(rng.random_range(10..=400)),
                used_rows: Some(rng.random_range(1..=60)),
                used_cols: Some(rng.random_range(1..=30)),
                ..PageGeometry::default()
            };
            let mut objects = Vec::new();
            if rng.random_bool(0.7) {
                objects.push(LayoutObject::cell_styles(
                    random_text_props(rng),
                    layoutret::feature::CellStyleProps {
                        fill_patterns: vec!["solid".into(), "none".into()],
                        fill_colors: vec![COLOR_POOL.choose(rng).unwrap().to_string()],
                        borders: vec!["thin".into()],
                    },
                ));
            }
            if rng.random_bool(0.5) {
                objects.push(LayoutObject::sheet_image(random_anchor(rng)));
            }
            if rng.random_bool(0.5) {
                objects.push(LayoutObject::chart(
                    ChartProps {
                        chart_type: (*["barchart", "piechart", "linechart"].choose(rng).unwrap())
                            .to_string(),
                        dimensionality: if rng.random_bool(0.3) { 3 } else { 2 },
                    },
                    random_anchor(rng),
                ));
            }
            (geometry, objects)
        }
    };
    PageFeature {
        doc_id: doc_id.to_string(),
        doc_type,
        page_index,
        page_geometry,
        objects,
    }
}
