//! Page scoring and ranked retrieval.
//!
//! Every query item is scored against the best-matching object of its kind
//! on a candidate page; the page's final S-value is the mean over items.
//! Scalar and planar fields decay exponentially with normalized distance,
//! list fields match as unordered multisets, and everything else is exact.

use std::collections::BTreeSet;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::feature::{CellRef, ChartProps, LayoutObject, PageFeature};
use crate::query::registry::{BoundMax, ItemKind, Method, QueryFieldSpec};
use crate::query::{QueryItem, QueryValue, RetrievalQuery, Threshold, chart_to_string};
use crate::store::FeatureDb;
use crate::units::{round4, snap4};

/// Default S-value threshold for a query with `n` items. Larger queries
/// tolerate lower per-page scores; the floor is 0.72.
pub fn default_threshold(n: usize) -> f64 {
    match n {
        0..=3 => 0.90,
        4 => 0.81,
        5 => 0.78,
        6 => 0.768,
        7 => 0.756,
        8 => 0.744,
        9 => 0.732,
        _ => 0.72,
    }
}

/// Query-count → threshold map with per-count overrides on top of
/// [`default_threshold`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ThresholdTable {
    overrides: std::collections::BTreeMap<usize, f64>,
}

impl ThresholdTable {
    pub fn with_overrides(
        overrides: impl IntoIterator<Item = (usize, f64)>,
    ) -> Self {
        ThresholdTable { overrides: overrides.into_iter().collect() }
    }

    pub fn threshold_for(&self, n: usize) -> f64 {
        self.overrides.get(&n).copied().unwrap_or_else(|| default_threshold(n))
    }

    pub fn overrides(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.overrides.iter().map(|(n, s)| (*n, *s))
    }
}

/// How query items claim page objects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AssignmentMode {
    /// Each item independently matches its best object; two items may
    /// match the same object.
    #[default]
    Independent,
    /// Greedy descending-score assignment; each object satisfies at most
    /// one item.
    OneToOne,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatcherConfig {
    /// Decay rate λ of `s = 4λ·e^{−λx}`. The prefactor makes s(0) = 1 at
    /// the default 0.25; values above that would push scores past 1.
    pub lambda: f64,
    /// Multiplier applied to the normalized distance before decay.
    pub decay_scale: f64,
    pub thresholds: ThresholdTable,
    pub assignment: AssignmentMode,
}

impl Default for MatcherConfig {
    fn default() -> Self {
        MatcherConfig {
            lambda: 0.25,
            decay_scale: 16.0,
            thresholds: ThresholdTable::default(),
            assignment: AssignmentMode::Independent,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("lambda must be in (0, 0.25], got {0}")]
    Lambda(f64),
    #[error("decay_scale must be a positive finite number, got {0}")]
    DecayScale(f64),
    #[error("threshold for query count {n} must be in [0, 1], got {value}")]
    ThresholdRange { n: usize, value: f64 },
}

impl MatcherConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.lambda > 0.0 && self.lambda <= 0.25) {
            return Err(ConfigError::Lambda(self.lambda));
        }
        if !(self.decay_scale > 0.0 && self.decay_scale.is_finite()) {
            return Err(ConfigError::DecayScale(self.decay_scale));
        }
        for (n, value) in self.thresholds.overrides() {
            if !(0.0..=1.0).contains(&value) {
                return Err(ConfigError::ThresholdRange { n, value });
            }
        }
        Ok(())
    }

    /// Resolves an `auto` threshold through the table.
    pub fn resolve_threshold(&self, threshold: Threshold, query_count: usize) -> f64 {
        match threshold {
            Threshold::Fixed(t) => t,
            Threshold::Auto => self.thresholds.threshold_for(query_count),
        }
    }

    fn decay(&self, d: f64, range: f64) -> DecayEval {
        let x = self.decay_scale * (d / range).min(1.0);
        DecayEval { d, range, x, s: 4.0 * self.lambda * (-self.lambda * x).exp() }
    }
}

/// One decay evaluation, kept whole for score traces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayEval {
    /// Raw distance between feature and query.
    pub d: f64,
    /// Largest possible in-bounds distance (`distance_range` for scalars,
    /// `max_distance` for coordinates).
    pub range: f64,
    /// Scaled argument fed to the exponential.
    pub x: f64,
    pub s: f64,
}

impl DecayEval {
    fn exact(d: f64, s: f64) -> Self {
        DecayEval { d, range: 0.0, x: 0.0, s }
    }
}

/// Exact match on numbers, on the canonical 4-decimal grid.
pub fn em_number(q: f64, f: f64) -> f64 {
    if round4(q) == round4(f) { 1.0 } else { 0.0 }
}

/// Exact match on text, case-insensitive.
pub fn em_text(q: &str, f: &str) -> f64 {
    if q.eq_ignore_ascii_case(f) { 1.0 } else { 0.0 }
}

/// Unordered multiset match rate: each query value may consume one equal
/// feature value; the score is the matched fraction of the query list.
pub fn am1<Q, F>(query: &[Q], feature: &[F], eq: impl Fn(&Q, &F) -> bool) -> f64 {
    if query.is_empty() {
        return 0.0;
    }
    let mut consumed = vec![false; feature.len()];
    let mut hits = 0usize;
    for q in query {
        if let Some(i) = feature
            .iter()
            .enumerate()
            .position(|(i, f)| !consumed[i] && eq(q, f))
        {
            consumed[i] = true;
            hits += 1;
        }
    }
    hits as f64 / query.len() as f64
}

/// Chart-kind match: full credit for family + dimensionality, half credit
/// when only the family agrees.
pub fn am2(q: &ChartProps, f: &ChartProps) -> f64 {
    if q.chart_type != f.chart_type {
        0.0
    } else if q.dimensionality == f.dimensionality {
        1.0
    } else {
        0.5
    }
}

/// Scalar decay match. The normalizer is the largest gap between the query
/// value and either bound; a zero-width range degenerates to exact match.
pub fn am3(cfg: &MatcherConfig, q: f64, f: f64, bound_min: f64, bound_max: f64) -> DecayEval {
    let distance_range = snap4((q - bound_min).abs().max((q - bound_max).abs()));
    let d = (f - q).abs();
    if distance_range == 0.0 {
        return DecayEval::exact(d, em_number(q, f));
    }
    cfg.decay(d, distance_range)
}

/// Axis-aligned region the planar match normalizes against: the page for
/// slide coordinates, the used cell range for R1C1 anchors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRect {
    pub min: (f64, f64),
    pub max: (f64, f64),
}

impl PageRect {
    /// Top-left-origin page of the given extent.
    pub fn page(width: f64, height: f64) -> Self {
        PageRect { min: (0.0, 0.0), max: (width, height) }
    }

    /// Used range of a worksheet, rows × columns, 1-based inclusive.
    pub fn cells(rows: u32, cols: u32) -> Self {
        PageRect { min: (1.0, 1.0), max: (rows as f64, cols as f64) }
    }

    /// Distance from `q` to the farthest corner.
    fn max_distance(&self, q: (f64, f64)) -> f64 {
        let dx = (q.0 - self.min.0).max(self.max.0 - q.0);
        let dy = (q.1 - self.min.1).max(self.max.1 - q.1);
        (dx * dx + dy * dy).sqrt()
    }
}

/// Planar decay match over coordinates, normalized by the distance from the
/// query point to the farthest rect corner. A zero-area rect degenerates to
/// exact match on both coordinates.
pub fn am4(cfg: &MatcherConfig, q: (f64, f64), f: (f64, f64), rect: PageRect) -> DecayEval {
    let max_distance = rect.max_distance(q);
    let d = euclid(q, f);
    if max_distance == 0.0 {
        let s = em_number(q.0, f.0).min(em_number(q.1, f.1));
        return DecayEval::exact(d, s);
    }
    cfg.decay(d, max_distance)
}

fn euclid(a: (f64, f64), b: (f64, f64)) -> f64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    (dx * dx + dy * dy).sqrt()
}

/// What a query item matched on the page.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchedRef {
    PageGeometry,
    /// Index into the page's object list.
    Object { ordinal: usize },
}

/// Per-field audit record of one comparison.
#[derive(Debug, Clone, Serialize)]
pub struct FieldTrace {
    pub field: String,
    pub query_value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub feature_value: Option<String>,
    /// Method actually applied (a lone coordinate decays on its axis even
    /// though the registry files it as planar).
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance_range: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    pub s_value_field: f64,
}

impl FieldTrace {
    fn plain(field: &str, query_value: String, method: Method) -> Self {
        FieldTrace {
            field: field.to_string(),
            query_value,
            feature_value: None,
            method,
            d: None,
            distance_range: None,
            x: None,
            s_value_field: 0.0,
        }
    }

    fn with_decay(mut self, eval: DecayEval) -> Self {
        self.d = Some(eval.d);
        self.distance_range = Some(eval.range);
        self.x = Some(eval.x);
        self.s_value_field = eval.s;
        self
    }
}

/// Audit record of one query item against one page.
#[derive(Debug, Clone, Serialize)]
pub struct ScoreTrace {
    pub item_index: usize,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matched: Option<MatchedRef>,
    pub fields: Vec<FieldTrace>,
    pub s_value_item: f64,
}

/// One page's retrieval score with full per-item traces.
#[derive(Debug, Clone, Serialize)]
pub struct ScoredPage {
    pub doc_id: String,
    pub page_index: u32,
    pub s_value_final: f64,
    /// Query item count.
    pub n: usize,
    pub traces: Vec<ScoreTrace>,
}

/// Feature-side view of one field's value.
enum FeatValue<'a> {
    Num(f64),
    Text(&'a str),
    Chart(&'a ChartProps),
    Cell(CellRef),
    Nums(&'a [f64]),
    Strs(&'a [String]),
}

impl FeatValue<'_> {
    fn display(&self) -> String {
        match self {
            FeatValue::Num(v) => format!("{v}"),
            FeatValue::Text(s) => (*s).to_string(),
            FeatValue::Chart(c) => chart_to_string(c),
            FeatValue::Cell(r) => r.to_string(),
            FeatValue::Nums(v) => {
                v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
            }
            FeatValue::Strs(v) => v.join(", "),
        }
    }
}

/// Looks up the feature value a registry field addresses, on the page
/// geometry or on a specific object.
fn field_value<'a>(
    field: &str,
    pf: &'a PageFeature,
    obj: Option<&'a LayoutObject>,
) -> Option<FeatValue<'a>> {
    let Some(obj) = obj else {
        let pg = &pf.page_geometry;
        return match field {
            "width" => pg.width.map(FeatValue::Num),
            "height" => pg.height.map(FeatValue::Num),
            "columns" => pg.columns.map(|v| FeatValue::Num(v as f64)),
            "zoom_scale" => pg.zoom_scale.map(|v| FeatValue::Num(v as f64)),
            _ => {
                let m = pg.margins.as_ref()?;
                let v = match field {
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
                Some(FeatValue::Num(v))
            }
        };
    };
    match field {
        "x" => obj.geometry.as_ref().and_then(|g| g.x).map(FeatValue::Num),
        "y" => obj.geometry.as_ref().and_then(|g| g.y).map(FeatValue::Num),
        "width" => obj.geometry.as_ref().map(|g| FeatValue::Num(g.width)),
        "height" => obj.geometry.as_ref().map(|g| FeatValue::Num(g.height)),
        "font_size" => obj.text_props.as_ref().map(|t| FeatValue::Nums(&t.font_sizes)),
        "font_color" => obj.text_props.as_ref().map(|t| FeatValue::Strs(&t.font_colors)),
        "font_name" => obj.text_props.as_ref().map(|t| FeatValue::Strs(&t.font_names)),
        "rows" => obj.table_props.map(|t| FeatValue::Num(t.rows as f64)),
        "columns" => obj.table_props.map(|t| FeatValue::Num(t.cols as f64)),
        "shape_type" => obj.shape_type.as_deref().map(FeatValue::Text),
        "chart_type" => obj.chart_props.as_ref().map(FeatValue::Chart),
        "from" => obj.cell_anchor.map(|a| FeatValue::Cell(a.from)),
        "to" => obj.cell_anchor.map(|a| FeatValue::Cell(a.to)),
        "fill_pattern" => obj.cell_style_props.as_ref().map(|c| FeatValue::Strs(&c.fill_patterns)),
        "fill_color" => obj.cell_style_props.as_ref().map(|c| FeatValue::Strs(&c.fill_colors)),
        "border" => obj.cell_style_props.as_ref().map(|c| FeatValue::Strs(&c.borders)),
        _ => None,
    }
}

fn resolve_bounds(spec: &QueryFieldSpec, pf: &PageFeature) -> Option<(f64, f64)> {
    let min = spec.bound_min.unwrap_or(0.0);
    let max = match spec.bound_max {
        BoundMax::Fixed(m) => m,
        BoundMax::PageWidth => pf.page_geometry.width?,
        BoundMax::PageHeight => pf.page_geometry.height?,
        BoundMax::Unbounded => return None,
    };
    Some((min, max))
}

fn page_rect(pf: &PageFeature) -> PageRect {
    PageRect::page(
        pf.page_geometry.width.unwrap_or(0.0),
        pf.page_geometry.height.unwrap_or(0.0),
    )
}

fn cell_rect(pf: &PageFeature) -> PageRect {
    PageRect::cells(
        pf.page_geometry.used_rows.unwrap_or(1),
        pf.page_geometry.used_cols.unwrap_or(1),
    )
}

fn eval_field(
    cfg: &MatcherConfig,
    spec: &QueryFieldSpec,
    value: &QueryValue,
    pf: &PageFeature,
    obj: Option<&LayoutObject>,
) -> FieldTrace {
    let mut trace = FieldTrace::plain(spec.field, value.display(), spec.method);
    let Some(feature) = field_value(spec.field, pf, obj) else {
        return trace;
    };
    trace.feature_value = Some(feature.display());
    match (spec.method, value, &feature) {
        (Method::Em, q, FeatValue::Num(f)) => {
            if let Some(q) = q.as_scalar() {
                trace.s_value_field = em_number(q, *f);
            }
        }
        (Method::Em, QueryValue::Text(q), FeatValue::Text(f)) => {
            trace.s_value_field = em_text(q, f);
        }
        (Method::Am1, QueryValue::Numbers(q), FeatValue::Nums(f)) => {
            trace.s_value_field = am1(q, f, |a, b| round4(*a) == round4(*b));
        }
        (Method::Am1, QueryValue::Colors(q) | QueryValue::Texts(q), FeatValue::Strs(f)) => {
            trace.s_value_field = am1(q, f, |a: &String, b: &String| a.eq_ignore_ascii_case(b));
        }
        (Method::Am2, QueryValue::Chart(q), FeatValue::Chart(f)) => {
            trace.s_value_field = am2(q, f);
        }
        (Method::Am3, q, FeatValue::Num(f)) => {
            if let (Some(q), Some((lo, hi))) = (q.as_scalar(), resolve_bounds(spec, pf)) {
                trace = trace.with_decay(am3(cfg, q, *f, lo, hi));
            }
        }
        (Method::Am4, QueryValue::Cell(q), FeatValue::Cell(f)) => {
            let eval = am4(
                cfg,
                (q.row as f64, q.col as f64),
                (f.row as f64, f.col as f64),
                cell_rect(pf),
            );
            trace = trace.with_decay(eval);
        }
        // a lone x or y coordinate decays along its own axis
        (Method::Am4, q, FeatValue::Num(f)) => {
            if let Some(q) = q.as_scalar() {
                let extent = match spec.field {
                    "x" => pf.page_geometry.width,
                    _ => pf.page_geometry.height,
                };
                if let Some(extent) = extent {
                    trace.method = Method::Am3;
                    trace = trace.with_decay(am3(cfg, q, *f, 0.0, extent));
                }
            }
        }
        _ => {}
    }
    trace
}

/// Scores every field of an item against one candidate (the page geometry
/// or a single object). A queried x/y pair fuses into one planar
/// `position` comparison; it counts once in the field mean.
fn score_candidate(
    cfg: &MatcherConfig,
    item: &QueryItem,
    pf: &PageFeature,
    obj: Option<&LayoutObject>,
) -> (f64, Vec<FieldTrace>) {
    let coord = |name: &str| {
        item.fields.iter().position(|f| f.name == name && f.spec.method == Method::Am4)
    };
    let pair = match (coord("x"), coord("y")) {
        (Some(xi), Some(yi)) => Some((xi, yi)),
        _ => None,
    };

    let mut traces = Vec::with_capacity(item.fields.len());
    for (i, field) in item.fields.iter().enumerate() {
        if let Some((xi, yi)) = pair {
            if i == xi.max(yi) {
                continue; // merged into the pair's first slot
            }
            if i == xi.min(yi) {
                traces.push(position_trace(cfg, item, pf, obj, xi, yi));
                continue;
            }
        }
        traces.push(eval_field(cfg, field.spec, &field.value, pf, obj));
    }
    let s = traces.iter().map(|t| t.s_value_field).sum::<f64>() / traces.len() as f64;
    (s, traces)
}

fn position_trace(
    cfg: &MatcherConfig,
    item: &QueryItem,
    pf: &PageFeature,
    obj: Option<&LayoutObject>,
    xi: usize,
    yi: usize,
) -> FieldTrace {
    let (qx, qy) = match (item.fields[xi].value.as_scalar(), item.fields[yi].value.as_scalar()) {
        (Some(x), Some(y)) => (x, y),
        _ => (0.0, 0.0),
    };
    let mut trace =
        FieldTrace::plain("position", format!("({qx}, {qy})"), Method::Am4);
    let (fx, fy) = match obj.and_then(|o| o.geometry.as_ref()) {
        Some(g) => match (g.x, g.y) {
            (Some(x), Some(y)) => (x, y),
            _ => return trace,
        },
        None => return trace,
    };
    trace.feature_value = Some(format!("({fx}, {fy})"));
    trace.with_decay(am4(cfg, (qx, qy), (fx, fy), page_rect(pf)))
}

/// Scores one item against a page: page-geometry items read the page
/// directly; object items take the best-scoring object of their kind
/// (ties to the lowest ordinal), or 0 when none exists.
pub fn score_item(
    cfg: &MatcherConfig,
    item: &QueryItem,
    item_index: usize,
    pf: &PageFeature,
) -> ScoreTrace {
    let (matched, s, fields) = best_candidate(cfg, item, pf, None);
    ScoreTrace {
        item_index,
        kind: item.kind.as_str().to_string(),
        matched,
        fields,
        s_value_item: s,
    }
}

/// Evaluates an item over its candidates, skipping object ordinals in
/// `claimed` when present.
fn best_candidate(
    cfg: &MatcherConfig,
    item: &QueryItem,
    pf: &PageFeature,
    claimed: Option<&BTreeSet<usize>>,
) -> (Option<MatchedRef>, f64, Vec<FieldTrace>) {
    match item.kind {
        ItemKind::PageGeometry => {
            let (s, fields) = score_candidate(cfg, item, pf, None);
            (Some(MatchedRef::PageGeometry), s, fields)
        }
        ItemKind::Object(kind) => {
            let mut best: Option<(usize, f64, Vec<FieldTrace>)> = None;
            for (ordinal, obj) in pf.objects.iter().enumerate() {
                if obj.kind != kind || claimed.is_some_and(|c| c.contains(&ordinal)) {
                    continue;
                }
                let (s, fields) = score_candidate(cfg, item, pf, Some(obj));
                if best.as_ref().is_none_or(|(_, bs, _)| s > *bs) {
                    best = Some((ordinal, s, fields));
                }
            }
            match best {
                Some((ordinal, s, fields)) => {
                    (Some(MatchedRef::Object { ordinal }), s, fields)
                }
                None => {
                    let fields = item
                        .fields
                        .iter()
                        .map(|f| FieldTrace::plain(f.name, f.value.display(), f.spec.method))
                        .collect();
                    (None, 0.0, fields)
                }
            }
        }
    }
}

/// Scores a whole query against one page.
pub fn score_page(cfg: &MatcherConfig, rq: &RetrievalQuery, pf: &PageFeature) -> ScoredPage {
    let traces = match cfg.assignment {
        AssignmentMode::Independent => rq
            .items
            .iter()
            .enumerate()
            .map(|(i, item)| score_item(cfg, item, i, pf))
            .collect::<Vec<_>>(),
        AssignmentMode::OneToOne => score_one_to_one(cfg, rq, pf),
    };
    let n = traces.len();
    let s_value_final = traces.iter().map(|t| t.s_value_item).sum::<f64>() / n as f64;
    ScoredPage {
        doc_id: pf.doc_id.clone(),
        page_index: pf.page_index,
        s_value_final,
        n,
        traces,
    }
}

/// Greedy one-to-one assignment: repeatedly give the currently
/// best-scoring unassigned item its object, so no object satisfies two
/// items. Ties settle on the lowest item index, then the lowest ordinal.
fn score_one_to_one(
    cfg: &MatcherConfig,
    rq: &RetrievalQuery,
    pf: &PageFeature,
) -> Vec<ScoreTrace> {
    let mut claimed: BTreeSet<usize> = BTreeSet::new();
    let mut out: Vec<Option<ScoreTrace>> = vec![None; rq.items.len()];
    for _ in 0..rq.items.len() {
        let mut best: Option<(usize, Option<MatchedRef>, f64, Vec<FieldTrace>)> = None;
        for (i, item) in rq.items.iter().enumerate() {
            if out[i].is_some() {
                continue;
            }
            let (matched, s, fields) = best_candidate(cfg, item, pf, Some(&claimed));
            if best.as_ref().is_none_or(|(_, _, bs, _)| s > *bs) {
                best = Some((i, matched, s, fields));
            }
        }
        let (i, matched, s, fields) = best.expect("an unassigned item remains");
        if let Some(MatchedRef::Object { ordinal }) = matched {
            claimed.insert(ordinal);
        }
        out[i] = Some(ScoreTrace {
            item_index: i,
            kind: rq.items[i].kind.as_str().to_string(),
            matched,
            fields,
            s_value_item: s,
        });
    }
    out.into_iter().map(|t| t.expect("all items assigned")).collect()
}

/// Scores every page of the query's document type, keeps those at or above
/// the threshold, and ranks them (score descending, then document id and
/// page index ascending).
pub fn search(
    cfg: &MatcherConfig,
    rq: &RetrievalQuery,
    db: &FeatureDb,
    top_k: Option<usize>,
) -> Vec<ScoredPage> {
    let threshold = cfg.resolve_threshold(rq.threshold, rq.query_count());
    let pages: Vec<&PageFeature> = db.pages_of_type(rq.doc_type).collect();
    let mut hits: Vec<ScoredPage> = pages
        .par_iter()
        .map(|pf| score_page(cfg, rq, pf))
        .filter(|sp| sp.s_value_final >= threshold)
        .collect();
    hits.sort_by(|a, b| {
        b.s_value_final
            .total_cmp(&a.s_value_final)
            .then_with(|| a.doc_id.cmp(&b.doc_id))
            .then_with(|| a.page_index.cmp(&b.page_index))
    });
    if let Some(k) = top_k {
        hits.truncate(k);
    }
    hits
}

/// Writes ranked results in the feature-db line format: a header line,
/// then one record per page, traces included.
pub fn write_results<W: Write>(
    mut w: W,
    threshold: f64,
    results: &[ScoredPage],
) -> io::Result<()> {
    #[derive(Serialize)]
    struct Header<'a> {
        schema: u32,
        unit: &'a str,
        created: String,
        threshold: f64,
        result_count: usize,
    }
    let header = Header {
        schema: crate::store::SCHEMA_VERSION,
        unit: crate::store::DB_UNIT,
        created: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        threshold,
        result_count: results.len(),
    };
    writeln!(w, "{}", serde_json::to_string(&header)?)?;
    for page in results {
        writeln!(w, "{}", serde_json::to_string(page)?)?;
    }
    Ok(())
}
