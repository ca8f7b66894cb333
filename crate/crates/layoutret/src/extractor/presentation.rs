//! Slide extraction.
//!
//! Slide markup leaves most styling implicit: a run without an explicit
//! size, color, or face inherits from the slide layout's placeholder, then
//! the master's, then the master's text styles, with scheme colors and
//! `+mj-lt`/`+mn-lt` faces resolved through the theme. Geometry cascades
//! the same way for placeholders, and group members are flattened to
//! absolute page coordinates.

use std::collections::BTreeMap;

use crate::container::OpcPackage;
use crate::feature::{
    DocType, LayoutObject, ObjectGeometry, PageFeature, PageGeometry, TableProps, TextProps,
    normalize_rgb,
};
use crate::units::{SourceUnit, convert_length};

use super::{ExtractError, Node, NodeExt, Theme, attr_i64, main_part, parse_xml};

const DEFAULT_SLIDE_CX: i64 = 9_144_000;
const DEFAULT_SLIDE_CY: i64 = 6_858_000;

pub(super) fn extract(pkg: &OpcPackage, doc_id: &str) -> Result<Vec<PageFeature>, ExtractError> {
    let main = main_part(pkg)?;
    let pres = pkg.part(main).expect("main part exists");
    let doc = parse_xml(&pres.data, main)?;
    let root = doc.root_element();

    let (cx, cy) = root
        .el("sldSz")
        .map(|n| {
            (
                attr_i64(n, "cx").unwrap_or(DEFAULT_SLIDE_CX),
                attr_i64(n, "cy").unwrap_or(DEFAULT_SLIDE_CY),
            )
        })
        .unwrap_or((DEFAULT_SLIDE_CX, DEFAULT_SLIDE_CY));
    let width = convert_length(cx as f64, SourceUnit::Emu);
    let height = convert_length(cy as f64, SourceUnit::Emu);

    let slide_rids: Vec<String> = root
        .el("sldIdLst")
        .map(|l| {
            l.els("sldId")
                .filter_map(|s| s.attr_rel("id"))
                .map(String::from)
                .collect()
        })
        .unwrap_or_default();

    let main_name = main.to_string();
    let mut pages = Vec::with_capacity(slide_rids.len());
    for (i, rid) in slide_rids.iter().enumerate() {
        let page_index = (i + 1) as u32;
        let Some(slide) = pkg.part_by_rel_id(&main_name, rid) else {
            log::warn!("{doc_id}: slide {page_index} relationship {rid} is unresolved; skipped");
            continue;
        };
        match slide_objects_of_part(pkg, &slide.name) {
            Ok(objects) => pages.push(PageFeature {
                doc_id: doc_id.to_string(),
                doc_type: DocType::Presentation,
                page_index,
                page_geometry: PageGeometry {
                    width: Some(width),
                    height: Some(height),
                    ..PageGeometry::default()
                },
                objects,
            }),
            Err(e) => log::warn!("{doc_id}: slide {page_index} skipped: {e}"),
        }
    }
    Ok(pages)
}

fn slide_objects_of_part(
    pkg: &OpcPackage,
    slide_name: &str,
) -> Result<Vec<LayoutObject>, ExtractError> {
    let slide = pkg.part(slide_name).expect("slide part exists");
    let doc = parse_xml(&slide.data, slide_name)?;
    let cascade = Cascade::build(pkg, slide_name);
    let sp_tree = doc
        .root_element()
        .el("cSld")
        .and_then(|c| c.el("spTree"))
        .ok_or_else(|| ExtractError::Malformed {
            part: slide_name.to_string(),
            detail: "no shape tree".to_string(),
        })?;
    let mut objects = Vec::new();
    walk_shapes(sp_tree, Xform::IDENTITY, &cascade, &mut objects);
    Ok(objects)
}

// ---- group flattening ------------------------------------------------------

/// Affine map from child EMU coordinates to absolute page EMU.
#[derive(Debug, Clone, Copy)]
struct Xform {
    sx: f64,
    sy: f64,
    dx: f64,
    dy: f64,
}

impl Xform {
    const IDENTITY: Xform = Xform { sx: 1.0, sy: 1.0, dx: 0.0, dy: 0.0 };

    fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        (x * self.sx + self.dx, y * self.sy + self.dy)
    }

    /// Composes the transform of a group placed at `off` whose children
    /// live in a `ch_off`/`ch_ext`-based coordinate space scaled to `ext`.
    fn enter_group(&self, off: (f64, f64), ext: (f64, f64), ch_off: (f64, f64), ch_ext: (f64, f64)) -> Xform {
        let s = (
            if ch_ext.0 > 0.0 { ext.0 / ch_ext.0 } else { 1.0 },
            if ch_ext.1 > 0.0 { ext.1 / ch_ext.1 } else { 1.0 },
        );
        Xform {
            sx: self.sx * s.0,
            sy: self.sy * s.1,
            dx: self.dx + self.sx * (off.0 - ch_off.0 * s.0),
            dy: self.dy + self.sy * (off.1 - ch_off.1 * s.1),
        }
    }
}

/// Raw shape frame in EMU.
#[derive(Debug, Clone, Copy)]
struct EmuRect {
    x: f64,
    y: f64,
    cx: f64,
    cy: f64,
}

fn read_xfrm(holder: Node) -> Option<EmuRect> {
    let xfrm = holder.el("xfrm")?;
    let off = xfrm.el("off")?;
    let ext = xfrm.el("ext")?;
    Some(EmuRect {
        x: attr_i64(off, "x")? as f64,
        y: attr_i64(off, "y")? as f64,
        cx: attr_i64(ext, "cx")? as f64,
        cy: attr_i64(ext, "cy")? as f64,
    })
}

/// Converts a transformed EMU frame to page-relative centimeters.
/// Negative positions clamp to the page edge; degenerate sizes are the
/// caller's cue to skip the object.
fn to_geometry(rect: EmuRect, xf: &Xform) -> Option<ObjectGeometry> {
    let (x, y) = xf.apply(rect.x, rect.y);
    let (w, h) = (rect.cx * xf.sx, rect.cy * xf.sy);
    if !(w.is_finite() && h.is_finite() && w >= 0.0 && h >= 0.0) {
        return None;
    }
    Some(ObjectGeometry::placed(
        convert_length(x.max(0.0), SourceUnit::Emu),
        convert_length(y.max(0.0), SourceUnit::Emu),
        convert_length(w, SourceUnit::Emu),
        convert_length(h, SourceUnit::Emu),
    ))
}

fn walk_shapes(tree: Node, xf: Xform, cascade: &Cascade, out: &mut Vec<LayoutObject>) {
    for child in tree.children().filter(|c| c.is_element()) {
        match child.tag_name().name() {
            "sp" => handle_sp(child, xf, cascade, out),
            "cxnSp" => handle_cxn(child, xf, out),
            "pic" => handle_pic(child, xf, out),
            "graphicFrame" => handle_frame(child, xf, cascade, out),
            "grpSp" => {
                let Some(xfrm) = child.el("grpSpPr").and_then(|p| p.el("xfrm")) else {
                    log::warn!("group without transform; members skipped");
                    continue;
                };
                let point = |el: &str, a: &str, b: &str| {
                    xfrm.el(el)
                        .map(|n| (attr_i64(n, a).unwrap_or(0) as f64, attr_i64(n, b).unwrap_or(0) as f64))
                };
                let Some(off) = point("off", "x", "y") else { continue };
                let Some(ext) = point("ext", "cx", "cy") else { continue };
                let ch_off = point("chOff", "x", "y").unwrap_or(off);
                let ch_ext = point("chExt", "cx", "cy").unwrap_or(ext);
                walk_shapes(child, xf.enter_group(off, ext, ch_off, ch_ext), cascade, out);
            }
            _ => {}
        }
    }
}

/// Placeholder identity of a shape, if any.
fn placeholder(sp: Node) -> Option<(Option<String>, Option<String>)> {
    let ph = sp.el("nvSpPr")?.el("nvPr")?.el("ph")?;
    Some((
        ph.attribute("type").map(String::from),
        ph.attribute("idx").map(String::from),
    ))
}

fn handle_sp(sp: Node, xf: Xform, cascade: &Cascade, out: &mut Vec<LayoutObject>) {
    let ph = placeholder(sp);
    let is_text_box = sp
        .el("nvSpPr")
        .and_then(|n| n.el("cNvSpPr"))
        .and_then(|c| c.attribute("txBox"))
        .is_some_and(|v| v == "1" || v == "true");

    let sp_pr = sp.el("spPr");
    let rect = sp_pr.and_then(read_xfrm).or_else(|| {
        // placeholders inherit their frame from the layout/master chain
        ph.as_ref().and_then(|(t, i)| cascade.ph_geometry(t.as_deref(), i.as_deref()))
    });
    let Some(geometry) = rect.and_then(|r| to_geometry(r, &xf)) else {
        log::warn!("shape without a resolvable frame; skipped");
        return;
    };

    let family = match ph.as_ref().and_then(|(t, _)| t.as_deref()) {
        Some("title" | "ctrTitle") => StyleFamily::Title,
        Some(_) => StyleFamily::Body,
        None if ph.is_some() => StyleFamily::Body,
        None => StyleFamily::Other,
    };
    let (ph_type, ph_idx) = match &ph {
        Some((t, i)) => (t.as_deref(), i.as_deref()),
        None => (None, None),
    };
    let text = collect_text(sp.el("txBody"), cascade, family, ph_type, ph_idx);

    if is_text_box || ph.is_some() {
        out.push(LayoutObject::textbox(geometry, text));
    } else {
        let shape_type = sp_pr
            .and_then(|p| p.el("prstGeom"))
            .and_then(|g| g.attribute("prst"))
            .map(|p| p.to_ascii_lowercase())
            .unwrap_or_else(|| "custom".to_string());
        out.push(LayoutObject::shape(geometry, shape_type, text));
    }
}

fn handle_cxn(cxn: Node, xf: Xform, out: &mut Vec<LayoutObject>) {
    let Some(geometry) = cxn.el("spPr").and_then(read_xfrm).and_then(|r| to_geometry(r, &xf))
    else {
        return;
    };
    let shape_type = cxn
        .el("spPr")
        .and_then(|p| p.el("prstGeom"))
        .and_then(|g| g.attribute("prst"))
        .map(|p| p.to_ascii_lowercase())
        .unwrap_or_else(|| "custom".to_string());
    out.push(LayoutObject::shape(geometry, shape_type, TextProps::default()));
}

fn handle_pic(pic: Node, xf: Xform, out: &mut Vec<LayoutObject>) {
    let Some(geometry) = pic.el("spPr").and_then(read_xfrm).and_then(|r| to_geometry(r, &xf))
    else {
        log::warn!("picture without a frame; skipped");
        return;
    };
    out.push(LayoutObject::image(geometry));
}

fn handle_frame(frame: Node, xf: Xform, cascade: &Cascade, out: &mut Vec<LayoutObject>) {
    let Some(tbl) = frame
        .el("graphic")
        .and_then(|g| g.el("graphicData"))
        .and_then(|d| d.el("tbl"))
    else {
        return; // other graphic payloads (slide charts, diagrams) are not layout features
    };
    let rows = tbl.els("tr").count() as u32;
    let cols = tbl
        .el("tblGrid")
        .map(|g| g.els("gridCol").count() as u32)
        .unwrap_or(0);
    if rows == 0 || cols == 0 {
        log::warn!("table without rows or columns; skipped");
        return;
    }
    let mut text = TextProps::default();
    for tr in tbl.els("tr") {
        for tc in tr.els("tc") {
            collect_text_into(tc.el("txBody"), cascade, StyleFamily::Other, None, None, &mut text);
        }
    }
    let geometry = read_xfrm(frame).and_then(|r| to_geometry(r, &xf));
    out.push(LayoutObject::table(geometry, TableProps { rows, cols }, text));
}

// ---- run-property cascade ---------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum StyleFamily {
    Title,
    Body,
    Other,
}

/// One fully-resolved bundle of default run properties.
#[derive(Debug, Clone, Default)]
struct RunDefaults {
    size_pt: Option<f64>,
    color: Option<String>,
    face: Option<String>,
}

/// Per-level defaults of a placeholder, plus its inherited frame.
#[derive(Debug, Clone, Default)]
struct PhStyle {
    geom: Option<EmuRect>,
    levels: Vec<RunDefaults>,
}

/// Everything a slide inherits from its layout, master, and theme.
#[derive(Debug, Default)]
struct Cascade {
    theme: Theme,
    /// Scheme-color aliasing from the master (`bg1` → `lt1`, …).
    clr_map: BTreeMap<String, String>,
    layout_by_type: BTreeMap<String, PhStyle>,
    layout_by_idx: BTreeMap<String, PhStyle>,
    master_by_type: BTreeMap<String, PhStyle>,
    master_by_idx: BTreeMap<String, PhStyle>,
    title_style: Vec<RunDefaults>,
    body_style: Vec<RunDefaults>,
    other_style: Vec<RunDefaults>,
}

impl Cascade {
    fn build(pkg: &OpcPackage, slide_name: &str) -> Cascade {
        let mut cascade = Cascade::default();
        let layout_name = pkg.related_part(slide_name, "/slideLayout").map(|p| p.name.clone());
        let master_name = layout_name
            .as_ref()
            .and_then(|l| pkg.related_part(l, "/slideMaster"))
            .map(|p| p.name.clone());

        if let Some(master) = &master_name {
            cascade.theme = Theme::for_part(pkg, master);
            let part = pkg.part(master).expect("related part exists");
            if let Ok(doc) = parse_xml(&part.data, master) {
                let root = doc.root_element();
                if let Some(map) = root.el("clrMap") {
                    for a in map.attributes() {
                        cascade.clr_map.insert(a.name().to_string(), a.value().to_string());
                    }
                }
                (cascade.master_by_type, cascade.master_by_idx) =
                    cascade.collect_placeholders(root);
                if let Some(styles) = root.el("txStyles") {
                    let levels = |name: &str| {
                        styles.el(name).map(|s| cascade.level_defaults(s)).unwrap_or_default()
                    };
                    let (title, body, other) =
                        (levels("titleStyle"), levels("bodyStyle"), levels("otherStyle"));
                    cascade.title_style = title;
                    cascade.body_style = body;
                    cascade.other_style = other;
                }
            }
        }
        if let Some(layout) = &layout_name {
            let part = pkg.part(layout).expect("related part exists");
            if let Ok(doc) = parse_xml(&part.data, layout) {
                (cascade.layout_by_type, cascade.layout_by_idx) =
                    cascade.collect_placeholders(doc.root_element());
            }
        }
        cascade
    }

    fn collect_placeholders(
        &self,
        root: Node,
    ) -> (BTreeMap<String, PhStyle>, BTreeMap<String, PhStyle>) {
        let mut by_type = BTreeMap::new();
        let mut by_idx = BTreeMap::new();
        let Some(tree) = root.el("cSld").and_then(|c| c.el("spTree")) else {
            return (by_type, by_idx);
        };
        for sp in tree.descendants().filter(|n| n.tag_name().name() == "sp") {
            let Some((ph_type, ph_idx)) = placeholder(sp) else { continue };
            let style = PhStyle {
                geom: sp.el("spPr").and_then(read_xfrm),
                levels: sp
                    .el("txBody")
                    .and_then(|b| b.el("lstStyle"))
                    .map(|l| self.level_defaults(l))
                    .unwrap_or_default(),
            };
            if let Some(t) = ph_type {
                by_type.insert(t, style.clone());
            }
            if let Some(i) = ph_idx {
                by_idx.insert(i, style);
            }
        }
        (by_type, by_idx)
    }

    /// Reads `lvl1pPr`..`lvl9pPr` default run properties off `parent`.
    fn level_defaults(&self, parent: Node) -> Vec<RunDefaults> {
        (1..=9)
            .map(|lvl| {
                parent
                    .children()
                    .find(|c| c.is_element() && c.tag_name().name() == format!("lvl{lvl}pPr"))
                    .and_then(|p| p.el("defRPr"))
                    .map(|d| self.run_defaults(d))
                    .unwrap_or_default()
            })
            .collect()
    }

    /// Resolves one `rPr`/`defRPr` node to concrete values.
    fn run_defaults(&self, rpr: Node) -> RunDefaults {
        RunDefaults {
            size_pt: attr_i64(rpr, "sz")
                .filter(|v| *v > 0)
                .map(|v| convert_length(v as f64, SourceUnit::CentiPoint)),
            color: self.fill_color(rpr),
            face: rpr
                .el("latin")
                .and_then(|l| l.attribute("typeface"))
                .and_then(|t| self.resolve_face(t)),
        }
    }

    /// A node's solid-fill color: explicit RGB, or a scheme reference
    /// resolved through the color map and theme. Unresolvable → `None`.
    fn fill_color(&self, node: Node) -> Option<String> {
        let fill = node.el("solidFill")?;
        if let Some(rgb) = fill.el("srgbClr").and_then(|c| c.attribute("val")) {
            return normalize_rgb(rgb);
        }
        let scheme = fill.el("schemeClr")?.attribute("val")?;
        let slot = self.clr_map.get(scheme).map(String::as_str).unwrap_or(scheme);
        self.theme.color(slot)
    }

    /// Case-folds a typeface, resolving `+mj-lt`/`+mn-lt` through the theme.
    fn resolve_face(&self, typeface: &str) -> Option<String> {
        if typeface.is_empty() {
            None
        } else if typeface.starts_with('+') {
            self.theme.latin(typeface)
        } else {
            Some(typeface.to_ascii_lowercase())
        }
    }

    fn ph_chain(
        &self,
        ph_type: Option<&str>,
        ph_idx: Option<&str>,
    ) -> impl Iterator<Item = &PhStyle> {
        [
            ph_idx.and_then(|i| self.layout_by_idx.get(i)),
            ph_type.and_then(|t| self.layout_by_type.get(t)),
            ph_idx.and_then(|i| self.master_by_idx.get(i)),
            ph_type.and_then(|t| self.master_by_type.get(t)),
        ]
        .into_iter()
        .flatten()
    }

    fn ph_geometry(&self, ph_type: Option<&str>, ph_idx: Option<&str>) -> Option<EmuRect> {
        self.ph_chain(ph_type, ph_idx).find_map(|s| s.geom)
    }

    /// Per-attribute inheritance: layout placeholder, master placeholder,
    /// then the master's family text style, all at the paragraph's level.
    fn inherited<T: Clone>(
        &self,
        family: StyleFamily,
        ph_type: Option<&str>,
        ph_idx: Option<&str>,
        lvl: usize,
        get: impl Fn(&RunDefaults) -> Option<T>,
    ) -> Option<T> {
        for ph in self.ph_chain(ph_type, ph_idx) {
            if let Some(v) = ph.levels.get(lvl).and_then(&get) {
                return Some(v);
            }
        }
        let fam = match family {
            StyleFamily::Title => &self.title_style,
            StyleFamily::Body => &self.body_style,
            StyleFamily::Other => &self.other_style,
        };
        fam.get(lvl).and_then(&get)
    }
}

fn collect_text(
    tx_body: Option<Node>,
    cascade: &Cascade,
    family: StyleFamily,
    ph_type: Option<&str>,
    ph_idx: Option<&str>,
) -> TextProps {
    let mut text = TextProps::default();
    collect_text_into(tx_body, cascade, family, ph_type, ph_idx, &mut text);
    text
}

fn collect_text_into(
    tx_body: Option<Node>,
    cascade: &Cascade,
    family: StyleFamily,
    ph_type: Option<&str>,
    ph_idx: Option<&str>,
    text: &mut TextProps,
) {
    let Some(body) = tx_body else { return };
    for p in body.els("p") {
        let lvl = p
            .el("pPr")
            .and_then(|pr| attr_u32_usize(pr, "lvl"))
            .unwrap_or(0)
            .min(8);
        for r in p.els("r") {
            if r.el("t").and_then(|t| t.text()).is_none_or(str::is_empty) {
                continue;
            }
            let rpr = r.el("rPr");
            let explicit = rpr.map(|n| cascade.run_defaults(n)).unwrap_or_default();
            let size = explicit.size_pt.or_else(|| {
                cascade.inherited(family, ph_type, ph_idx, lvl, |d| d.size_pt)
            });
            let color = explicit.color.or_else(|| {
                cascade.inherited(family, ph_type, ph_idx, lvl, |d| d.color.clone())
            });
            let face = explicit.face.or_else(|| {
                cascade.inherited(family, ph_type, ph_idx, lvl, |d| d.face.clone())
            });
            if let Some(size) = size {
                text.font_sizes.push(size);
            }
            if let Some(color) = color {
                text.font_colors.push(color);
            }
            if let Some(face) = face {
                text.font_names.push(face);
            }
        }
    }
}

fn attr_u32_usize(node: Node, name: &str) -> Option<usize> {
    node.attribute(name).and_then(|v| v.trim().parse().ok())
}
