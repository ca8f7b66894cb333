//! Word-processing extraction.
//!
//! Flowed text has no fixed pages without running a layout engine, so each
//! section becomes one page record: its properties define the page size,
//! margins, and column count, and the body text, tables, images, notes,
//! headers, and footers that precede its section break are attributed to it.
//!
//! Run styling resolves through the document's style inheritance: explicit
//! run properties, then the run's character style chain, then the
//! paragraph's style chain, then the document defaults, with theme color
//! and face references resolved to concrete values.

use std::collections::BTreeMap;

use crate::container::OpcPackage;
use crate::feature::{
    DocType, LayoutObject, Margins, ObjectGeometry, ObjectKind, PageFeature, PageGeometry,
    TableProps, TextProps, normalize_rgb,
};
use crate::units::{SourceUnit, convert_length};

use super::{ExtractError, Node, NodeExt, Theme, attr_i64, main_part, parse_xml};

pub(super) fn extract(pkg: &OpcPackage, doc_id: &str) -> Result<Vec<PageFeature>, ExtractError> {
    let main = main_part(pkg)?.to_string();
    let part = pkg.part(&main).expect("main part exists");
    let doc = parse_xml(&part.data, &main)?;
    let body = doc.root_element().el("body").ok_or_else(|| ExtractError::Malformed {
        part: main.clone(),
        detail: "no document body".to_string(),
    })?;

    let resolver = Resolver::build(pkg, &main);
    let notes = NoteBank::build(pkg, &main, &resolver);

    let mut builder = SectionBuilder {
        pkg,
        main: &main,
        doc_id,
        resolver: &resolver,
        notes: &notes,
        acc: SectionAcc::default(),
        pages: Vec::new(),
    };
    builder.walk_blocks(body);
    if builder.acc.dirty {
        // a well-formed body ends with its own section properties; tolerate
        // their absence by closing the last section on defaults
        builder.flush(None);
    }
    Ok(builder.pages)
}

// ---- section accumulation ----------------------------------------------------

const DEFAULT_PAGE_W_TWIPS: i64 = 12_240;
const DEFAULT_PAGE_H_TWIPS: i64 = 15_840;
const DEFAULT_MARGIN_TWIPS: i64 = 1_440;
const DEFAULT_HEADER_FOOTER_TWIPS: i64 = 720;
const DEFAULT_COLUMN_GAP_TWIPS: i64 = 720;

#[derive(Default)]
struct SectionAcc {
    dirty: bool,
    body: TextProps,
    has_body: bool,
    footnotes: TextProps,
    has_footnotes: bool,
    endnotes: TextProps,
    has_endnotes: bool,
    tables: Vec<(TableProps, TextProps)>,
    images: Vec<ObjectGeometry>,
}

struct SectionBuilder<'a> {
    pkg: &'a OpcPackage,
    main: &'a str,
    doc_id: &'a str,
    resolver: &'a Resolver,
    notes: &'a NoteBank,
    acc: SectionAcc,
    pages: Vec<PageFeature>,
}

impl SectionBuilder<'_> {
    /// Walks block-level content in document order. A paragraph carrying
    /// section properties closes the section it belongs to; the trailing
    /// body-level properties close the last one.
    fn walk_blocks(&mut self, scope: Node) {
        for child in scope.children().filter(|c| c.is_element()) {
            match child.tag_name().name() {
                "p" => {
                    self.scan_paragraph(child, None);
                    if let Some(spr) = child.el("pPr").and_then(|p| p.el("sectPr")) {
                        self.flush(Some(spr));
                    }
                }
                "tbl" => self.scan_table(child),
                "sectPr" => self.flush(Some(child)),
                // structured document tags (tables of contents live here)
                // contribute their content as ordinary body flow
                "sdt" => {
                    if let Some(content) = child.el("sdtContent") {
                        self.walk_blocks(content);
                    }
                }
                _ => {}
            }
        }
    }

    /// Collects one paragraph's runs: text styling, note references, and
    /// inline drawings. `table_slot` routes text to a table instead of the
    /// section body.
    fn scan_paragraph(&mut self, p: Node, table_slot: Option<usize>) {
        let p_style = p
            .el("pPr")
            .and_then(|pr| pr.el("pStyle"))
            .and_then(|s| s.attribute("val"))
            .map(String::from);
        for run in p.descendants().filter(|n| n.tag_name().name() == "r") {
            if let Some(id) = run.el("footnoteReference").and_then(|n| n.attr_any("id")) {
                if let Some(props) = self.notes.footnotes.get(id) {
                    extend_text(&mut self.acc.footnotes, props);
                    self.acc.has_footnotes = true;
                    self.acc.dirty = true;
                }
            }
            if let Some(id) = run.el("endnoteReference").and_then(|n| n.attr_any("id")) {
                if let Some(props) = self.notes.endnotes.get(id) {
                    extend_text(&mut self.acc.endnotes, props);
                    self.acc.has_endnotes = true;
                    self.acc.dirty = true;
                }
            }
            if let Some(drawing) = run.el("drawing") {
                self.scan_drawing(drawing);
            }
            let has_text = run.els("t").any(|t| t.text().is_some_and(|s| !s.is_empty()));
            if !has_text {
                continue;
            }
            let props = self.resolver.resolve(run.el("rPr"), p_style.as_deref());
            let target = match table_slot {
                Some(i) => &mut self.acc.tables[i].1,
                None => {
                    self.acc.has_body = true;
                    &mut self.acc.body
                }
            };
            push_props(target, &props);
            self.acc.dirty = true;
        }
    }

    /// Inline and anchored drawings both declare their display size in an
    /// `extent` element; position is not extracted for flowed documents.
    fn scan_drawing(&mut self, drawing: Node) {
        for holder in drawing.children().filter(|c| {
            matches!(c.tag_name().name(), "inline" | "anchor")
        }) {
            let Some(extent) = holder.el("extent") else { continue };
            let (Some(cx), Some(cy)) = (attr_i64(extent, "cx"), attr_i64(extent, "cy")) else {
                continue;
            };
            if cx < 0 || cy < 0 {
                log::warn!("{}: drawing with negative extent; skipped", self.doc_id);
                continue;
            }
            self.acc.images.push(ObjectGeometry::sized(
                convert_length(cx as f64, SourceUnit::Emu),
                convert_length(cy as f64, SourceUnit::Emu),
            ));
            self.acc.dirty = true;
        }
    }

    fn scan_table(&mut self, tbl: Node) {
        let rows = tbl.els("tr").count() as u32;
        let cols = tbl
            .el("tblGrid")
            .map(|g| g.els("gridCol").count() as u32)
            .unwrap_or(0);
        if rows == 0 || cols == 0 {
            log::warn!("{}: table without rows or columns; skipped", self.doc_id);
            return;
        }
        self.acc.tables.push((TableProps { rows, cols }, TextProps::default()));
        let slot = self.acc.tables.len() - 1;
        for tr in tbl.els("tr") {
            for tc in tr.els("tc") {
                for p in tc.els("p") {
                    self.scan_paragraph(p, Some(slot));
                }
            }
        }
        self.acc.dirty = true;
    }

    /// Closes the current section: reads the page grid off the section
    /// properties, attaches header/footer text, and emits the page record.
    fn flush(&mut self, sect_pr: Option<Node>) {
        let acc = std::mem::take(&mut self.acc);
        let twips = |el: Option<Node>, attr: &str, default: i64| {
            el.and_then(|n| attr_i64(n, attr)).unwrap_or(default).max(0)
        };
        let cm = |v: i64| convert_length(v as f64, SourceUnit::Twip);

        let pg_sz = sect_pr.and_then(|s| s.el("pgSz"));
        let pg_mar = sect_pr.and_then(|s| s.el("pgMar"));
        let cols = sect_pr.and_then(|s| s.el("cols"));
        let geometry = PageGeometry {
            width: Some(cm(twips(pg_sz, "w", DEFAULT_PAGE_W_TWIPS))),
            height: Some(cm(twips(pg_sz, "h", DEFAULT_PAGE_H_TWIPS))),
            columns: Some(
                cols.and_then(|c| c.attribute("num"))
                    .and_then(|v| v.trim().parse().ok())
                    .unwrap_or(1),
            ),
            margins: Some(Margins {
                upper: cm(twips(pg_mar, "top", DEFAULT_MARGIN_TWIPS)),
                right: cm(twips(pg_mar, "right", DEFAULT_MARGIN_TWIPS)),
                lower: cm(twips(pg_mar, "bottom", DEFAULT_MARGIN_TWIPS)),
                left: cm(twips(pg_mar, "left", DEFAULT_MARGIN_TWIPS)),
                header: cm(twips(pg_mar, "header", DEFAULT_HEADER_FOOTER_TWIPS)),
                footer: cm(twips(pg_mar, "footer", DEFAULT_HEADER_FOOTER_TWIPS)),
                gutter: cm(twips(pg_mar, "gutter", 0)),
                column: cm(twips(cols, "space", DEFAULT_COLUMN_GAP_TWIPS)),
            }),
            ..PageGeometry::default()
        };

        let mut objects = Vec::new();
        if acc.has_body {
            objects.push(LayoutObject::text_block(ObjectKind::BodyText, acc.body));
        }
        if acc.has_footnotes {
            objects.push(LayoutObject::text_block(ObjectKind::Footnote, acc.footnotes));
        }
        if acc.has_endnotes {
            // endnotes are layout-relevant text flow but have no query row
            // of their own; they surface as additional body text
            objects.push(LayoutObject::text_block(ObjectKind::BodyText, acc.endnotes));
        }
        for kind_of in [
            ("headerReference", ObjectKind::Header),
            ("footerReference", ObjectKind::Footer),
        ] {
            let mut text = TextProps::default();
            let mut any_runs = 0usize;
            if let Some(spr) = sect_pr {
                for reference in spr.els(kind_of.0) {
                    let Some(rid) = reference.attr_rel("id") else { continue };
                    let Some(part) = self.pkg.part_by_rel_id(self.main, rid) else {
                        log::warn!("{}: unresolved {} {rid}", self.doc_id, kind_of.0);
                        continue;
                    };
                    let name = part.name.clone();
                    match parse_xml(&part.data, &name) {
                        Ok(doc) => {
                            any_runs +=
                                collect_runs(doc.root_element(), self.resolver, &mut text);
                        }
                        Err(e) => log::warn!("{}: {e}", self.doc_id),
                    }
                }
            }
            if any_runs > 0 {
                objects.push(LayoutObject::text_block(kind_of.1, text));
            }
        }
        for (dims, text) in acc.tables {
            objects.push(LayoutObject::table(None, dims, text));
        }
        for geometry in acc.images {
            objects.push(LayoutObject::image(geometry));
        }

        self.pages.push(PageFeature {
            doc_id: self.doc_id.to_string(),
            doc_type: DocType::Wordprocessing,
            page_index: self.pages.len() as u32 + 1,
            page_geometry: geometry,
            objects,
        });
    }
}

fn push_props(text: &mut TextProps, props: &RunProps) {
    if let Some(size) = props.size_pt {
        text.font_sizes.push(size);
    }
    if let Some(color) = &props.color {
        text.font_colors.push(color.clone());
    }
    if let Some(face) = &props.face {
        text.font_names.push(face.clone());
    }
}

fn extend_text(into: &mut TextProps, from: &TextProps) {
    into.font_sizes.extend_from_slice(&from.font_sizes);
    into.font_colors.extend_from_slice(&from.font_colors);
    into.font_names.extend_from_slice(&from.font_names);
}

/// Resolves every text run under `scope` (header, footer, or note bodies),
/// returning how many runs carried text.
fn collect_runs(scope: Node, resolver: &Resolver, text: &mut TextProps) -> usize {
    let mut seen = 0;
    for p in scope.descendants().filter(|n| n.tag_name().name() == "p") {
        let p_style = p
            .el("pPr")
            .and_then(|pr| pr.el("pStyle"))
            .and_then(|s| s.attribute("val"));
        for run in p.descendants().filter(|n| n.tag_name().name() == "r") {
            if !run.els("t").any(|t| t.text().is_some_and(|s| !s.is_empty())) {
                continue;
            }
            seen += 1;
            push_props(text, &resolver.resolve(run.el("rPr"), p_style));
        }
    }
    seen
}

// ---- style resolution ---------------------------------------------------------

/// One bundle of concrete run properties; theme references are already
/// resolved by the time values land here.
#[derive(Debug, Clone, Default)]
struct RunProps {
    size_pt: Option<f64>,
    color: Option<String>,
    face: Option<String>,
}

#[derive(Debug, Default)]
struct StyleDef {
    based_on: Option<String>,
    props: RunProps,
}

#[derive(Debug, Default)]
struct Resolver {
    theme: Theme,
    styles: BTreeMap<String, StyleDef>,
    defaults: RunProps,
}

impl Resolver {
    fn build(pkg: &OpcPackage, main: &str) -> Resolver {
        let theme = Theme::for_part(pkg, main);
        let mut resolver = Resolver { theme, ..Resolver::default() };
        let Some(part) = pkg.related_part(main, "/styles") else {
            return resolver;
        };
        let name = part.name.clone();
        let Ok(doc) = parse_xml(&part.data, &name) else {
            log::warn!("unreadable style definitions in {name}; styles ignored");
            return resolver;
        };
        let root = doc.root_element();
        resolver.defaults = root
            .el("docDefaults")
            .and_then(|d| d.el("rPrDefault"))
            .and_then(|d| d.el("rPr"))
            .map(|r| resolver.read_rpr(r))
            .unwrap_or_default();
        for style in root.els("style") {
            let Some(id) = style.attr_any("styleId") else { continue };
            resolver.styles.insert(
                id.to_string(),
                StyleDef {
                    based_on: style
                        .el("basedOn")
                        .and_then(|b| b.attr_any("val"))
                        .map(String::from),
                    props: style.el("rPr").map(|r| resolver.read_rpr(r)).unwrap_or_default(),
                },
            );
        }
        resolver
    }

    /// Reads one `rPr` node: size in half-points, color as hex or a theme
    /// slot, face as a literal name or a theme reference.
    fn read_rpr(&self, rpr: Node) -> RunProps {
        let color = rpr.el("color").and_then(|c| {
            match c.attr_any("val") {
                Some("auto") | None => {}
                Some(hex) => {
                    if let Some(rgb) = normalize_rgb(hex) {
                        return Some(rgb);
                    }
                }
            }
            c.attr_any("themeColor").and_then(|slot| self.theme.color(slot))
        });
        let face = rpr.el("rFonts").and_then(|f| {
            f.attr_any("ascii")
                .filter(|v| !v.is_empty())
                .map(|v| v.to_ascii_lowercase())
                .or_else(|| f.attr_any("asciiTheme").and_then(|slot| self.theme.latin(slot)))
        });
        RunProps {
            size_pt: rpr
                .el("sz")
                .and_then(|s| attr_i64(s, "val"))
                .filter(|v| *v > 0)
                .map(|v| convert_length(v as f64, SourceUnit::HalfPoint)),
            color,
            face,
        }
    }

    /// Follows `basedOn` links from `start`, returning the first style in
    /// the chain that defines the requested attribute. Cycle-safe.
    fn chain<T>(&self, start: Option<&str>, get: impl Fn(&RunProps) -> Option<T>) -> Option<T> {
        let mut seen: Vec<&str> = Vec::new();
        let mut cursor = start;
        while let Some(id) = cursor {
            if seen.contains(&id) {
                break;
            }
            seen.push(id);
            let def = self.styles.get(id)?;
            if let Some(v) = get(&def.props) {
                return Some(v);
            }
            cursor = def.based_on.as_deref();
        }
        None
    }

    /// Attribute-wise precedence: explicit run properties, the run's
    /// character style chain, the paragraph style chain, document defaults.
    fn resolve(&self, rpr: Option<Node>, p_style: Option<&str>) -> RunProps {
        let explicit = rpr.map(|n| self.read_rpr(n)).unwrap_or_default();
        let r_style = rpr
            .and_then(|n| n.el("rStyle"))
            .and_then(|s| s.attr_any("val"));
        RunProps {
            size_pt: explicit
                .size_pt
                .or_else(|| self.chain(r_style, |p| p.size_pt))
                .or_else(|| self.chain(p_style, |p| p.size_pt))
                .or(self.defaults.size_pt),
            color: explicit
                .color
                .or_else(|| self.chain(r_style, |p| p.color.clone()))
                .or_else(|| self.chain(p_style, |p| p.color.clone()))
                .or_else(|| self.defaults.color.clone()),
            face: explicit
                .face
                .or_else(|| self.chain(r_style, |p| p.face.clone()))
                .or_else(|| self.chain(p_style, |p| p.face.clone()))
                .or_else(|| self.defaults.face.clone()),
        }
    }
}

/// Footnote and endnote bodies indexed by id, resolved once up front.
#[derive(Debug, Default)]
struct NoteBank {
    footnotes: BTreeMap<String, TextProps>,
    endnotes: BTreeMap<String, TextProps>,
}

impl NoteBank {
    fn build(pkg: &OpcPackage, main: &str, resolver: &Resolver) -> NoteBank {
        let mut bank = NoteBank::default();
        for (suffix, store) in [
            ("/footnotes", &mut bank.footnotes),
            ("/endnotes", &mut bank.endnotes),
        ] {
            let Some(part) = pkg.related_part(main, suffix) else { continue };
            let name = part.name.clone();
            let Ok(doc) = parse_xml(&part.data, &name) else {
                log::warn!("unreadable notes part {name}; ignored");
                continue;
            };
            for note in doc.root_element().children().filter(|c| c.is_element()) {
                let Some(id) = note.attr_any("id") else { continue };
                let mut text = TextProps::default();
                collect_runs(note, resolver, &mut text);
                store.insert(id.to_string(), text);
            }
        }
        bank
    }
}
