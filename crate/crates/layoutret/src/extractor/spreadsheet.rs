//! Worksheet extraction.
//!
//! A sheet's layout signature is its zoom, its used cell extent, a summary
//! of the distinct cell formats in use (font / fill / border per format),
//! and the images and charts anchored to cell ranges. Formats resolve
//! through the workbook's shared style table; anchors convert from the
//! zero-based markup to 1-based row/column references.

use crate::container::OpcPackage;
use crate::feature::{
    CellAnchor, CellRef, CellStyleProps, ChartProps, DocType, LayoutObject, PageFeature,
    PageGeometry, TextProps, normalize_rgb,
};
use crate::units::{SourceUnit, convert_length};

use super::{ExtractError, Node, NodeExt, Theme, main_part, parse_xml};

const DEFAULT_ZOOM: u32 = 100;

pub(super) fn extract(pkg: &OpcPackage, doc_id: &str) -> Result<Vec<PageFeature>, ExtractError> {
    let main = main_part(pkg)?.to_string();
    let workbook = pkg.part(&main).expect("main part exists");
    let doc = parse_xml(&workbook.data, &main)?;
    let styles = StyleTable::build(pkg, &main);

    let sheets: Vec<String> = doc
        .root_element()
        .el("sheets")
        .map(|s| {
            s.els("sheet")
                .filter_map(|n| n.attr_rel("id"))
                .map(String::from)
                .collect()
        })
        .unwrap_or_default();

    let mut pages = Vec::with_capacity(sheets.len());
    for (i, rid) in sheets.iter().enumerate() {
        let page_index = (i + 1) as u32;
        let Some(ws) = pkg.part_by_rel_id(&main, rid) else {
            log::warn!("{doc_id}: sheet {page_index} relationship {rid} is unresolved; skipped");
            continue;
        };
        let name = ws.name.clone();
        match extract_sheet(pkg, &name, &styles, doc_id) {
            Ok((page_geometry, objects)) => pages.push(PageFeature {
                doc_id: doc_id.to_string(),
                doc_type: DocType::Spreadsheet,
                page_index,
                page_geometry,
                objects,
            }),
            Err(e) => log::warn!("{doc_id}: sheet {page_index} skipped: {e}"),
        }
    }
    Ok(pages)
}

fn extract_sheet(
    pkg: &OpcPackage,
    ws_name: &str,
    styles: &StyleTable,
    doc_id: &str,
) -> Result<(PageGeometry, Vec<LayoutObject>), ExtractError> {
    let part = pkg.part(ws_name).expect("worksheet part exists");
    let doc = parse_xml(&part.data, ws_name)?;
    let root = doc.root_element();

    let zoom = root
        .el("sheetViews")
        .and_then(|v| v.el("sheetView"))
        .and_then(|v| v.attribute("zoomScale"))
        .and_then(|v| v.trim().parse::<u32>().ok())
        .filter(|z| *z > 0)
        .unwrap_or(DEFAULT_ZOOM);

    // the used extent and the distinct formats, in first-use order
    let mut max_row = 0u32;
    let mut max_col = 0u32;
    let mut used_formats: Vec<usize> = Vec::new();
    let mut any_cells = false;
    if let Some(data) = root.el("sheetData") {
        for row in data.els("row") {
            let row_nr = row.attribute("r").and_then(|v| v.trim().parse::<u32>().ok());
            for cell in row.els("c") {
                any_cells = true;
                match cell.attribute("r").and_then(a1_to_rc) {
                    Some((r, c)) => {
                        max_row = max_row.max(r);
                        max_col = max_col.max(c);
                    }
                    None => {
                        if let Some(r) = row_nr {
                            max_row = max_row.max(r);
                        }
                    }
                }
                let fmt = cell
                    .attribute("s")
                    .and_then(|v| v.trim().parse::<usize>().ok())
                    .unwrap_or(0);
                if !used_formats.contains(&fmt) {
                    used_formats.push(fmt);
                }
            }
        }
    }

    let mut objects = Vec::new();
    if any_cells {
        objects.push(styles.summarize(&used_formats));
    }

    if let Some(rid) = root.el("drawing").and_then(|d| d.attr_rel("id")) {
        if let Some(drawing) = pkg.part_by_rel_id(ws_name, rid) {
            let drawing_name = drawing.name.clone();
            match parse_xml(&drawing.data, &drawing_name) {
                Ok(dr) => {
                    for anchor in dr.root_element().children().filter(|c| c.is_element()) {
                        let Some((cell_anchor, payload)) = read_anchor(anchor) else { continue };
                        max_row = max_row.max(cell_anchor.from.row).max(cell_anchor.to.row);
                        max_col = max_col.max(cell_anchor.from.col).max(cell_anchor.to.col);
                        match payload {
                            AnchorPayload::Picture => {
                                objects.push(LayoutObject::sheet_image(cell_anchor));
                            }
                            AnchorPayload::ChartRef(chart_rid) => {
                                match chart_props(pkg, &drawing_name, &chart_rid) {
                                    Some(props) => {
                                        objects.push(LayoutObject::chart(props, cell_anchor));
                                    }
                                    None => log::warn!(
                                        "{doc_id}: unreadable chart behind {chart_rid}; skipped"
                                    ),
                                }
                            }
                        }
                    }
                }
                Err(e) => log::warn!("{doc_id}: {e}"),
            }
        }
    }

    let page_geometry = PageGeometry {
        zoom_scale: Some(zoom),
        used_rows: (max_row > 0).then_some(max_row),
        used_cols: (max_col > 0).then_some(max_col),
        ..PageGeometry::default()
    };
    Ok((page_geometry, objects))
}

enum AnchorPayload {
    Picture,
    ChartRef(String),
}

/// Reads a one- or two-cell anchor and classifies what it holds.
/// Absolute anchors have no cell range and are ignored.
fn read_anchor(anchor: Node) -> Option<(CellAnchor, AnchorPayload)> {
    let kind = anchor.tag_name().name();
    if kind != "twoCellAnchor" && kind != "oneCellAnchor" {
        return None;
    }
    let from = anchor.el("from").and_then(marker_cell)?;
    let to = match kind {
        "twoCellAnchor" => anchor.el("to").and_then(marker_cell)?,
        _ => from,
    };
    let cell_anchor = CellAnchor { from, to };
    if anchor.el("pic").is_some() {
        return Some((cell_anchor, AnchorPayload::Picture));
    }
    let chart_rid = anchor
        .el("graphicFrame")
        .and_then(|f| f.el("graphic"))
        .and_then(|g| g.el("graphicData"))
        .and_then(|d| d.el("chart"))
        .and_then(|c| c.attr_rel("id"))?;
    Some((cell_anchor, AnchorPayload::ChartRef(chart_rid.to_string())))
}

/// `col`/`row` marker children are zero-based; references are 1-based.
fn marker_cell(marker: Node) -> Option<CellRef> {
    let read = |name: &str| {
        marker
            .el(name)
            .and_then(|n| n.text())
            .and_then(|t| t.trim().parse::<u32>().ok())
    };
    Some(CellRef { row: read("row")? + 1, col: read("col")? + 1 })
}

/// Follows a drawing-to-chart relationship and classifies the plot:
/// the first plot-area child whose element name ends in `Chart` names the
/// family, and a `3D` marker in it selects dimensionality 3.
fn chart_props(pkg: &OpcPackage, drawing_name: &str, rid: &str) -> Option<ChartProps> {
    let part = pkg.part_by_rel_id(drawing_name, rid)?;
    let name = part.name.clone();
    let doc = parse_xml(&part.data, &name).ok()?;
    let plot_area = doc.root_element().el("chart")?.el("plotArea")?;
    plot_area
        .children()
        .filter(|c| c.is_element())
        .find_map(|c| {
            let tag = c.tag_name().name();
            tag.ends_with("Chart").then(|| ChartProps::parse(tag)).flatten()
        })
}

/// Converts an `A1`-style reference to 1-based (row, column).
fn a1_to_rc(reference: &str) -> Option<(u32, u32)> {
    let digits_at = reference.find(|c: char| c.is_ascii_digit())?;
    let (letters, digits) = reference.split_at(digits_at);
    if letters.is_empty() {
        return None;
    }
    let mut col = 0u32;
    for ch in letters.chars() {
        if !ch.is_ascii_alphabetic() {
            return None;
        }
        col = col.checked_mul(26)?.checked_add(ch.to_ascii_uppercase() as u32 - 64)?;
    }
    let row: u32 = digits.parse().ok()?;
    (row >= 1).then_some((row, col))
}

// ---- shared style table -------------------------------------------------------

#[derive(Debug, Default, Clone)]
struct FontDef {
    size_pt: Option<f64>,
    name: Option<String>,
    color: Option<String>,
}

#[derive(Debug, Default, Clone)]
struct FillDef {
    pattern: String,
    color: Option<String>,
}

/// The workbook-wide style table: fonts, fills, borders, and the cell
/// formats (`xf` records) that tie them together.
#[derive(Debug, Default)]
struct StyleTable {
    fonts: Vec<FontDef>,
    fills: Vec<FillDef>,
    borders: Vec<Vec<String>>,
    formats: Vec<(usize, usize, usize)>,
}

impl StyleTable {
    fn build(pkg: &OpcPackage, main: &str) -> StyleTable {
        let theme = Theme::for_part(pkg, main);
        let mut table = StyleTable::default();
        let Some(part) = pkg.related_part(main, "/styles") else {
            return table;
        };
        let name = part.name.clone();
        let Ok(doc) = parse_xml(&part.data, &name) else {
            log::warn!("unreadable style table {name}; formats ignored");
            return table;
        };
        let root = doc.root_element();

        if let Some(fonts) = root.el("fonts") {
            for font in fonts.els("font") {
                table.fonts.push(FontDef {
                    size_pt: font
                        .el("sz")
                        .and_then(|s| s.attribute("val"))
                        .and_then(|v| v.trim().parse::<f64>().ok())
                        .filter(|v| v.is_finite() && *v > 0.0)
                        .map(|v| convert_length(v, SourceUnit::Point)),
                    name: font
                        .el("name")
                        .and_then(|n| n.attribute("val"))
                        .filter(|v| !v.is_empty())
                        .map(|v| v.to_ascii_lowercase()),
                    color: font.el("color").and_then(|c| style_color(c, &theme)),
                });
            }
        }
        if let Some(fills) = root.el("fills") {
            for fill in fills.els("fill") {
                let pattern_fill = fill.el("patternFill");
                table.fills.push(FillDef {
                    pattern: pattern_fill
                        .and_then(|p| p.attribute("patternType"))
                        .unwrap_or("none")
                        .to_string(),
                    color: pattern_fill
                        .and_then(|p| p.el("fgColor"))
                        .and_then(|c| style_color(c, &theme)),
                });
            }
        }
        if let Some(borders) = root.el("borders") {
            for border in borders.els("border") {
                let mut sides: Vec<String> = ["left", "right", "top", "bottom", "diagonal"]
                    .iter()
                    .filter_map(|side| border.el(side))
                    .filter_map(|n| n.attribute("style"))
                    .map(String::from)
                    .collect();
                if sides.is_empty() {
                    sides.push("none".to_string());
                }
                table.borders.push(sides);
            }
        }
        if let Some(xfs) = root.el("cellXfs") {
            for xf in xfs.els("xf") {
                let id = |attr: &str| {
                    xf.attribute(attr).and_then(|v| v.trim().parse().ok()).unwrap_or(0usize)
                };
                table.formats.push((id("fontId"), id("fillId"), id("borderId")));
            }
        }
        table
    }

    /// Aggregates the formats used on a sheet into one summary object.
    fn summarize(&self, used_formats: &[usize]) -> LayoutObject {
        let mut text = TextProps::default();
        let mut cell = CellStyleProps::default();
        for &fmt in used_formats {
            let (font_id, fill_id, border_id) = self.formats.get(fmt).copied().unwrap_or((0, 0, 0));
            if let Some(font) = self.fonts.get(font_id) {
                if let Some(size) = font.size_pt {
                    text.font_sizes.push(size);
                }
                if let Some(color) = &font.color {
                    text.font_colors.push(color.clone());
                }
                if let Some(name) = &font.name {
                    text.font_names.push(name.clone());
                }
            }
            if let Some(fill) = self.fills.get(fill_id) {
                cell.fill_patterns.push(fill.pattern.clone());
                if let Some(color) = &fill.color {
                    cell.fill_colors.push(color.clone());
                }
            }
            if let Some(border) = self.borders.get(border_id) {
                cell.borders.extend(border.iter().cloned());
            }
        }
        LayoutObject::cell_styles(text, cell)
    }
}

/// Spreadsheet color markup: literal ARGB, or a theme palette index.
/// The palette order swaps the first two light/dark pairs relative to the
/// theme's own slot order. Tinted or legacy-indexed colors stay absent
/// rather than being approximated.
fn style_color(node: Node, theme: &Theme) -> Option<String> {
    if let Some(rgb) = node.attribute("rgb") {
        return normalize_rgb(rgb);
    }
    let tinted = node
        .attribute("tint")
        .and_then(|t| t.trim().parse::<f64>().ok())
        .is_some_and(|t| t != 0.0);
    if tinted {
        return None;
    }
    const PALETTE: [&str; 12] = [
        "lt1", "dk1", "lt2", "dk2", "accent1", "accent2", "accent3", "accent4", "accent5",
        "accent6", "hlink", "folHlink",
    ];
    let idx: usize = node.attribute("theme")?.trim().parse().ok()?;
    theme.color(PALETTE.get(idx)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extractor::testpkg;
    use crate::feature::ObjectKind;

    const MAIN_NS: &str = r#"xmlns="http://schemas.openxmlformats.org/spreadsheetml/2006/main" xmlns:r="http://schemas.openxmlformats.org/officeDocument/2006/relationships""#;
    const XDR_NS: &str = r#"xmlns:xdr="http://schemas.openxmlformats.org/drawingml/2006/spreadsheetDrawing" xmlns:a="http://schemas.openxmlformats.org/drawingml/2006/main" xmlns:r="http://schemas.openxmlformats.org/officeDocument/2006/relationships""#;

    fn workbook(sheet_rids: &[&str]) -> String {
        let sheets: String = sheet_rids
            .iter()
            .enumerate()
            .map(|(i, rid)| format!(r#"<sheet name="S{}" sheetId="{}" r:id="{rid}"/>"#, i + 1, i + 1))
            .collect();
        format!(r#"<?xml version="1.0"?><workbook {MAIN_NS}><sheets>{sheets}</sheets></workbook>"#)
    }

    #[test]
    fn zoom_used_range_and_format_summary() {
        let worksheet = format!(
            r#"<?xml version="1.0"?><worksheet {MAIN_NS}>
                 <sheetViews><sheetView zoomScale="85"/></sheetViews>
                 <sheetData>
                   <row r="1"><c r="A1" s="1"/><c r="C1"/></row>
                   <row r="9"><c r="D9" s="1"/></row>
                 </sheetData>
               </worksheet>"#
        );
        let styles = format!(
            r#"<?xml version="1.0"?><styleSheet {MAIN_NS}>
                 <fonts>
                   <font><sz val="11"/><name val="Calibri"/></font>
                   <font><sz val="14"/><name val="Consolas"/><color rgb="FF336699"/></font>
                 </fonts>
                 <fills>
                   <fill><patternFill patternType="none"/></fill>
                   <fill><patternFill patternType="solid"><fgColor rgb="FFFFF2CC"/></patternFill></fill>
                 </fills>
                 <borders>
                   <border><left/><right/></border>
                   <border><top style="thin"/><bottom style="double"/></border>
                 </borders>
                 <cellXfs>
                   <xf fontId="0" fillId="0" borderId="0"/>
                   <xf fontId="1" fillId="1" borderId="1"/>
                 </cellXfs>
               </styleSheet>"#
        );
        let pkg = testpkg::spreadsheet(
            &[
                ("xl/workbook.xml".to_string(), workbook(&["rId1"])),
                ("xl/worksheets/sheet1.xml".to_string(), worksheet),
                ("xl/styles.xml".to_string(), styles),
            ],
            &[("rId1", "worksheet", "worksheets/sheet1.xml")],
        );
        let pages = extract(&pkg, "book.xlsx").unwrap();
        assert_eq!(pages.len(), 1);
        let g = &pages[0].page_geometry;
        assert_eq!(g.zoom_scale, Some(85));
        assert_eq!((g.used_rows, g.used_cols), (Some(9), Some(4)));
        assert_eq!((g.width, g.height), (None, None));

        // formats 1 and 0 in first-use order
        let summary = &pages[0].objects[0];
        assert_eq!(summary.kind, ObjectKind::CellStyles);
        let t = summary.text_props.as_ref().unwrap();
        assert_eq!(t.font_sizes, vec![14.0, 11.0]);
        assert_eq!(t.font_names, vec!["consolas".to_string(), "calibri".to_string()]);
        assert_eq!(t.font_colors, vec!["336699".to_string()]);
        let c = summary.cell_style_props.as_ref().unwrap();
        assert_eq!(c.fill_patterns, vec!["solid".to_string(), "none".to_string()]);
        assert_eq!(c.fill_colors, vec!["FFF2CC".to_string()]);
        assert_eq!(c.borders, vec!["thin".to_string(), "double".to_string(), "none".to_string()]);
        summary.validate().unwrap();
    }

    #[test]
    fn anchored_images_and_charts() {
        let worksheet = format!(
            r#"<?xml version="1.0"?><worksheet {MAIN_NS}>
                 <sheetData/>
                 <drawing r:id="rIdD"/>
               </worksheet>"#
        );
        let marker = |el: &str, col: u32, row: u32| {
            format!("<xdr:{el}><xdr:col>{col}</xdr:col><xdr:colOff>0</xdr:colOff><xdr:row>{row}</xdr:row><xdr:rowOff>0</xdr:rowOff></xdr:{el}>")
        };
        let drawing = format!(
            r#"<?xml version="1.0"?><xdr:wsDr {XDR_NS}>
                 <xdr:twoCellAnchor>{}{}<xdr:pic/></xdr:twoCellAnchor>
                 <xdr:twoCellAnchor>{}{}
                   <xdr:graphicFrame><a:graphic><a:graphicData uri="http://schemas.openxmlformats.org/drawingml/2006/chart">
                     <c:chart xmlns:c="http://schemas.openxmlformats.org/drawingml/2006/chart" r:id="rIdC"/>
                   </a:graphicData></a:graphic></xdr:graphicFrame>
                 </xdr:twoCellAnchor>
               </xdr:wsDr>"#,
            marker("from", 4, 0),
            marker("to", 9, 4),
            marker("from", 8, 7),
            marker("to", 14, 20),
        );
        let chart = r#"<?xml version="1.0"?><c:chartSpace xmlns:c="http://schemas.openxmlformats.org/drawingml/2006/chart">
             <c:chart><c:plotArea><c:layout/><c:barChart/></c:plotArea></c:chart>
           </c:chartSpace>"#
            .to_string();
        let pkg = testpkg::spreadsheet_with_drawing(
            &[
                ("xl/workbook.xml".to_string(), workbook(&["rId1"])),
                ("xl/worksheets/sheet1.xml".to_string(), worksheet),
                ("xl/drawings/drawing1.xml".to_string(), drawing),
                ("xl/charts/chart1.xml".to_string(), chart),
            ],
            &[("rId1", "worksheet", "worksheets/sheet1.xml")],
        );
        let pages = extract(&pkg, "book.xlsx").unwrap();
        let objs = &pages[0].objects;
        assert_eq!(objs.len(), 2);

        assert_eq!(objs[0].kind, ObjectKind::SheetImage);
        let a = objs[0].cell_anchor.unwrap();
        assert_eq!(a.from.to_string(), "R1C5");
        assert_eq!(a.to.to_string(), "R5C10");

        assert_eq!(objs[1].kind, ObjectKind::Chart);
        let props = objs[1].chart_props.as_ref().unwrap();
        assert_eq!(props.chart_type, "barchart");
        assert_eq!(props.dimensionality, 2);
        let a = objs[1].cell_anchor.unwrap();
        assert_eq!(a.from.to_string(), "R8C9");
        assert_eq!(a.to.to_string(), "R21C15");

        // anchors count toward the used extent
        let g = &pages[0].page_geometry;
        assert_eq!((g.used_rows, g.used_cols), (Some(21), Some(15)));
        objs.iter().for_each(|o| o.validate().unwrap());
    }

    #[test]
    fn empty_sheet_defaults() {
        let worksheet =
            format!(r#"<?xml version="1.0"?><worksheet {MAIN_NS}><sheetData/></worksheet>"#);
        let pkg = testpkg::spreadsheet(
            &[
                ("xl/workbook.xml".to_string(), workbook(&["rId1"])),
                ("xl/worksheets/sheet1.xml".to_string(), worksheet),
            ],
            &[("rId1", "worksheet", "worksheets/sheet1.xml")],
        );
        let pages = extract(&pkg, "book.xlsx").unwrap();
        assert_eq!(pages.len(), 1);
        let g = &pages[0].page_geometry;
        assert_eq!(g.zoom_scale, Some(100));
        assert_eq!((g.used_rows, g.used_cols), (None, None));
        assert!(pages[0].objects.is_empty());
    }

    #[test]
    fn theme_palette_indices_swap_light_and_dark() {
        let xml = format!(r#"<font {MAIN_NS}><color theme="1"/></font>"#);
        let doc = roxmltree::Document::parse(&xml).unwrap();
        let mut theme = Theme::default();
        theme.colors.insert("dk1".to_string(), "111111".to_string());
        theme.colors.insert("lt1".to_string(), "EEEEEE".to_string());
        let color = doc.root_element().el("color").unwrap();
        assert_eq!(style_color(color, &theme), Some("111111".to_string()));

        let tinted = format!(r#"<font {MAIN_NS}><color theme="1" tint="-0.25"/></font>"#);
        let doc = roxmltree::Document::parse(&tinted).unwrap();
        assert_eq!(style_color(doc.root_element().el("color").unwrap(), &theme), None);
    }

    #[test]
    fn a1_reference_arithmetic() {
        assert_eq!(a1_to_rc("A1"), Some((1, 1)));
        assert_eq!(a1_to_rc("D9"), Some((9, 4)));
        assert_eq!(a1_to_rc("AA10"), Some((10, 27)));
        assert_eq!(a1_to_rc("ZZ1"), Some((1, 702)));
        assert_eq!(a1_to_rc("9"), None);
        assert_eq!(a1_to_rc("A"), None);
    }
}
