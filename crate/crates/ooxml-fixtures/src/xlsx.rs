//! Spreadsheet package builder.
//!
//! Workbooks are authored as a shared style table plus one or more sheets.
//! Styles registered up front hand back the format index that cells then
//! reference, mirroring how the real styles part indirects through `cellXfs`.
//! Anchored images and charts take 1-based row/column corners.

use std::io;
use std::path::Path;

use crate::pkg::{PackageWriter, xml_escape};
use crate::pptx::{CT_THEME, office_theme};

const MAIN_NS: &str =
    r#"xmlns="http://schemas.openxmlformats.org/spreadsheetml/2006/main" xmlns:r="http://schemas.openxmlformats.org/officeDocument/2006/relationships""#;
const XDR_NS: &str = r#"xmlns:xdr="http://schemas.openxmlformats.org/drawingml/2006/spreadsheetDrawing" xmlns:a="http://schemas.openxmlformats.org/drawingml/2006/main" xmlns:r="http://schemas.openxmlformats.org/officeDocument/2006/relationships""#;
const CHART_NS: &str = r#"xmlns:c="http://schemas.openxmlformats.org/drawingml/2006/chart" xmlns:a="http://schemas.openxmlformats.org/drawingml/2006/main" xmlns:r="http://schemas.openxmlformats.org/officeDocument/2006/relationships""#;

const CT_WORKBOOK: &str =
    "application/vnd.openxmlformats-officedocument.spreadsheetml.sheet.main+xml";
const CT_WORKSHEET: &str =
    "application/vnd.openxmlformats-officedocument.spreadsheetml.worksheet+xml";
const CT_STYLES: &str =
    "application/vnd.openxmlformats-officedocument.spreadsheetml.styles+xml";
const CT_DRAWING: &str = "application/vnd.openxmlformats-officedocument.drawing+xml";
const CT_CHART: &str = "application/vnd.openxmlformats-officedocument.drawingml.chart+xml";

/// One registered cell format: font, fill, and border choices that a cell
/// can point at by index.
#[derive(Debug, Clone, Default)]
pub struct CellStyle {
    font_size_pt: Option<f64>,
    font_name: Option<String>,
    font_color: Option<String>,
    fill_pattern: Option<String>,
    fill_color: Option<String>,
    borders: Vec<(String, String)>,
}

impl CellStyle {
    pub fn new() -> CellStyle {
        CellStyle::default()
    }

    pub fn font(mut self, size_pt: f64, name: &str) -> CellStyle {
        self.font_size_pt = Some(size_pt);
        self.font_name = Some(name.to_string());
        self
    }

    /// Font color as RRGGBB hex.
    pub fn font_color(mut self, rgb: &str) -> CellStyle {
        self.font_color = Some(rgb.to_string());
        self
    }

    pub fn fill(mut self, pattern: &str, fg_rgb: Option<&str>) -> CellStyle {
        self.fill_pattern = Some(pattern.to_string());
        self.fill_color = fg_rgb.map(str::to_string);
        self
    }

    /// Border side ("left", "right", "top", "bottom", "diagonal") with a
    /// line style such as "thin" or "double".
    pub fn border(mut self, side: &str, style: &str) -> CellStyle {
        self.borders.push((side.to_string(), style.to_string()));
        self
    }
}

#[derive(Debug, Clone, Default)]
pub struct XlsxBuilder {
    styles: Vec<CellStyle>,
    sheets: Vec<SheetBuilder>,
}

#[derive(Debug, Clone, Default)]
pub struct SheetBuilder {
    zoom: Option<u32>,
    /// (row, col, format index) — 1-based coordinates.
    cells: Vec<(u32, u32, usize)>,
    anchors: Vec<Anchor>,
}

#[derive(Debug, Clone)]
enum Anchor {
    Image { from: (u32, u32), to: (u32, u32) },
    Chart { plot: String, from: (u32, u32), to: (u32, u32) },
}

impl XlsxBuilder {
    pub fn new() -> XlsxBuilder {
        XlsxBuilder::default()
    }

    /// Registers a cell format and returns the index cells use to reference
    /// it. Index 0 is the built-in default (11 pt Calibri, no fill).
    pub fn add_style(&mut self, style: CellStyle) -> usize {
        self.styles.push(style);
        self.styles.len()
    }

    pub fn sheet(&mut self, build: impl FnOnce(SheetBuilder) -> SheetBuilder) -> &mut XlsxBuilder {
        self.sheets.push(build(SheetBuilder::default()));
        self
    }

    pub fn bytes(&self) -> Vec<u8> {
        self.package().bytes()
    }

    pub fn write_to(&self, path: impl AsRef<Path>) -> io::Result<()> {
        self.package().write_to(path.as_ref())
    }

    fn package(&self) -> PackageWriter {
        let sheets: &[SheetBuilder] =
            if self.sheets.is_empty() { &[SheetBuilder::default()] } else { &self.sheets };

        let mut pkg = PackageWriter::new();
        pkg.rel("", "rId1", "officeDocument", "xl/workbook.xml");
        pkg.rel("xl/workbook.xml", "rIdStyles", "styles", "styles.xml");
        pkg.rel("xl/workbook.xml", "rIdTheme", "theme", "theme/theme1.xml");
        pkg.part("xl/styles.xml", CT_STYLES, self.styles_xml());
        pkg.part("xl/theme/theme1.xml", CT_THEME, office_theme());

        let mut sheet_list = String::new();
        let mut drawing_nr = 0usize;
        let mut chart_nr = 0usize;
        for (i, sheet) in sheets.iter().enumerate() {
            let nr = i + 1;
            let sheet_part = format!("xl/worksheets/sheet{nr}.xml");
            let rid = format!("rIdS{nr}");
            sheet_list.push_str(&format!(
                r#"<sheet name="Sheet{nr}" sheetId="{nr}" r:id="{rid}"/>"#
            ));
            pkg.rel("xl/workbook.xml", &rid, "worksheet", &format!("worksheets/sheet{nr}.xml"));

            let mut drawing_ref = String::new();
            if !sheet.anchors.is_empty() {
                drawing_nr += 1;
                let drawing_part = format!("xl/drawings/drawing{drawing_nr}.xml");
                let mut anchors_xml = String::new();
                for (k, anchor) in sheet.anchors.iter().enumerate() {
                    match anchor {
                        Anchor::Image { from, to } => {
                            anchors_xml.push_str(&image_anchor(k, *from, *to));
                        }
                        Anchor::Chart { plot, from, to } => {
                            chart_nr += 1;
                            let chart_rid = format!("rIdC{k}");
                            pkg.part(
                                &format!("xl/charts/chart{chart_nr}.xml"),
                                CT_CHART,
                                chart_xml(plot),
                            );
                            pkg.rel(
                                &drawing_part,
                                &chart_rid,
                                "chart",
                                &format!("../charts/chart{chart_nr}.xml"),
                            );
                            anchors_xml.push_str(&chart_anchor(k, &chart_rid, *from, *to));
                        }
                    }
                }
                pkg.part(
                    &drawing_part,
                    CT_DRAWING,
                    format!(r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?><xdr:wsDr {XDR_NS}>{anchors_xml}</xdr:wsDr>"#),
                );
                pkg.rel(&sheet_part, "rIdD", "drawing", &format!("../drawings/drawing{drawing_nr}.xml"));
                drawing_ref = r#"<drawing r:id="rIdD"/>"#.to_string();
            }

            pkg.part(&sheet_part, CT_WORKSHEET, sheet.xml(&drawing_ref));
        }

        pkg.part(
            "xl/workbook.xml",
            CT_WORKBOOK,
            format!(
                r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?><workbook {MAIN_NS}><sheets>{sheet_list}</sheets></workbook>"#
            ),
        );
        pkg
    }

    fn styles_xml(&self) -> String {
        let mut fonts = String::from(r#"<font><sz val="11"/><name val="Calibri"/></font>"#);
        let mut fills = String::from(
            r#"<fill><patternFill patternType="none"/></fill><fill><patternFill patternType="gray125"/></fill>"#,
        );
        let mut borders =
            String::from("<border><left/><right/><top/><bottom/><diagonal/></border>");
        let mut xfs =
            String::from(r#"<xf numFmtId="0" fontId="0" fillId="0" borderId="0" xfId="0"/>"#);

        for (i, style) in self.styles.iter().enumerate() {
            let mut font = String::new();
            if let Some(sz) = style.font_size_pt {
                font.push_str(&format!(r#"<sz val="{}"/>"#, format_num(sz)));
            }
            if let Some(rgb) = &style.font_color {
                font.push_str(&format!(r#"<color rgb="FF{rgb}"/>"#));
            }
            if let Some(name) = &style.font_name {
                font.push_str(&format!(r#"<name val="{}"/>"#, xml_escape(name)));
            }
            fonts.push_str(&format!("<font>{font}</font>"));

            let pattern = style.fill_pattern.as_deref().unwrap_or("none");
            let fg = style
                .fill_color
                .as_ref()
                .map(|rgb| format!(r#"<fgColor rgb="FF{rgb}"/>"#))
                .unwrap_or_default();
            fills.push_str(&format!(
                r#"<fill><patternFill patternType="{pattern}">{fg}</patternFill></fill>"#
            ));

            let side = |name: &str| {
                style
                    .borders
                    .iter()
                    .find(|(s, _)| s == name)
                    .map(|(_, line)| format!(r#"<{name} style="{line}"/>"#))
                    .unwrap_or_else(|| format!("<{name}/>"))
            };
            borders.push_str(&format!(
                "<border>{}{}{}{}{}</border>",
                side("left"),
                side("right"),
                side("top"),
                side("bottom"),
                side("diagonal")
            ));

            xfs.push_str(&format!(
                r#"<xf numFmtId="0" fontId="{f}" fillId="{fl}" borderId="{b}" xfId="0" applyFont="1" applyFill="1" applyBorder="1"/>"#,
                f = i + 1,
                fl = i + 2,
                b = i + 1,
            ));
        }

        let n = self.styles.len();
        format!(
            r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?><styleSheet {MAIN_NS}><fonts count="{nf}">{fonts}</fonts><fills count="{nfl}">{fills}</fills><borders count="{nb}">{borders}</borders><cellXfs count="{nx}">{xfs}</cellXfs></styleSheet>"#,
            nf = n + 1,
            nfl = n + 2,
            nb = n + 1,
            nx = n + 1,
        )
    }
}

impl SheetBuilder {
    pub fn zoom(mut self, scale: u32) -> SheetBuilder {
        self.zoom = Some(scale);
        self
    }

    /// Places a (possibly styled) cell at the 1-based row/column. `format`
    /// is an index from [`XlsxBuilder::add_style`], or 0 for the default.
    pub fn cell(mut self, row: u32, col: u32, format: usize) -> SheetBuilder {
        self.cells.push((row, col, format));
        self
    }

    /// Anchors a picture across the 1-based cell corners `from`..`to`
    /// (row, column).
    pub fn image(mut self, from: (u32, u32), to: (u32, u32)) -> SheetBuilder {
        self.anchors.push(Anchor::Image { from, to });
        self
    }

    /// Anchors a chart of the given plot kind (e.g. "barChart",
    /// "bar3DChart", "pieChart") across the 1-based cell corners.
    pub fn chart(mut self, plot: &str, from: (u32, u32), to: (u32, u32)) -> SheetBuilder {
        self.anchors.push(Anchor::Chart { plot: plot.to_string(), from, to });
        self
    }

    fn xml(&self, drawing_ref: &str) -> String {
        let zoom = self
            .zoom
            .map(|z| format!(r#" zoomScale="{z}""#))
            .unwrap_or_default();

        // group cells into rows, ascending, as a real writer would
        let mut by_row: Vec<(u32, Vec<(u32, usize)>)> = Vec::new();
        let mut sorted = self.cells.clone();
        sorted.sort_by_key(|&(r, c, _)| (r, c));
        for (r, c, s) in sorted {
            match by_row.last_mut() {
                Some((row, cells)) if *row == r => cells.push((c, s)),
                _ => by_row.push((r, vec![(c, s)])),
            }
        }
        let rows: String = by_row
            .iter()
            .map(|(r, cells)| {
                let cs: String = cells
                    .iter()
                    .map(|&(c, s)| {
                        let style =
                            if s > 0 { format!(r#" s="{s}""#) } else { String::new() };
                        format!(r#"<c r="{}"{style}/>"#, a1(*r, c))
                    })
                    .collect();
                format!(r#"<row r="{r}">{cs}</row>"#)
            })
            .collect();

        format!(
            r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?><worksheet {MAIN_NS}><sheetViews><sheetView workbookViewId="0"{zoom}/></sheetViews><sheetData>{rows}</sheetData>{drawing_ref}</worksheet>"#
        )
    }
}

/// A1-style reference for a 1-based (row, column) pair.
fn a1(row: u32, col: u32) -> String {
    let mut letters = Vec::new();
    let mut c = col;
    while c > 0 {
        let rem = (c - 1) % 26;
        letters.push(b'A' + rem as u8);
        c = (c - 1) / 26;
    }
    letters.reverse();
    format!("{}{row}", String::from_utf8(letters).unwrap())
}

fn format_num(x: f64) -> String {
    if x.fract() == 0.0 { format!("{x:.0}") } else { format!("{x}") }
}

/// Marker XML with the 0-based col/row encoding anchors actually use.
fn marker(tag: &str, cell: (u32, u32)) -> String {
    let (row, col) = cell;
    format!(
        "<xdr:{tag}><xdr:col>{}</xdr:col><xdr:colOff>0</xdr:colOff><xdr:row>{}</xdr:row><xdr:rowOff>0</xdr:rowOff></xdr:{tag}>",
        col.saturating_sub(1),
        row.saturating_sub(1),
    )
}

fn image_anchor(id: usize, from: (u32, u32), to: (u32, u32)) -> String {
    format!(
        r#"<xdr:twoCellAnchor editAs="oneCell">{}{}<xdr:pic><xdr:nvPicPr><xdr:cNvPr id="{id}" name="Picture {id}"/><xdr:cNvPicPr/></xdr:nvPicPr><xdr:blipFill><a:blip/><a:stretch><a:fillRect/></a:stretch></xdr:blipFill><xdr:spPr><a:prstGeom prst="rect"><a:avLst/></a:prstGeom></xdr:spPr></xdr:pic><xdr:clientData/></xdr:twoCellAnchor>"#,
        marker("from", from),
        marker("to", to),
    )
}

fn chart_anchor(id: usize, chart_rid: &str, from: (u32, u32), to: (u32, u32)) -> String {
    format!(
        r#"<xdr:twoCellAnchor>{}{}<xdr:graphicFrame macro=""><xdr:nvGraphicFramePr><xdr:cNvPr id="{id}" name="Chart {id}"/><xdr:cNvGraphicFramePr/></xdr:nvGraphicFramePr><xdr:xfrm><a:off x="0" y="0"/><a:ext cx="0" cy="0"/></xdr:xfrm><a:graphic><a:graphicData uri="http://schemas.openxmlformats.org/drawingml/2006/chart"><c:chart xmlns:c="http://schemas.openxmlformats.org/drawingml/2006/chart" r:id="{chart_rid}"/></a:graphicData></a:graphic></xdr:graphicFrame><xdr:clientData/></xdr:twoCellAnchor>"#,
        marker("from", from),
        marker("to", to),
    )
}

fn chart_xml(plot: &str) -> String {
    format!(
        r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?><c:chartSpace {CHART_NS}><c:chart><c:plotArea><c:layout/><c:{plot}><c:barDir val="col"/></c:{plot}></c:plotArea></c:chart></c:chartSpace>"#
    )
}
