//! Presentation package builder.
//!
//! Slides are authored in centimeters and points; the builder renders the
//! raw drawing units and the full slide → layout → master → theme part
//! chain, so generated decks exercise the same inheritance walk real decks
//! do. Runs without explicit styling inherit the master's defaults
//! (18 pt Calibri in the theme text color).

use std::io;
use std::path::Path;

use crate::Run;
use crate::pkg::{PackageWriter, cm_to_emu, pt_to_centipoint, xml_escape};

const NS: &str = r#"xmlns:a="http://schemas.openxmlformats.org/drawingml/2006/main" xmlns:r="http://schemas.openxmlformats.org/officeDocument/2006/relationships" xmlns:p="http://schemas.openxmlformats.org/presentationml/2006/main""#;

const CT_PRESENTATION: &str =
    "application/vnd.openxmlformats-officedocument.presentationml.presentation.main+xml";
const CT_SLIDE: &str = "application/vnd.openxmlformats-officedocument.presentationml.slide+xml";
const CT_LAYOUT: &str =
    "application/vnd.openxmlformats-officedocument.presentationml.slideLayout+xml";
const CT_MASTER: &str =
    "application/vnd.openxmlformats-officedocument.presentationml.slideMaster+xml";
pub(crate) const CT_THEME: &str = "application/vnd.openxmlformats-officedocument.theme+xml";

#[derive(Debug, Clone)]
pub struct PptxBuilder {
    width_cm: f64,
    height_cm: f64,
    slides: Vec<SlideBuilder>,
}

#[derive(Debug, Clone, Default)]
pub struct SlideBuilder {
    shapes: Vec<String>,
    next_id: u32,
}

impl PptxBuilder {
    pub fn new(width_cm: f64, height_cm: f64) -> PptxBuilder {
        PptxBuilder { width_cm, height_cm, slides: Vec::new() }
    }

    pub fn slide(mut self, build: impl FnOnce(SlideBuilder) -> SlideBuilder) -> PptxBuilder {
        self.slides.push(build(SlideBuilder::default()));
        self
    }

    pub fn blank_slide(self) -> PptxBuilder {
        self.slide(|s| s)
    }

    pub fn bytes(&self) -> Vec<u8> {
        self.package().bytes()
    }

    pub fn write_to(&self, path: impl AsRef<Path>) -> io::Result<()> {
        self.package().write_to(path.as_ref())
    }

    fn package(&self) -> PackageWriter {
        let mut pkg = PackageWriter::new();
        pkg.rel("", "rId1", "officeDocument", "ppt/presentation.xml");

        let slide_ids: String = (0..self.slides.len())
            .map(|i| format!(r#"<p:sldId id="{}" r:id="rIdS{}"/>"#, 256 + i, i + 1))
            .collect();
        pkg.part(
            "ppt/presentation.xml",
            CT_PRESENTATION,
            format!(
                r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?><p:presentation {NS}><p:sldMasterIdLst><p:sldMasterId id="2147483648" r:id="rIdM"/></p:sldMasterIdLst><p:sldIdLst>{slide_ids}</p:sldIdLst><p:sldSz cx="{cx}" cy="{cy}"/></p:presentation>"#,
                cx = cm_to_emu(self.width_cm),
                cy = cm_to_emu(self.height_cm),
            ),
        );
        pkg.rel(
            "ppt/presentation.xml",
            "rIdM",
            "slideMaster",
            "slideMasters/slideMaster1.xml",
        );
        for (i, slide) in self.slides.iter().enumerate() {
            let name = format!("ppt/slides/slide{}.xml", i + 1);
            pkg.part(&name, CT_SLIDE, slide.render());
            pkg.rel(
                "ppt/presentation.xml",
                &format!("rIdS{}", i + 1),
                "slide",
                &format!("slides/slide{}.xml", i + 1),
            );
            pkg.rel(&name, "rIdL", "slideLayout", "../slideLayouts/slideLayout1.xml");
        }

        pkg.part("ppt/slideLayouts/slideLayout1.xml", CT_LAYOUT, layout_xml());
        pkg.rel(
            "ppt/slideLayouts/slideLayout1.xml",
            "rIdM",
            "slideMaster",
            "../slideMasters/slideMaster1.xml",
        );
        pkg.part("ppt/slideMasters/slideMaster1.xml", CT_MASTER, master_xml());
        pkg.rel("ppt/slideMasters/slideMaster1.xml", "rIdT", "theme", "../theme/theme1.xml");
        pkg.part("ppt/theme/theme1.xml", CT_THEME, office_theme());
        pkg
    }
}

impl SlideBuilder {
    fn id(&mut self) -> u32 {
        self.next_id += 2;
        self.next_id
    }

    pub fn textbox(mut self, x: f64, y: f64, w: f64, h: f64, runs: &[Run]) -> SlideBuilder {
        let id = self.id();
        self.shapes.push(format!(
            r#"<p:sp><p:nvSpPr><p:cNvPr id="{id}" name="TextBox {id}"/><p:cNvSpPr txBox="1"/><p:nvPr/></p:nvSpPr><p:spPr>{xfrm}<a:prstGeom prst="rect"><a:avLst/></a:prstGeom></p:spPr>{body}</p:sp>"#,
            xfrm = xfrm(x, y, w, h),
            body = tx_body(runs),
        ));
        self
    }

    pub fn image(mut self, x: f64, y: f64, w: f64, h: f64) -> SlideBuilder {
        let id = self.id();
        self.shapes.push(format!(
            r#"<p:pic><p:nvPicPr><p:cNvPr id="{id}" name="Picture {id}"/><p:cNvPicPr/><p:nvPr/></p:nvPicPr><p:blipFill><a:stretch><a:fillRect/></a:stretch></p:blipFill><p:spPr>{xfrm}<a:prstGeom prst="rect"><a:avLst/></a:prstGeom></p:spPr></p:pic>"#,
            xfrm = xfrm(x, y, w, h),
        ));
        self
    }

    pub fn shape(
        mut self,
        x: f64,
        y: f64,
        w: f64,
        h: f64,
        preset: &str,
        runs: &[Run],
    ) -> SlideBuilder {
        let id = self.id();
        self.shapes.push(format!(
            r#"<p:sp><p:nvSpPr><p:cNvPr id="{id}" name="Shape {id}"/><p:cNvSpPr/><p:nvPr/></p:nvSpPr><p:spPr>{xfrm}<a:prstGeom prst="{preset}"><a:avLst/></a:prstGeom></p:spPr>{body}</p:sp>"#,
            xfrm = xfrm(x, y, w, h),
            body = tx_body(runs),
        ));
        self
    }

    /// A `rows`×`cols` table; the given runs land in the first cell.
    pub fn table(
        mut self,
        x: f64,
        y: f64,
        w: f64,
        h: f64,
        rows: u32,
        cols: u32,
        runs: &[Run],
    ) -> SlideBuilder {
        let id = self.id();
        let col_w = cm_to_emu(w) / i64::from(cols.max(1));
        let row_h = cm_to_emu(h) / i64::from(rows.max(1));
        let grid: String = (0..cols).map(|_| format!(r#"<a:gridCol w="{col_w}"/>"#)).collect();
        let body: String = (0..rows)
            .map(|r| {
                let cells: String = (0..cols)
                    .map(|c| {
                        let tx = if r == 0 && c == 0 {
                            tx_body_inner(runs)
                        } else {
                            "<a:p/>".to_string()
                        };
                        format!(r#"<a:tc><a:txBody><a:bodyPr/>{tx}</a:txBody></a:tc>"#)
                    })
                    .collect();
                format!(r#"<a:tr h="{row_h}">{cells}</a:tr>"#)
            })
            .collect();
        self.shapes.push(format!(
            r#"<p:graphicFrame><p:nvGraphicFramePr><p:cNvPr id="{id}" name="Table {id}"/><p:cNvGraphicFramePr/><p:nvPr/></p:nvGraphicFramePr><p:xfrm><a:off x="{ox}" y="{oy}"/><a:ext cx="{cx}" cy="{cy}"/></p:xfrm><a:graphic><a:graphicData uri="http://schemas.openxmlformats.org/drawingml/2006/table"><a:tbl><a:tblPr/><a:tblGrid>{grid}</a:tblGrid>{body}</a:tbl></a:graphicData></a:graphic></p:graphicFrame>"#,
            ox = cm_to_emu(x),
            oy = cm_to_emu(y),
            cx = cm_to_emu(w),
            cy = cm_to_emu(h),
        ));
        self
    }

    fn render(&self) -> String {
        format!(
            r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?><p:sld {NS}><p:cSld><p:spTree><p:nvGrpSpPr><p:cNvPr id="1" name=""/><p:cNvGrpSpPr/><p:nvPr/></p:nvGrpSpPr><p:grpSpPr><a:xfrm><a:off x="0" y="0"/><a:ext cx="0" cy="0"/><a:chOff x="0" y="0"/><a:chExt cx="0" cy="0"/></a:xfrm></p:grpSpPr>{}</p:spTree></p:cSld><p:clrMapOvr><a:masterClrMapping/></p:clrMapOvr></p:sld>"#,
            self.shapes.concat()
        )
    }
}

fn xfrm(x: f64, y: f64, w: f64, h: f64) -> String {
    format!(
        r#"<a:xfrm><a:off x="{}" y="{}"/><a:ext cx="{}" cy="{}"/></a:xfrm>"#,
        cm_to_emu(x),
        cm_to_emu(y),
        cm_to_emu(w),
        cm_to_emu(h)
    )
}

fn run_xml(run: &Run) -> String {
    let mut rpr = String::new();
    if let Some(size) = run.size_pt {
        rpr.push_str(&format!(r#" sz="{}""#, pt_to_centipoint(size)));
    }
    let mut rpr_children = String::new();
    if let Some(color) = &run.color {
        rpr_children.push_str(&format!(
            r#"<a:solidFill><a:srgbClr val="{color}"/></a:solidFill>"#
        ));
    }
    if let Some(font) = &run.font {
        rpr_children.push_str(&format!(r#"<a:latin typeface="{}"/>"#, xml_escape(font)));
    }
    let rpr_tag = if rpr.is_empty() && rpr_children.is_empty() {
        String::new()
    } else {
        format!(r#"<a:rPr lang="en-US"{rpr}>{rpr_children}</a:rPr>"#)
    };
    format!("<a:r>{rpr_tag}<a:t>{}</a:t></a:r>", xml_escape(&run.text))
}

fn tx_body_inner(runs: &[Run]) -> String {
    if runs.is_empty() {
        return "<a:p/>".to_string();
    }
    format!("<a:p>{}</a:p>", runs.iter().map(run_xml).collect::<String>())
}

fn tx_body(runs: &[Run]) -> String {
    format!("<p:txBody><a:bodyPr/>{}</p:txBody>", tx_body_inner(runs))
}

fn layout_xml() -> String {
    format!(
        r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?><p:sldLayout {NS} type="blank"><p:cSld name="Blank"><p:spTree><p:nvGrpSpPr><p:cNvPr id="1" name=""/><p:cNvGrpSpPr/><p:nvPr/></p:nvGrpSpPr><p:grpSpPr/></p:spTree></p:cSld></p:sldLayout>"#
    )
}

fn master_xml() -> String {
    let level = |sz: i64, face: &str| {
        format!(
            r#"<a:lvl1pPr><a:defRPr sz="{sz}"><a:solidFill><a:schemeClr val="tx1"/></a:solidFill><a:latin typeface="{face}"/></a:defRPr></a:lvl1pPr>"#
        )
    };
    format!(
        r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?><p:sldMaster {NS}><p:cSld><p:spTree><p:nvGrpSpPr><p:cNvPr id="1" name=""/><p:cNvGrpSpPr/><p:nvPr/></p:nvGrpSpPr><p:grpSpPr/></p:spTree></p:cSld><p:clrMap bg1="lt1" tx1="dk1" bg2="lt2" tx2="dk2" accent1="accent1" accent2="accent2" accent3="accent3" accent4="accent4" accent5="accent5" accent6="accent6" hlink="hlink" folHlink="folHlink"/><p:sldLayoutIdLst/><p:txStyles><p:titleStyle>{title}</p:titleStyle><p:bodyStyle>{body}</p:bodyStyle><p:otherStyle>{other}</p:otherStyle></p:txStyles></p:sldMaster>"#,
        title = level(4400, "+mj-lt"),
        body = level(1800, "+mn-lt"),
        other = level(1800, "+mn-lt"),
    )
}

/// The stock office theme palette and font pairing.
pub(crate) fn office_theme() -> String {
    r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?><a:theme xmlns:a="http://schemas.openxmlformats.org/drawingml/2006/main" name="Office"><a:themeElements><a:clrScheme name="Office"><a:dk1><a:sysClr val="windowText" lastClr="000000"/></a:dk1><a:lt1><a:sysClr val="window" lastClr="FFFFFF"/></a:lt1><a:dk2><a:srgbClr val="44546A"/></a:dk2><a:lt2><a:srgbClr val="E7E6E6"/></a:lt2><a:accent1><a:srgbClr val="4472C4"/></a:accent1><a:accent2><a:srgbClr val="ED7D31"/></a:accent2><a:accent3><a:srgbClr val="A5A5A5"/></a:accent3><a:accent4><a:srgbClr val="FFC000"/></a:accent4><a:accent5><a:srgbClr val="5B9BD5"/></a:accent5><a:accent6><a:srgbClr val="70AD47"/></a:accent6><a:hlink><a:srgbClr val="0563C1"/></a:hlink><a:folHlink><a:srgbClr val="954F72"/></a:folHlink></a:clrScheme><a:fontScheme name="Office"><a:majorFont><a:latin typeface="Calibri Light"/><a:ea typeface=""/><a:cs typeface=""/></a:majorFont><a:minorFont><a:latin typeface="Calibri"/><a:ea typeface=""/><a:cs typeface=""/></a:minorFont></a:fontScheme><a:fmtScheme name="Office"><a:fillStyleLst><a:solidFill><a:schemeClr val="phClr"/></a:solidFill><a:solidFill><a:schemeClr val="phClr"/></a:solidFill><a:solidFill><a:schemeClr val="phClr"/></a:solidFill></a:fillStyleLst><a:lnStyleLst><a:ln><a:solidFill><a:schemeClr val="phClr"/></a:solidFill></a:ln><a:ln><a:solidFill><a:schemeClr val="phClr"/></a:solidFill></a:ln><a:ln><a:solidFill><a:schemeClr val="phClr"/></a:solidFill></a:ln></a:lnStyleLst><a:effectStyleLst><a:effectStyle><a:effectLst/></a:effectStyle><a:effectStyle><a:effectLst/></a:effectStyle><a:effectStyle><a:effectLst/></a:effectStyle></a:effectStyleLst><a:bgFillStyleLst><a:solidFill><a:schemeClr val="phClr"/></a:solidFill><a:solidFill><a:schemeClr val="phClr"/></a:solidFill><a:solidFill><a:schemeClr val="phClr"/></a:solidFill></a:bgFillStyleLst></a:fmtScheme></a:themeElements></a:theme>"#.to_string()
}
