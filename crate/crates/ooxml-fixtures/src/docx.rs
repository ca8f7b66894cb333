//! Word-processing package builder.
//!
//! Documents are authored section by section in centimeters and points.
//! Each section carries its own page grid; body paragraphs, tables, inline
//! images, footnotes, and header/footer parts attach to the section that
//! declares them, exactly as the section-break markup spells it out.

use std::io;
use std::path::Path;

use crate::Run;
use crate::pkg::{PackageWriter, cm_to_emu, cm_to_twip, pt_to_half_point, xml_escape};
use crate::pptx::{CT_THEME, office_theme};

const NS: &str = r#"xmlns:w="http://schemas.openxmlformats.org/wordprocessingml/2006/main" xmlns:r="http://schemas.openxmlformats.org/officeDocument/2006/relationships" xmlns:wp="http://schemas.openxmlformats.org/drawingml/2006/wordprocessingDrawing" xmlns:a="http://schemas.openxmlformats.org/drawingml/2006/main""#;

const CT_DOCUMENT: &str =
    "application/vnd.openxmlformats-officedocument.wordprocessingml.document.main+xml";
const CT_STYLES: &str =
    "application/vnd.openxmlformats-officedocument.wordprocessingml.styles+xml";
const CT_FOOTNOTES: &str =
    "application/vnd.openxmlformats-officedocument.wordprocessingml.footnotes+xml";
const CT_HEADER: &str =
    "application/vnd.openxmlformats-officedocument.wordprocessingml.header+xml";
const CT_FOOTER: &str =
    "application/vnd.openxmlformats-officedocument.wordprocessingml.footer+xml";

#[derive(Debug, Clone, Default)]
pub struct DocxBuilder {
    sections: Vec<SectionBuilder>,
}

#[derive(Debug, Clone)]
pub struct SectionBuilder {
    page_cm: (f64, f64),
    /// upper, right, lower, left, header, footer, gutter
    margins_cm: [f64; 7],
    columns: (u32, f64),
    blocks: Vec<Block>,
    footnotes: Vec<Vec<Run>>,
    header: Option<Vec<Run>>,
    footer: Option<Vec<Run>>,
}

#[derive(Debug, Clone)]
enum Block {
    Paragraph(Vec<Run>),
    NoteRef(usize),
    Table { rows: u32, cols: u32, runs: Vec<Run> },
    Image { w_cm: f64, h_cm: f64 },
}

impl Default for SectionBuilder {
    fn default() -> Self {
        SectionBuilder {
            page_cm: (21.59, 27.94),
            margins_cm: [2.54, 2.54, 2.54, 2.54, 1.27, 1.27, 0.0],
            columns: (1, 1.27),
            blocks: Vec::new(),
            footnotes: Vec::new(),
            header: None,
            footer: None,
        }
    }
}

impl DocxBuilder {
    pub fn new() -> DocxBuilder {
        DocxBuilder::default()
    }

    pub fn section(mut self, build: impl FnOnce(SectionBuilder) -> SectionBuilder) -> DocxBuilder {
        self.sections.push(build(SectionBuilder::default()));
        self
    }

    pub fn bytes(&self) -> Vec<u8> {
        self.package().bytes()
    }

    pub fn write_to(&self, path: impl AsRef<Path>) -> io::Result<()> {
        self.package().write_to(path.as_ref())
    }

    fn package(&self) -> PackageWriter {
        let sections: &[SectionBuilder] = if self.sections.is_empty() {
            &[SectionBuilder::default()]
        } else {
            &self.sections
        };

        let mut pkg = PackageWriter::new();
        pkg.rel("", "rId1", "officeDocument", "word/document.xml");
        pkg.rel("word/document.xml", "rIdStyles", "styles", "styles.xml");
        pkg.rel("word/document.xml", "rIdTheme", "theme", "theme/theme1.xml");

        // global numbering across sections: footnote ids and part files
        let mut note_id = 1usize;
        let mut notes_xml = String::new();
        let mut header_nr = 0usize;
        let mut footer_nr = 0usize;
        let mut body = String::new();

        for (i, section) in sections.iter().enumerate() {
            let mut refs = String::new();
            if let Some(runs) = &section.header {
                header_nr += 1;
                let part = format!("word/header{header_nr}.xml");
                let rid = format!("rIdH{header_nr}");
                pkg.part(
                    &part,
                    CT_HEADER,
                    format!(
                        r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?><w:hdr {NS}>{}</w:hdr>"#,
                        paragraph(runs)
                    ),
                );
                pkg.rel("word/document.xml", &rid, "header", &format!("header{header_nr}.xml"));
                refs.push_str(&format!(r#"<w:headerReference w:type="default" r:id="{rid}"/>"#));
            }
            if let Some(runs) = &section.footer {
                footer_nr += 1;
                let part = format!("word/footer{footer_nr}.xml");
                let rid = format!("rIdF{footer_nr}");
                pkg.part(
                    &part,
                    CT_FOOTER,
                    format!(
                        r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?><w:ftr {NS}>{}</w:ftr>"#,
                        paragraph(runs)
                    ),
                );
                pkg.rel("word/document.xml", &rid, "footer", &format!("footer{footer_nr}.xml"));
                refs.push_str(&format!(r#"<w:footerReference w:type="default" r:id="{rid}"/>"#));
            }

            // section-local note indices → document-wide ids
            let base_id = note_id;
            for note_runs in &section.footnotes {
                notes_xml.push_str(&format!(
                    r#"<w:footnote w:id="{note_id}">{}</w:footnote>"#,
                    paragraph(note_runs)
                ));
                note_id += 1;
            }

            for block in &section.blocks {
                body.push_str(&block.render(base_id));
            }

            let sect_pr = section.sect_pr(&refs);
            if i + 1 < sections.len() {
                body.push_str(&format!("<w:p><w:pPr>{sect_pr}</w:pPr></w:p>"));
            } else {
                body.push_str(&sect_pr);
            }
        }

        pkg.part(
            "word/document.xml",
            CT_DOCUMENT,
            format!(
                r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?><w:document {NS}><w:body>{body}</w:body></w:document>"#
            ),
        );
        pkg.part("word/styles.xml", CT_STYLES, styles_xml());
        pkg.part("word/theme/theme1.xml", CT_THEME, office_theme());
        if !notes_xml.is_empty() {
            pkg.part(
                "word/footnotes.xml",
                CT_FOOTNOTES,
                format!(
                    r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?><w:footnotes {NS}><w:footnote w:type="separator" w:id="-1"><w:p><w:r><w:separator/></w:r></w:p></w:footnote><w:footnote w:type="continuationSeparator" w:id="0"><w:p><w:r><w:continuationSeparator/></w:r></w:p></w:footnote>{notes_xml}</w:footnotes>"#
                ),
            );
            pkg.rel("word/document.xml", "rIdFn", "footnotes", "footnotes.xml");
        }
        pkg
    }
}

impl SectionBuilder {
    pub fn page_size(mut self, width_cm: f64, height_cm: f64) -> SectionBuilder {
        self.page_cm = (width_cm, height_cm);
        self
    }

    /// Margins in cm: upper, right, lower, left, header, footer, gutter.
    pub fn margins(mut self, margins_cm: [f64; 7]) -> SectionBuilder {
        self.margins_cm = margins_cm;
        self
    }

    pub fn columns(mut self, count: u32, gap_cm: f64) -> SectionBuilder {
        self.columns = (count, gap_cm);
        self
    }

    pub fn paragraph(mut self, runs: &[Run]) -> SectionBuilder {
        self.blocks.push(Block::Paragraph(runs.to_vec()));
        self
    }

    /// Adds a footnote with the given content, referenced from its own
    /// body paragraph.
    pub fn footnote(mut self, runs: &[Run]) -> SectionBuilder {
        self.blocks.push(Block::NoteRef(self.footnotes.len()));
        self.footnotes.push(runs.to_vec());
        self
    }

    pub fn table(mut self, rows: u32, cols: u32, runs: &[Run]) -> SectionBuilder {
        self.blocks.push(Block::Table { rows, cols, runs: runs.to_vec() });
        self
    }

    pub fn image(mut self, w_cm: f64, h_cm: f64) -> SectionBuilder {
        self.blocks.push(Block::Image { w_cm, h_cm });
        self
    }

    pub fn header(mut self, runs: &[Run]) -> SectionBuilder {
        self.header = Some(runs.to_vec());
        self
    }

    pub fn footer(mut self, runs: &[Run]) -> SectionBuilder {
        self.footer = Some(runs.to_vec());
        self
    }

    fn sect_pr(&self, references: &str) -> String {
        let [upper, right, lower, left, header, footer, gutter] = self.margins_cm;
        format!(
            r#"<w:sectPr>{references}<w:pgSz w:w="{w}" w:h="{h}"/><w:pgMar w:top="{top}" w:right="{r}" w:bottom="{bottom}" w:left="{l}" w:header="{hd}" w:footer="{ft}" w:gutter="{gt}"/><w:cols w:num="{cols}" w:space="{space}"/></w:sectPr>"#,
            w = cm_to_twip(self.page_cm.0),
            h = cm_to_twip(self.page_cm.1),
            top = cm_to_twip(upper),
            r = cm_to_twip(right),
            bottom = cm_to_twip(lower),
            l = cm_to_twip(left),
            hd = cm_to_twip(header),
            ft = cm_to_twip(footer),
            gt = cm_to_twip(gutter),
            cols = self.columns.0,
            space = cm_to_twip(self.columns.1),
        )
    }
}

impl Block {
    fn render(&self, note_base_id: usize) -> String {
        match self {
            Block::Paragraph(runs) => paragraph(runs),
            Block::NoteRef(local) => format!(
                r#"<w:p><w:r><w:rPr><w:rStyle w:val="FootnoteReference"/></w:rPr><w:footnoteReference w:id="{}"/></w:r></w:p>"#,
                note_base_id + local
            ),
            Block::Table { rows, cols, runs } => {
                let grid: String =
                    (0..*cols).map(|_| r#"<w:gridCol w="2400"/>"#.to_string()).collect();
                let body: String = (0..*rows)
                    .map(|r| {
                        let cells: String = (0..*cols)
                            .map(|c| {
                                let content = if r == 0 && c == 0 {
                                    paragraph(runs)
                                } else {
                                    "<w:p/>".to_string()
                                };
                                format!("<w:tc><w:tcPr/>{content}</w:tc>")
                            })
                            .collect();
                        format!("<w:tr>{cells}</w:tr>")
                    })
                    .collect();
                format!("<w:tbl><w:tblPr/><w:tblGrid>{grid}</w:tblGrid>{body}</w:tbl>")
            }
            Block::Image { w_cm, h_cm } => format!(
                r#"<w:p><w:r><w:drawing><wp:inline distT="0" distB="0" distL="0" distR="0"><wp:extent cx="{cx}" cy="{cy}"/><wp:docPr id="1" name="Picture 1"/></wp:inline></w:drawing></w:r></w:p>"#,
                cx = cm_to_emu(*w_cm),
                cy = cm_to_emu(*h_cm),
            ),
        }
    }
}

fn run_xml(run: &Run) -> String {
    let mut rpr = String::new();
    if let Some(font) = &run.font {
        let f = xml_escape(font);
        rpr.push_str(&format!(r#"<w:rFonts w:ascii="{f}" w:hAnsi="{f}"/>"#));
    }
    if let Some(color) = &run.color {
        rpr.push_str(&format!(r#"<w:color w:val="{color}"/>"#));
    }
    if let Some(size) = run.size_pt {
        rpr.push_str(&format!(r#"<w:sz w:val="{}"/>"#, pt_to_half_point(size)));
    }
    let rpr_tag = if rpr.is_empty() { String::new() } else { format!("<w:rPr>{rpr}</w:rPr>") };
    format!(
        r#"<w:r>{rpr_tag}<w:t xml:space="preserve">{}</w:t></w:r>"#,
        xml_escape(&run.text)
    )
}

fn paragraph(runs: &[Run]) -> String {
    if runs.is_empty() {
        return "<w:p/>".to_string();
    }
    format!("<w:p>{}</w:p>", runs.iter().map(run_xml).collect::<String>())
}

fn styles_xml() -> String {
    format!(
        r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?><w:styles {NS}><w:docDefaults><w:rPrDefault><w:rPr><w:rFonts w:asciiTheme="minorAscii" w:hAnsiTheme="minorHAnsi"/><w:sz w:val="22"/></w:rPr></w:rPrDefault></w:docDefaults><w:style w:type="character" w:styleId="FootnoteReference"><w:name w:val="footnote reference"/></w:style></w:styles>"#
    )
}
