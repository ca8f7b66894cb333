//! Builders for small, valid office documents, used as test fixtures.
//!
//! Each builder authors in natural units — centimeters for lengths, points
//! for font sizes — and renders a complete package: content types,
//! relationships, theme, and the family-specific part chain. The output is
//! deterministic byte-for-byte, so fixtures can be regenerated or diffed.
//!
//! - [`PptxBuilder`]: slides with textboxes, images, preset shapes, tables.
//! - [`DocxBuilder`]: sections with paragraphs, tables, inline images,
//!   footnotes, headers, footers.
//! - [`XlsxBuilder`]: sheets with styled cells, anchored pictures, charts.
//! - [`corpus`]: seeded random corpora for retrieval experiments.

mod pkg;

pub mod corpus;
pub mod docx;
pub mod pptx;
pub mod xlsx;

pub use docx::DocxBuilder;
pub use pptx::PptxBuilder;
pub use xlsx::{CellStyle, XlsxBuilder};

/// One text run with optional explicit formatting. Attributes left as
/// `None` are not written, so the document's own inheritance (master text
/// styles, style chains, document defaults) decides them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Run {
    pub text: String,
    pub size_pt: Option<f64>,
    /// RRGGBB hex, no leading `#`.
    pub color: Option<String>,
    pub font: Option<String>,
}

impl Run {
    pub fn plain(text: &str) -> Run {
        Run { text: text.to_string(), ..Run::default() }
    }

    pub fn sized(text: &str, size_pt: f64) -> Run {
        Run { size_pt: Some(size_pt), ..Run::plain(text) }
    }

    pub fn styled(text: &str, size_pt: f64, color: &str, font: &str) -> Run {
        Run {
            size_pt: Some(size_pt),
            color: Some(color.to_string()),
            font: Some(font.to_string()),
            ..Run::plain(text)
        }
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;
    use std::io::Cursor;

    use super::*;

    fn part_names(bytes: &[u8]) -> BTreeSet<String> {
        let mut zip = zip::ZipArchive::new(Cursor::new(bytes)).expect("readable archive");
        (0..zip.len()).map(|i| zip.by_index(i).unwrap().name().to_string()).collect()
    }

    #[test]
    fn presentation_packages_carry_the_full_part_chain() {
        let bytes = PptxBuilder::new(25.4, 19.05)
            .slide(|s| s.textbox(1.0, 1.0, 10.0, 3.0, &[Run::plain("hello")]))
            .blank_slide()
            .bytes();
        let names = part_names(&bytes);
        for expected in [
            "[Content_Types].xml",
            "_rels/.rels",
            "ppt/presentation.xml",
            "ppt/_rels/presentation.xml.rels",
            "ppt/slides/slide1.xml",
            "ppt/slides/slide2.xml",
            "ppt/slides/_rels/slide1.xml.rels",
            "ppt/slideLayouts/slideLayout1.xml",
            "ppt/slideMasters/slideMaster1.xml",
            "ppt/theme/theme1.xml",
        ] {
            assert!(names.contains(expected), "missing {expected} in {names:?}");
        }
    }

    #[test]
    fn wordprocessing_packages_add_parts_on_demand() {
        let plain = DocxBuilder::new().section(|s| s.paragraph(&[Run::plain("x")])).bytes();
        let plain_names = part_names(&plain);
        assert!(plain_names.contains("word/document.xml"));
        assert!(!plain_names.contains("word/footnotes.xml"));
        assert!(!plain_names.contains("word/header1.xml"));

        let rich = DocxBuilder::new()
            .section(|s| {
                s.paragraph(&[Run::styled("body", 12.0, "1F4E79", "Georgia")])
                    .footnote(&[Run::plain("note")])
                    .header(&[Run::plain("running head")])
                    .footer(&[Run::plain("page")])
            })
            .bytes();
        let rich_names = part_names(&rich);
        for expected in
            ["word/footnotes.xml", "word/header1.xml", "word/footer1.xml", "word/styles.xml"]
        {
            assert!(rich_names.contains(expected), "missing {expected}");
        }
    }

    #[test]
    fn workbook_packages_wire_drawings_and_charts() {
        let mut book = XlsxBuilder::new();
        let gold = book.add_style(CellStyle::new().font(14.0, "Consolas").fill("solid", Some("FFF2CC")));
        assert_eq!(gold, 1);
        book.sheet(|s| {
            s.zoom(85)
                .cell(1, 1, gold)
                .image((1, 5), (5, 10))
                .chart("bar3DChart", (8, 9), (21, 15))
        });
        let names = part_names(&book.bytes());
        for expected in [
            "xl/workbook.xml",
            "xl/worksheets/sheet1.xml",
            "xl/worksheets/_rels/sheet1.xml.rels",
            "xl/drawings/drawing1.xml",
            "xl/drawings/_rels/drawing1.xml.rels",
            "xl/charts/chart1.xml",
            "xl/styles.xml",
        ] {
            assert!(names.contains(expected), "missing {expected} in {names:?}");
        }
    }

    #[test]
    fn same_seed_reproduces_the_same_corpus() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let names_a = corpus::mixed_corpus(a.path(), 7, 9).unwrap();
        let names_b = corpus::mixed_corpus(b.path(), 7, 9).unwrap();
        assert_eq!(names_a, names_b);
        assert_eq!(names_a.len(), 9);
        for name in &names_a {
            let left = std::fs::read(a.path().join(name)).unwrap();
            let right = std::fs::read(b.path().join(name)).unwrap();
            assert_eq!(left, right, "{name} differs between identically seeded runs");
        }
    }

    #[test]
    fn planted_families_stay_within_the_requested_size() {
        let dir = tempfile::tempdir().unwrap();
        let corpus = corpus::planted_presentations(dir.path(), 11, 60).unwrap();
        assert_eq!(corpus.families.len(), 3);
        let planted: usize = corpus.families.iter().map(|f| f.docs.len()).sum();
        for family in &corpus.families {
            assert!((4..=12).contains(&family.docs.len()), "family {}", family.label);
        }
        assert_eq!(planted + corpus.background.len(), 60);
        // every promised file exists on disk
        for name in corpus.families.iter().flat_map(|f| &f.docs).chain(&corpus.background) {
            assert!(dir.path().join(name).is_file(), "{name} missing");
        }
    }
}
