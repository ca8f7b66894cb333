//! Randomized document corpora for end-to-end testing.
//!
//! All randomness flows from a caller-supplied seed through a
//! fixed-algorithm generator, so a corpus reproduces exactly across runs
//! and platforms.

use std::io;
use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::xlsx::CellStyle;
use crate::{DocxBuilder, PptxBuilder, Run, XlsxBuilder};

const FONTS: &[&str] = &["Arial", "Calibri", "Georgia", "Consolas", "Verdana", "Cambria"];
const COLORS: &[&str] = &["1F4E79", "C00000", "2E7D32", "7030A0", "ED7D31", "404040"];
const SIZES: &[f64] = &[9.0, 10.5, 11.0, 12.0, 14.0, 18.0, 24.0, 32.0, 40.0];
const PRESETS: &[&str] =
    &["rect", "roundRect", "ellipse", "leftRightArrow", "triangle", "hexagon"];
const PLOTS: &[&str] = &["barChart", "bar3DChart", "pieChart", "lineChart", "areaChart"];
const WORDS: &[&str] = &[
    "quarterly", "revenue", "overview", "pipeline", "summary", "draft", "agenda", "metrics",
    "review", "notes", "plan", "forecast", "update", "status", "region", "delta",
];

fn words(rng: &mut ChaCha8Rng, n: usize) -> String {
    (0..n)
        .map(|_| *WORDS.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join(" ")
}

/// A run with a random chance of carrying each explicit attribute, so the
/// inheritance paths get exercised alongside direct formatting.
fn styled_run(rng: &mut ChaCha8Rng) -> Run {
    let n = rng.random_range(1..=5);
    let text = words(rng, n);
    Run {
        text,
        size_pt: rng.random_bool(0.7).then(|| *SIZES.choose(rng).unwrap()),
        color: rng.random_bool(0.6).then(|| COLORS.choose(rng).unwrap().to_string()),
        font: rng.random_bool(0.6).then(|| FONTS.choose(rng).unwrap().to_string()),
    }
}

fn runs(rng: &mut ChaCha8Rng, max: usize) -> Vec<Run> {
    (0..rng.random_range(1..=max)).map(|_| styled_run(rng)).collect()
}

/// Rounds to the authoring grid used throughout the corpus.
fn snap(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

fn rect_within(rng: &mut ChaCha8Rng, page_w: f64, page_h: f64) -> (f64, f64, f64, f64) {
    let w = snap(rng.random_range(2.0..page_w * 0.6));
    let h = snap(rng.random_range(1.0..page_h * 0.5));
    let x = snap(rng.random_range(0.0..(page_w - w)));
    let y = snap(rng.random_range(0.0..(page_h - h)));
    (x, y, w, h)
}

/// Writes `count` randomized documents (presentations, wordprocessing
/// documents, and workbooks in rotation) into `dir` and returns their file
/// names. Every document stays at or below ten page-like units, and the
/// first document of each family deliberately contains every object kind
/// that family can produce.
pub fn mixed_corpus(dir: &Path, seed: u64, count: usize) -> io::Result<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut names = Vec::with_capacity(count);
    for i in 0..count {
        let name = match i % 3 {
            0 => {
                let name = format!("deck_{i:03}.pptx");
                random_pptx(&mut rng, i == 0).write_to(dir.join(&name))?;
                name
            }
            1 => {
                let name = format!("doc_{i:03}.docx");
                random_docx(&mut rng, i == 1).write_to(dir.join(&name))?;
                name
            }
            _ => {
                let name = format!("book_{i:03}.xlsx");
                random_xlsx(&mut rng, i == 2).write_to(dir.join(&name))?;
                name
            }
        };
        names.push(name);
    }
    Ok(names)
}

fn random_pptx(rng: &mut ChaCha8Rng, kitchen_sink: bool) -> PptxBuilder {
    let (pw, ph) = *[(25.4, 19.05), (33.867, 19.05), (24.0, 18.0)].choose(rng).unwrap();
    let mut deck = PptxBuilder::new(pw, ph);
    let slides = rng.random_range(1..=10);
    for s in 0..slides {
        let force_all = kitchen_sink && s == 0;
        deck = deck.slide(|mut slide| {
            let objects = if force_all { 4 } else { rng.random_range(1..=4) };
            for k in 0..objects {
                let (x, y, w, h) = rect_within(rng, pw, ph);
                let pick = if force_all { k } else { rng.random_range(0..4) };
                slide = match pick {
                    0 => slide.textbox(x, y, w, h, &runs(rng, 3)),
                    1 => slide.image(x, y, w, h),
                    2 => slide.shape(x, y, w, h, PRESETS.choose(rng).unwrap(), &runs(rng, 2)),
                    _ => slide.table(
                        x,
                        y,
                        w,
                        h,
                        rng.random_range(2..=6),
                        rng.random_range(2..=5),
                        &runs(rng, 2),
                    ),
                };
            }
            slide
        });
    }
    deck
}

fn random_docx(rng: &mut ChaCha8Rng, kitchen_sink: bool) -> DocxBuilder {
    let mut doc = DocxBuilder::new();
    let sections = rng.random_range(1..=4);
    for s in 0..sections {
        let force_all = kitchen_sink && s == 0;
        doc = doc.section(|mut sec| {
            let (pw, ph) = *[(21.59, 27.94), (21.0, 29.7)].choose(rng).unwrap();
            sec = sec.page_size(pw, ph);
            if rng.random_bool(0.5) {
                sec = sec.margins([
                    snap(rng.random_range(1.0..3.0)),
                    snap(rng.random_range(1.0..3.0)),
                    snap(rng.random_range(1.0..3.0)),
                    snap(rng.random_range(1.0..3.0)),
                    snap(rng.random_range(0.5..1.5)),
                    snap(rng.random_range(0.5..1.5)),
                    0.0,
                ]);
            }
            if force_all || rng.random_bool(0.3) {
                sec = sec.columns(rng.random_range(2..=3), snap(rng.random_range(0.5..1.5)));
            }
            for _ in 0..rng.random_range(1..=4) {
                sec = sec.paragraph(&runs(rng, 3));
            }
            if force_all || rng.random_bool(0.4) {
                sec = sec.table(rng.random_range(2..=8), rng.random_range(2..=5), &runs(rng, 2));
            }
            if force_all || rng.random_bool(0.4) {
                sec = sec.image(
                    snap(rng.random_range(3.0..16.0)),
                    snap(rng.random_range(3.0..16.0)),
                );
            }
            if force_all || rng.random_bool(0.3) {
                sec = sec.footnote(&runs(rng, 2));
            }
            if force_all || rng.random_bool(0.3) {
                sec = sec.header(&runs(rng, 1));
            }
            if force_all || rng.random_bool(0.3) {
                sec = sec.footer(&runs(rng, 1));
            }
            sec
        });
    }
    doc
}

fn random_xlsx(rng: &mut ChaCha8Rng, kitchen_sink: bool) -> XlsxBuilder {
    let mut book = XlsxBuilder::new();
    let mut formats = vec![0usize];
    for _ in 0..rng.random_range(1..=3) {
        let mut style = CellStyle::new()
            .font(*SIZES.choose(rng).unwrap(), FONTS.choose(rng).unwrap());
        if rng.random_bool(0.6) {
            style = style.font_color(COLORS.choose(rng).unwrap());
        }
        if rng.random_bool(0.5) {
            style = style.fill("solid", Some(COLORS.choose(rng).unwrap()));
        }
        if rng.random_bool(0.5) {
            style = style.border("top", "thin").border("bottom", "double");
        }
        formats.push(book.add_style(style));
    }
    let sheets = rng.random_range(1..=6);
    for s in 0..sheets {
        let force_all = kitchen_sink && s == 0;
        // split the borrow: choices made before the closure captures rng
        let zoom =
            (force_all || rng.random_bool(0.5)).then(|| *[70, 85, 120, 150].choose(rng).unwrap());
        let cells: Vec<(u32, u32, usize)> = (0..rng.random_range(1..=8))
            .map(|_| {
                (
                    rng.random_range(1..=40),
                    rng.random_range(1..=12),
                    *formats.choose(rng).unwrap(),
                )
            })
            .collect();
        let image = (force_all || rng.random_bool(0.4)).then(|| {
            let from = (rng.random_range(1..=20), rng.random_range(1..=8));
            (from, (from.0 + rng.random_range(1..=10), from.1 + rng.random_range(1..=5)))
        });
        let chart = (force_all || rng.random_bool(0.4)).then(|| {
            let from = (rng.random_range(1..=20), rng.random_range(1..=8));
            let to = (from.0 + rng.random_range(2..=12), from.1 + rng.random_range(2..=6));
            (PLOTS.choose(rng).unwrap().to_string(), from, to)
        });
        book.sheet(|mut sheet| {
            if let Some(z) = zoom {
                sheet = sheet.zoom(z);
            }
            for (r, c, f) in cells {
                sheet = sheet.cell(r, c, f);
            }
            if let Some((from, to)) = image {
                sheet = sheet.image(from, to);
            }
            if let Some((plot, from, to)) = chart {
                sheet = sheet.chart(&plot, from, to);
            }
            sheet
        });
    }
    book
}

/// A generated retrieval corpus: every deck shares one page size, a few
/// *families* of decks share a planted object layout (same kinds, positions,
/// extents, and fonts up to a small geometric perturbation, with entirely
/// different text), and the rest are unrelated filler.
pub struct PlantedCorpus {
    pub families: Vec<PlantedFamily>,
    pub background: Vec<String>,
    pub page_size: (f64, f64),
}

pub struct PlantedFamily {
    pub label: String,
    /// File names of the member decks, in generation order.
    pub docs: Vec<String>,
}

/// One object of a family's planted layout, before perturbation.
#[derive(Clone)]
enum Proto {
    Textbox { rect: [f64; 4], size_pt: f64, color: &'static str, font: &'static str },
    Image { rect: [f64; 4] },
    Shape { rect: [f64; 4], preset: &'static str, size_pt: f64, color: &'static str, font: &'static str },
    Table { rect: [f64; 4], rows: u32, cols: u32, size_pt: f64 },
}

fn family_protos() -> Vec<(&'static str, Vec<Proto>)> {
    vec![
        (
            "banner",
            vec![
                Proto::Textbox {
                    rect: [1.8, 0.9, 21.6, 2.8],
                    size_pt: 40.0,
                    color: "1F4E79",
                    font: "Georgia",
                },
                Proto::Textbox {
                    rect: [1.8, 4.6, 13.4, 12.2],
                    size_pt: 18.0,
                    color: "404040",
                    font: "Georgia",
                },
                Proto::Image { rect: [16.4, 5.2, 7.6, 10.4] },
            ],
        ),
        (
            "dashboard",
            vec![
                Proto::Image { rect: [0.9, 0.8, 11.2, 8.1] },
                Proto::Table { rect: [13.2, 1.1, 11.0, 7.4], rows: 5, cols: 4, size_pt: 12.0 },
                Proto::Textbox {
                    rect: [0.9, 10.3, 23.4, 7.6],
                    size_pt: 14.0,
                    color: "C00000",
                    font: "Consolas",
                },
            ],
        ),
        (
            "callout",
            vec![
                Proto::Shape {
                    rect: [3.1, 2.4, 19.0, 5.6],
                    preset: "roundRect",
                    size_pt: 24.0,
                    color: "2E7D32",
                    font: "Verdana",
                },
                Proto::Textbox {
                    rect: [3.1, 9.4, 9.2, 8.0],
                    size_pt: 11.0,
                    color: "7030A0",
                    font: "Cambria",
                },
                Proto::Image { rect: [14.3, 9.4, 8.0, 8.0] },
                Proto::Table { rect: [3.1, 14.6, 7.0, 3.4], rows: 3, cols: 2, size_pt: 10.5 },
            ],
        ),
    ]
}

/// Writes a `total`-deck corpus into `dir`: three planted families of
/// 4–12 members each on a 25.4 cm x 19.05 cm page, geometry perturbed per
/// member by up to ±2% of the page extent on each axis, text fully
/// re-randomized per member; every remaining deck is unrelated filler on
/// the same page size.
pub fn planted_presentations(dir: &Path, seed: u64, total: usize) -> io::Result<PlantedCorpus> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (pw, ph) = (25.4, 19.05);

    let protos = family_protos();
    let member_counts: Vec<usize> =
        protos.iter().map(|_| rng.random_range(4..=12)).collect();
    let planted_total: usize = member_counts.iter().sum();
    assert!(
        planted_total < total,
        "corpus size {total} cannot hold {planted_total} family members"
    );

    // deal out deck indices so family members are scattered through the
    // corpus rather than clustered at the front
    let mut slots: Vec<usize> = (0..total).collect();
    slots.shuffle(&mut rng);

    let mut families = Vec::new();
    let mut taken = 0usize;
    for ((label, proto), count) in protos.iter().zip(&member_counts) {
        let mut docs = Vec::with_capacity(*count);
        for _ in 0..*count {
            let slot = slots[taken];
            taken += 1;
            let name = format!("deck_{slot:03}.pptx");
            family_member(&mut rng, proto, pw, ph).write_to(dir.join(&name))?;
            docs.push(name);
        }
        families.push(PlantedFamily { label: label.to_string(), docs });
    }

    let mut background = Vec::new();
    for &slot in &slots[taken..] {
        let name = format!("deck_{slot:03}.pptx");
        filler_deck(&mut rng, pw, ph).write_to(dir.join(&name))?;
        background.push(name);
    }

    Ok(PlantedCorpus { families, background, page_size: (pw, ph) })
}

/// Perturbs one planted coordinate by up to ±2% of the page extent on its
/// axis.
fn jitter(rng: &mut ChaCha8Rng, v: f64, extent: f64) -> f64 {
    snap((v + rng.random_range(-0.02..=0.02) * extent).max(0.05))
}

fn family_member(rng: &mut ChaCha8Rng, proto: &[Proto], pw: f64, ph: f64) -> PptxBuilder {
    PptxBuilder::new(pw, ph).slide(|mut slide| {
        for obj in proto {
            let place = |rng: &mut ChaCha8Rng, rect: &[f64; 4]| {
                (
                    jitter(rng, rect[0], pw),
                    jitter(rng, rect[1], ph),
                    jitter(rng, rect[2], pw),
                    jitter(rng, rect[3], ph),
                )
            };
            slide = match obj {
                Proto::Textbox { rect, size_pt, color, font } => {
                    let (x, y, w, h) = place(rng, rect);
                    let n = rng.random_range(3..=7);
                    let text = words(rng, n);
                    slide.textbox(x, y, w, h, &[Run::styled(&text, *size_pt, color, font)])
                }
                Proto::Image { rect } => {
                    let (x, y, w, h) = place(rng, rect);
                    slide.image(x, y, w, h)
                }
                Proto::Shape { rect, preset, size_pt, color, font } => {
                    let (x, y, w, h) = place(rng, rect);
                    let n = rng.random_range(2..=4);
                    let text = words(rng, n);
                    slide.shape(x, y, w, h, preset, &[Run::styled(&text, *size_pt, color, font)])
                }
                Proto::Table { rect, rows, cols, size_pt } => {
                    let (x, y, w, h) = place(rng, rect);
                    let n = rng.random_range(2..=4);
                    let text = words(rng, n);
                    slide.table(x, y, w, h, *rows, *cols, &[Run::sized(&text, *size_pt)])
                }
            };
        }
        slide
    })
}

fn filler_deck(rng: &mut ChaCha8Rng, pw: f64, ph: f64) -> PptxBuilder {
    let mut deck = PptxBuilder::new(pw, ph);
    for _ in 0..rng.random_range(1..=3) {
        deck = deck.slide(|mut slide| {
            for _ in 0..rng.random_range(1..=4) {
                let (x, y, w, h) = rect_within(rng, pw, ph);
                slide = match rng.random_range(0..4) {
                    0 => slide.textbox(x, y, w, h, &runs(rng, 3)),
                    1 => slide.image(x, y, w, h),
                    2 => slide.shape(x, y, w, h, PRESETS.choose(rng).unwrap(), &runs(rng, 2)),
                    _ => slide.table(
                        x,
                        y,
                        w,
                        h,
                        rng.random_range(2..=6),
                        rng.random_range(2..=4),
                        &runs(rng, 2),
                    ),
                };
            }
            slide
        });
    }
    deck
}
