//! Low-level package assembly shared by the three format builders:
//! content-types manifest, relationship parts, and the zip envelope.

use std::collections::BTreeMap;
use std::io::{Cursor, Write};
use std::path::Path;
use std::{fs, io};

use zip::ZipWriter;
use zip::write::SimpleFileOptions;

pub(crate) const REL_BASE: &str =
    "http://schemas.openxmlformats.org/officeDocument/2006/relationships";

#[derive(Debug, Default)]
pub(crate) struct PackageWriter {
    /// part name → (content type override, xml body)
    parts: Vec<(String, String, String)>,
    /// source part ("" = package root) → relationship entries
    rels: BTreeMap<String, Vec<(String, String, String)>>,
}

impl PackageWriter {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn part(&mut self, name: &str, content_type: &str, xml: String) -> &mut Self {
        self.parts.push((name.to_string(), content_type.to_string(), xml));
        self
    }

    /// Declares `source` (or the package root for `""`) related to `target`
    /// with the given id and relationship-type word.
    pub(crate) fn rel(&mut self, source: &str, id: &str, type_word: &str, target: &str) -> &mut Self {
        self.rels.entry(source.to_string()).or_default().push((
            id.to_string(),
            type_word.to_string(),
            target.to_string(),
        ));
        self
    }

    fn content_types(&self) -> String {
        let mut xml = String::from(
            r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?><Types xmlns="http://schemas.openxmlformats.org/package/2006/content-types"><Default Extension="rels" ContentType="application/vnd.openxmlformats-package.relationships+xml"/><Default Extension="xml" ContentType="application/xml"/>"#,
        );
        for (name, content_type, _) in &self.parts {
            xml.push_str(&format!(
                r#"<Override PartName="/{name}" ContentType="{content_type}"/>"#
            ));
        }
        xml.push_str("</Types>");
        xml
    }

    fn rels_doc(entries: &[(String, String, String)]) -> String {
        let mut xml = String::from(
            r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?><Relationships xmlns="http://schemas.openxmlformats.org/package/2006/relationships">"#,
        );
        for (id, word, target) in entries {
            xml.push_str(&format!(
                r#"<Relationship Id="{id}" Type="{REL_BASE}/{word}" Target="{target}"/>"#
            ));
        }
        xml.push_str("</Relationships>");
        xml
    }

    pub(crate) fn bytes(&self) -> Vec<u8> {
        let mut writer = ZipWriter::new(Cursor::new(Vec::new()));
        // fixed timestamp keeps package bytes reproducible across runs
        let options = SimpleFileOptions::default()
            .last_modified_time(zip::DateTime::default())
            .compression_method(zip::CompressionMethod::Deflated);
        let mut add = |name: &str, body: &str| {
            writer.start_file(name, options).expect("zip entry");
            writer.write_all(body.as_bytes()).expect("zip body");
        };
        add("[Content_Types].xml", &self.content_types());
        for (source, entries) in &self.rels {
            let rels_name = if source.is_empty() {
                "_rels/.rels".to_string()
            } else {
                match source.rsplit_once('/') {
                    Some((dir, file)) => format!("{dir}/_rels/{file}.rels"),
                    None => format!("_rels/{source}.rels"),
                }
            };
            add(&rels_name, &Self::rels_doc(entries));
        }
        for (name, _, xml) in &self.parts {
            add(name, xml);
        }
        writer.finish().expect("zip finish").into_inner()
    }

    pub(crate) fn write_to(&self, path: &Path) -> io::Result<()> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(path, self.bytes())
    }
}

/// Escapes text destined for XML content or attribute values.
pub(crate) fn xml_escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(ch),
        }
    }
    out
}

/// Centimeters → EMU (360,000 per cm), rounded to the nearest integer.
pub(crate) fn cm_to_emu(cm: f64) -> i64 {
    (cm * 360_000.0).round() as i64
}

/// Centimeters → twips (1440 per inch), rounded to the nearest integer.
pub(crate) fn cm_to_twip(cm: f64) -> i64 {
    (cm * 1440.0 / 2.54).round() as i64
}

/// Points → the hundredths-of-a-point unit of presentation font sizes.
pub(crate) fn pt_to_centipoint(pt: f64) -> i64 {
    (pt * 100.0).round() as i64
}

/// Points → half-points, the word-processing font size unit.
pub(crate) fn pt_to_half_point(pt: f64) -> i64 {
    (pt * 2.0).round() as i64
}
