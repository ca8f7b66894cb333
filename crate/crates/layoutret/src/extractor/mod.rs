//! Layout-feature extraction from opened packages.
//!
//! One extractor per document family, all sharing the package plumbing,
//! XML helpers, and theme resolution below. Extraction prefers partial
//! results: a page that fails to parse is logged and omitted, it never
//! aborts the document.

mod presentation;
mod spreadsheet;
mod wordprocessing;

use std::collections::BTreeMap;
use std::path::Path;

use crate::container::{ContainerError, OpcPackage, TargetMode};
use crate::feature::{DocType, PageFeature, normalize_rgb};

#[derive(Debug, thiserror::Error)]
pub enum ExtractError {
    #[error(transparent)]
    Container(#[from] ContainerError),
    #[error("package is not a supported office document")]
    UnsupportedType,
    #[error("package has no {0} part")]
    MissingPart(&'static str),
    #[error("malformed {part}: {detail}")]
    Malformed { part: String, detail: String },
}

/// Extracts every page of an already-opened package.
pub fn extract_package(
    pkg: &OpcPackage,
    doc_id: &str,
) -> Result<(DocType, Vec<PageFeature>), ExtractError> {
    let doc_type = pkg.detect_doc_type().ok_or(ExtractError::UnsupportedType)?;
    let pages = match doc_type {
        DocType::Presentation => presentation::extract(pkg, doc_id)?,
        DocType::Wordprocessing => wordprocessing::extract(pkg, doc_id)?,
        DocType::Spreadsheet => spreadsheet::extract(pkg, doc_id)?,
    };
    Ok((doc_type, pages))
}

/// Opens a file and extracts it in one step.
pub fn extract_document(
    path: impl AsRef<Path>,
    doc_id: &str,
) -> Result<(DocType, Vec<PageFeature>), ExtractError> {
    let pkg = OpcPackage::open(path)?;
    extract_package(&pkg, doc_id)
}

// ---- shared plumbing -------------------------------------------------------

/// Relationship namespace of `r:id`-style attributes.
pub(crate) const R_NS: &str =
    "http://schemas.openxmlformats.org/officeDocument/2006/relationships";

/// The package's main document part (the officeDocument relationship target).
pub(crate) fn main_part<'a>(pkg: &'a OpcPackage) -> Result<&'a str, ExtractError> {
    let rels = pkg.relationships_of("")?;
    rels.iter()
        .find(|r| r.mode == TargetMode::Internal && r.rel_type.ends_with("/officeDocument"))
        .map(|r| r.target.as_str())
        .and_then(|t| pkg.part(t).map(|p| p.name.as_str()))
        .ok_or(ExtractError::MissingPart("main document"))
}

/// Parses a part as XML (tolerating a UTF-8 BOM).
pub(crate) fn parse_xml<'a>(
    data: &'a [u8],
    part: &str,
) -> Result<roxmltree::Document<'a>, ExtractError> {
    let text = std::str::from_utf8(data).map_err(|e| ExtractError::Malformed {
        part: part.to_string(),
        detail: format!("not UTF-8: {e}"),
    })?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    roxmltree::Document::parse(text).map_err(|e| ExtractError::Malformed {
        part: part.to_string(),
        detail: e.to_string(),
    })
}

pub(crate) type Node<'a, 'input> = roxmltree::Node<'a, 'input>;

/// Local-name navigation over namespaced office XML.
pub(crate) trait NodeExt<'a, 'input: 'a> {
    fn el(&self, local: &str) -> Option<Node<'a, 'input>>;
    fn els(&self, local: &'a str) -> impl Iterator<Item = Node<'a, 'input>>;
    /// First attribute with the given local name, any namespace.
    fn attr_any(&self, local: &str) -> Option<&'a str>;
    /// Attribute in the relationships namespace (`r:id`, `r:embed`, …).
    fn attr_rel(&self, local: &str) -> Option<&'a str>;
}

impl<'a, 'input> NodeExt<'a, 'input> for Node<'a, 'input> {
    fn el(&self, local: &str) -> Option<Node<'a, 'input>> {
        self.children().find(|c| c.is_element() && c.tag_name().name() == local)
    }

    fn els(&self, local: &'a str) -> impl Iterator<Item = Node<'a, 'input>> {
        self.children().filter(move |c| c.is_element() && c.tag_name().name() == local)
    }

    fn attr_any(&self, local: &str) -> Option<&'a str> {
        self.attributes().find(|a| a.name() == local).map(|a| a.value())
    }

    fn attr_rel(&self, local: &str) -> Option<&'a str> {
        self.attributes()
            .find(|a| a.name() == local && a.namespace() == Some(R_NS))
            .map(|a| a.value())
    }
}

/// Attribute parsed as an integer, if present and well-formed.
pub(crate) fn attr_i64(node: Node, name: &str) -> Option<i64> {
    node.attribute(name).and_then(|v| v.trim().parse().ok())
}

// ---- theme resolution ------------------------------------------------------

/// Scheme colors and latin faces of a drawingml theme part.
#[derive(Debug, Clone, Default)]
pub(crate) struct Theme {
    /// Scheme slot (`dk1`, `lt1`, `accent1`, …) → six-digit RGB.
    colors: BTreeMap<String, String>,
    major_latin: Option<String>,
    minor_latin: Option<String>,
}

impl Theme {
    /// Loads the theme related to `part_name`, or an empty theme when the
    /// package has none.
    pub(crate) fn for_part(pkg: &OpcPackage, part_name: &str) -> Theme {
        let Some(part) = pkg.related_part(part_name, "/theme") else {
            return Theme::default();
        };
        match parse_xml(&part.data, &part.name) {
            Ok(doc) => Theme::from_doc(&doc),
            Err(e) => {
                log::warn!("ignoring unreadable theme: {e}");
                Theme::default()
            }
        }
    }

    fn from_doc(doc: &roxmltree::Document) -> Theme {
        let mut theme = Theme::default();
        let Some(elements) = doc.root_element().el("themeElements") else {
            return theme;
        };
        if let Some(scheme) = elements.el("clrScheme") {
            for slot in scheme.children().filter(|c| c.is_element()) {
                let name = slot.tag_name().name().to_string();
                let rgb = slot
                    .el("srgbClr")
                    .and_then(|c| c.attribute("val"))
                    .or_else(|| slot.el("sysClr").and_then(|c| c.attribute("lastClr")));
                if let Some(rgb) = rgb.and_then(normalize_rgb) {
                    theme.colors.insert(name, rgb);
                }
            }
        }
        if let Some(fonts) = elements.el("fontScheme") {
            let latin = |slot: &str| {
                fonts
                    .el(slot)
                    .and_then(|f| f.el("latin"))
                    .and_then(|l| l.attribute("typeface"))
                    .filter(|t| !t.is_empty())
                    .map(|t| t.to_ascii_lowercase())
            };
            theme.major_latin = latin("majorFont");
            theme.minor_latin = latin("minorFont");
        }
        theme
    }

    /// RGB of a scheme slot, accepting both theme names (`dk1`) and the
    /// wordprocessing aliases (`dark1`, `hyperlink`, …).
    pub(crate) fn color(&self, slot: &str) -> Option<String> {
        let canonical = match slot {
            "dark1" => "dk1",
            "light1" => "lt1",
            "dark2" => "dk2",
            "light2" => "lt2",
            "hyperlink" => "hlink",
            "followedHyperlink" => "folHlink",
            other => other,
        };
        self.colors.get(canonical).cloned()
    }

    /// Typeface behind `+mj-lt` / `+mn-lt` (and the wordprocessing
    /// `majorAscii` / `minorAscii` theme-font names).
    pub(crate) fn latin(&self, slot: &str) -> Option<String> {
        match slot {
            "+mj-lt" | "majorAscii" | "majorHAnsi" => self.major_latin.clone(),
            "+mn-lt" | "minorAscii" | "minorHAnsi" => self.minor_latin.clone(),
            _ => None,
        }
    }
}
