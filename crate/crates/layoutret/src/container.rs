//! Open Packaging Conventions container access.
//!
//! An OOXML document is a ZIP archive holding XML *parts*, a content-type
//! manifest (`[Content_Types].xml`), and relationship parts (`_rels/*.rels`)
//! that wire parts together. This module reads the whole archive into an
//! immutable [`OpcPackage`], resolves relationship targets, and classifies
//! the document family from the main part's declared content type — the
//! file extension is never trusted.

use std::collections::BTreeMap;
use std::fs;
use std::io::Cursor;
use std::path::{Path, PathBuf};

use zip::ZipArchive;

use crate::feature::DocType;

/// The content-type manifest part every package must carry.
pub const CONTENT_TYPES_PART: &str = "[Content_Types].xml";

/// Relationship type suffix that points at the main document part.
const OFFICE_DOCUMENT_REL: &str = "/officeDocument";

#[derive(Debug, thiserror::Error)]
pub enum ContainerError {
    #[error("failed to read package: {0}")]
    Io(#[from] std::io::Error),
    #[error("{path} is not a ZIP container")]
    NotZip { path: String },
    #[error("corrupt archive: {detail}")]
    CorruptArchive { detail: String },
    #[error("package has no [Content_Types].xml")]
    MissingContentTypes,
    #[error("package has no part named {name}")]
    MissingPart { name: String },
    #[error("malformed XML in {part}: {detail}")]
    MalformedXml { part: String, detail: String },
}

/// One file inside the package.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackagePart {
    /// Normalized name: forward slashes, no leading slash.
    pub name: String,
    /// Declared MIME type, empty when the manifest does not cover the part.
    pub content_type: String,
    pub data: Vec<u8>,
}

/// Whether a relationship stays inside the package.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetMode {
    Internal,
    External,
}

/// A parsed, target-resolved relationship.
///
/// Internal targets always name a part present in the package: targets that
/// escape the package root or point at a missing part are flagged
/// [`TargetMode::External`] (with a logged warning for the missing case), so
/// a dangling reference can never masquerade as a readable part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relationship {
    pub id: String,
    pub rel_type: String,
    /// Resolved part name for internal targets, the raw URI for external.
    pub target: String,
    pub mode: TargetMode,
}

/// An immutable, fully loaded package.
#[derive(Debug)]
pub struct OpcPackage {
    path: PathBuf,
    parts: BTreeMap<String, PackagePart>,
    defaults: BTreeMap<String, String>,
    overrides: BTreeMap<String, String>,
    warnings: Vec<String>,
}

impl OpcPackage {
    /// Opens a package file. Fails fast on non-ZIP bytes, an unreadable
    /// central directory, or a missing content-type manifest; individual
    /// unreadable members are skipped and reported via [`warnings`].
    ///
    /// [`warnings`]: OpcPackage::warnings
    pub fn open(path: impl AsRef<Path>) -> Result<OpcPackage, ContainerError> {
        let path = path.as_ref();
        let bytes = fs::read(path)?;
        Self::from_bytes(bytes, path)
    }

    /// Opens a package already held in memory; `label` stands in for the
    /// file path in errors and diagnostics.
    pub fn from_bytes(bytes: Vec<u8>, label: impl AsRef<Path>) -> Result<OpcPackage, ContainerError> {
        let path = label.as_ref().to_path_buf();
        if bytes.len() < 4 || &bytes[..2] != b"PK" {
            return Err(ContainerError::NotZip { path: path.display().to_string() });
        }
        let mut archive = ZipArchive::new(Cursor::new(bytes))
            .map_err(|e| ContainerError::CorruptArchive { detail: e.to_string() })?;

        let mut parts = BTreeMap::new();
        let mut warnings = Vec::new();
        for i in 0..archive.len() {
            let mut entry = match archive.by_index(i) {
                Ok(e) => e,
                Err(e) => {
                    warnings.push(format!("skipped archive member #{i}: {e}"));
                    continue;
                }
            };
            if entry.is_dir() {
                continue;
            }
            let name = normalize_part_name(entry.name());
            let mut data = Vec::with_capacity(entry.size() as usize);
            if let Err(e) = std::io::copy(&mut entry, &mut data) {
                warnings.push(format!("skipped unreadable member {name}: {e}"));
                continue;
            }
            parts.insert(name.clone(), PackagePart { name, content_type: String::new(), data });
        }

        let manifest = parts
            .get(CONTENT_TYPES_PART)
            .ok_or(ContainerError::MissingContentTypes)?;
        let (defaults, overrides) = parse_content_types(&manifest.data)?;

        let mut pkg = OpcPackage { path, parts, defaults, overrides, warnings };
        let names: Vec<String> = pkg.parts.keys().cloned().collect();
        for name in names {
            let ct = pkg.content_type_of(&name);
            pkg.parts.get_mut(&name).expect("part just listed").content_type = ct;
        }
        Ok(pkg)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Member-level problems encountered while opening (skipped entries).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn part(&self, name: &str) -> Option<&PackagePart> {
        self.parts.get(name)
    }

    pub fn part_names(&self) -> impl Iterator<Item = &str> {
        self.parts.keys().map(String::as_str)
    }

    fn content_type_of(&self, name: &str) -> String {
        if let Some(ct) = self.overrides.get(&format!("/{name}")) {
            return ct.clone();
        }
        let ext = name.rsplit('.').next().unwrap_or_default().to_ascii_lowercase();
        self.defaults.get(&ext).cloned().unwrap_or_default()
    }

    /// Parsed relationships of `part_name`; pass `""` for the package root.
    ///
    /// A part without a relationship part has no relationships — that is an
    /// empty list, not an error.
    pub fn relationships_of(&self, part_name: &str) -> Result<Vec<Relationship>, ContainerError> {
        if !part_name.is_empty() && !self.parts.contains_key(part_name) {
            return Err(ContainerError::MissingPart { name: part_name.to_string() });
        }
        let rels_name = rels_part_for(part_name);
        let Some(rels_part) = self.parts.get(&rels_name) else {
            return Ok(Vec::new());
        };
        let text = String::from_utf8_lossy(&rels_part.data);
        let doc = roxmltree::Document::parse(&text).map_err(|e| ContainerError::MalformedXml {
            part: rels_name.clone(),
            detail: e.to_string(),
        })?;

        let base_dir = match part_name.rfind('/') {
            Some(pos) => &part_name[..pos],
            None => "",
        };
        let mut rels = Vec::new();
        for node in doc.descendants().filter(|n| n.has_tag_name_local("Relationship")) {
            let id = node.attribute("Id").unwrap_or_default().to_string();
            let rel_type = node.attribute("Type").unwrap_or_default().to_string();
            let raw_target = node.attribute("Target").unwrap_or_default();
            let declared_external = node.attribute("TargetMode") == Some("External");

            let (target, mode) = if declared_external {
                (raw_target.to_string(), TargetMode::External)
            } else {
                match resolve_target(base_dir, raw_target) {
                    Some(resolved) if self.parts.contains_key(&resolved) => {
                        (resolved, TargetMode::Internal)
                    }
                    Some(resolved) => {
                        log::warn!(
                            "{}: relationship {id} targets missing part {resolved}; treated as external",
                            self.path.display()
                        );
                        (resolved, TargetMode::External)
                    }
                    // escaped the package root: external by construction
                    None => (raw_target.to_string(), TargetMode::External),
                }
            };
            rels.push(Relationship { id, rel_type, target, mode });
        }
        Ok(rels)
    }

    /// Classifies the document family from the main part's content type.
    /// `None` means the package is well-formed but not one of the three
    /// supported families.
    pub fn detect_doc_type(&self) -> Option<DocType> {
        let root_rels = self.relationships_of("").ok()?;
        let main = root_rels.iter().find(|r| {
            r.mode == TargetMode::Internal && r.rel_type.ends_with(OFFICE_DOCUMENT_REL)
        })?;
        let ct = &self.part(&main.target)?.content_type;
        if ct.contains("presentationml") {
            Some(DocType::Presentation)
        } else if ct.contains("wordprocessingml") {
            Some(DocType::Wordprocessing)
        } else if ct.contains("spreadsheetml") {
            Some(DocType::Spreadsheet)
        } else {
            None
        }
    }

    /// Follows the first relationship of `part_name` whose type ends with
    /// `type_suffix`, returning the target part.
    pub fn related_part(&self, part_name: &str, type_suffix: &str) -> Option<&PackagePart> {
        let rels = self.relationships_of(part_name).ok()?;
        let rel = rels
            .iter()
            .find(|r| r.mode == TargetMode::Internal && r.rel_type.ends_with(type_suffix))?;
        self.part(&rel.target)
    }

    /// Resolves a relationship id declared on `part_name` to its target part.
    pub fn part_by_rel_id(&self, part_name: &str, rel_id: &str) -> Option<&PackagePart> {
        let rels = self.relationships_of(part_name).ok()?;
        let rel = rels.iter().find(|r| r.mode == TargetMode::Internal && r.id == rel_id)?;
        self.part(&rel.target)
    }
}

/// Strips leading slashes and normalizes separators; OPC names are stored
/// with exact case.
fn normalize_part_name(raw: &str) -> String {
    raw.replace('\\', "/").trim_start_matches('/').to_string()
}

/// Name of the relationship part for `part_name` (`""` = package root).
pub fn rels_part_for(part_name: &str) -> String {
    if part_name.is_empty() {
        return "_rels/.rels".to_string();
    }
    match part_name.rfind('/') {
        Some(pos) => format!("{}/_rels/{}.rels", &part_name[..pos], &part_name[pos + 1..]),
        None => format!("_rels/{part_name}.rels"),
    }
}

/// Lexically resolves a relative (or root-absolute) target against the
/// directory of the source part. `None` means the target climbs out of the
/// package root.
pub fn resolve_target(base_dir: &str, target: &str) -> Option<String> {
    let target = percent_decode(target);
    let (start, rest): (Vec<&str>, &str) = if let Some(abs) = target.strip_prefix('/') {
        (Vec::new(), abs)
    } else {
        (base_dir.split('/').filter(|s| !s.is_empty()).collect(), &target)
    };
    let mut stack = start;
    for seg in rest.split('/') {
        match seg {
            "" | "." => {}
            ".." => {
                if stack.pop().is_none() {
                    return None;
                }
            }
            s => stack.push(s),
        }
    }
    Some(stack.join("/"))
}

fn percent_decode(s: &str) -> String {
    let bytes = s.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' && i + 2 < bytes.len()
            && let Ok(v) = u8::from_str_radix(&s[i + 1..i + 3], 16)
        {
            out.push(v);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8_lossy(&out).into_owned()
}

fn parse_content_types(
    data: &[u8],
) -> Result<(BTreeMap<String, String>, BTreeMap<String, String>), ContainerError> {
    let text = String::from_utf8_lossy(data);
    let doc = roxmltree::Document::parse(&text).map_err(|e| ContainerError::MalformedXml {
        part: CONTENT_TYPES_PART.to_string(),
        detail: e.to_string(),
    })?;
    let mut defaults = BTreeMap::new();
    let mut overrides = BTreeMap::new();
    for node in doc.descendants() {
        if node.has_tag_name_local("Default") {
            if let (Some(ext), Some(ct)) = (node.attribute("Extension"), node.attribute("ContentType")) {
                defaults.insert(ext.to_ascii_lowercase(), ct.to_string());
            }
        } else if node.has_tag_name_local("Override")
            && let (Some(name), Some(ct)) = (node.attribute("PartName"), node.attribute("ContentType"))
        {
            overrides.insert(name.to_string(), ct.to_string());
        }
    }
    Ok((defaults, overrides))
}

/// Local-name tag matching regardless of namespace prefix.
trait LocalName {
    fn has_tag_name_local(&self, local: &str) -> bool;
}

impl LocalName for roxmltree::Node<'_, '_> {
    fn has_tag_name_local(&self, local: &str) -> bool {
        self.is_element() && self.tag_name().name() == local
    }
}
