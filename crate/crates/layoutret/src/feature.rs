//! Domain model for extracted layout features.
//!
//! A document yields one [`PageFeature`] per page-like unit (slide, section,
//! worksheet). Each page carries its geometry and a list of
//! [`LayoutObject`]s. Only the field groups that make sense for an object's
//! kind are populated; [`LayoutObject::validate`] checks that rule.
//!
//! Lengths are centimeters, font sizes are points, both quantized to a
//! 1/10000 grid and serialized as fixed four-decimal strings so a database
//! round-trips bit-for-bit.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The three supported document families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DocType {
    Presentation,
    Wordprocessing,
    Spreadsheet,
}

impl DocType {
    pub fn as_str(self) -> &'static str {
        match self {
            DocType::Presentation => "presentation",
            DocType::Wordprocessing => "wordprocessing",
            DocType::Spreadsheet => "spreadsheet",
        }
    }
}

impl fmt::Display for DocType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DocType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "presentation" => Ok(DocType::Presentation),
            "wordprocessing" => Ok(DocType::Wordprocessing),
            "spreadsheet" => Ok(DocType::Spreadsheet),
            other => Err(format!("unknown document type `{other}`")),
        }
    }
}

/// One page-like unit of a document together with its extracted layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageFeature {
    /// Stable corpus identifier of the owning document.
    pub doc_id: String,
    pub doc_type: DocType,
    /// 1-based position within the document (slide, section, or sheet order).
    pub page_index: u32,
    pub page_geometry: PageGeometry,
    pub objects: Vec<LayoutObject>,
}

/// Page-level geometry. Which fields are present depends on the document
/// family: slides carry width/height, wordprocessing sections add columns
/// and margins, worksheets carry the zoom scale and used-range extent.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PageGeometry {
    #[serde(default, skip_serializing_if = "Option::is_none", with = "len_serde::opt")]
    pub width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "len_serde::opt")]
    pub height: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub columns: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margins: Option<Margins>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zoom_scale: Option<u32>,
    /// Highest 1-based row index in use on a worksheet (cells or anchors).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub used_rows: Option<u32>,
    /// Highest 1-based column index in use on a worksheet.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub used_cols: Option<u32>,
}

/// Section margins of a wordprocessing page, in centimeters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    #[serde(with = "len_serde::scalar")]
    pub upper: f64,
    #[serde(with = "len_serde::scalar")]
    pub right: f64,
    #[serde(with = "len_serde::scalar")]
    pub lower: f64,
    #[serde(with = "len_serde::scalar")]
    pub left: f64,
    #[serde(with = "len_serde::scalar")]
    pub header: f64,
    #[serde(with = "len_serde::scalar")]
    pub footer: f64,
    #[serde(with = "len_serde::scalar")]
    pub gutter: f64,
    /// Gap between text columns (`w:cols/@w:space`).
    #[serde(with = "len_serde::scalar")]
    pub column: f64,
}

/// Everything the matcher can see about one object on a page.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutObject {
    pub kind: ObjectKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<ObjectGeometry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text_props: Option<TextProps>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table_props: Option<TableProps>,
    /// Preset geometry name, case-folded (e.g. `leftrightarrow`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape_type: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart_props: Option<ChartProps>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell_anchor: Option<CellAnchor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell_style_props: Option<CellStyleProps>,
}

/// Object kinds across all three document families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectKind {
    Textbox,
    Image,
    Table,
    Shape,
    Footnote,
    Header,
    Footer,
    BodyText,
    CellStyles,
    SheetImage,
    Chart,
}

impl ObjectKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ObjectKind::Textbox => "textbox",
            ObjectKind::Image => "image",
            ObjectKind::Table => "table",
            ObjectKind::Shape => "shape",
            ObjectKind::Footnote => "footnote",
            ObjectKind::Header => "header",
            ObjectKind::Footer => "footer",
            ObjectKind::BodyText => "body_text",
            ObjectKind::CellStyles => "cell_styles",
            ObjectKind::SheetImage => "sheet_image",
            ObjectKind::Chart => "chart",
        }
    }
}

impl fmt::Display for ObjectKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ObjectKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "textbox" => ObjectKind::Textbox,
            "image" => ObjectKind::Image,
            "table" => ObjectKind::Table,
            "shape" => ObjectKind::Shape,
            "footnote" => ObjectKind::Footnote,
            "header" => ObjectKind::Header,
            "footer" => ObjectKind::Footer,
            "body_text" => ObjectKind::BodyText,
            "cell_styles" => ObjectKind::CellStyles,
            "sheet_image" => ObjectKind::SheetImage,
            "chart" => ObjectKind::Chart,
            other => return Err(format!("unknown object kind `{other}`")),
        })
    }
}

/// Position and extent of an object on its page, in centimeters.
///
/// Position is optional: wordprocessing images flow with the text, so only
/// their extent is known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectGeometry {
    #[serde(default, skip_serializing_if = "Option::is_none", with = "len_serde::opt")]
    pub x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "len_serde::opt")]
    pub y: Option<f64>,
    #[serde(with = "len_serde::scalar")]
    pub width: f64,
    #[serde(with = "len_serde::scalar")]
    pub height: f64,
}

impl ObjectGeometry {
    pub fn sized(width: f64, height: f64) -> Self {
        ObjectGeometry { x: None, y: None, width, height }
    }

    pub fn placed(x: f64, y: f64, width: f64, height: f64) -> Self {
        ObjectGeometry { x: Some(x), y: Some(y), width, height }
    }
}

/// Run-level text attributes aggregated over an object, in document order.
/// One entry per run; duplicates are kept (they carry multiplicity).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TextProps {
    #[serde(with = "len_serde::vec")]
    pub font_sizes: Vec<f64>,
    /// Six uppercase hex digits per entry, no `#`.
    pub font_colors: Vec<String>,
    /// Case-folded family names.
    pub font_names: Vec<String>,
}

impl TextProps {
    pub fn is_empty(&self) -> bool {
        self.font_sizes.is_empty() && self.font_colors.is_empty() && self.font_names.is_empty()
    }
}

/// Grid dimensions of a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableProps {
    pub rows: u32,
    pub cols: u32,
}

/// Chart classification: the family name with the dimensionality split out,
/// so a 2-D and a 3-D bar chart share `chart_type` but differ in
/// `dimensionality`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartProps {
    /// Case-folded family name, e.g. `barchart`, `piechart`.
    pub chart_type: String,
    /// 2 or 3.
    pub dimensionality: u8,
}

impl ChartProps {
    /// Parses a chart description into family + dimensionality.
    ///
    /// Accepts both plot-element names from chart markup (`bar3DChart`) and
    /// hand-written query values (`barChart`, `pie 3d chart`). Spaces,
    /// hyphens, and underscores are dropped; a `3d` marker anywhere selects
    /// dimensionality 3.
    pub fn parse(text: &str) -> Option<ChartProps> {
        let folded: String = text
            .chars()
            .filter(|c| !matches!(c, ' ' | '-' | '_'))
            .flat_map(char::to_lowercase)
            .collect();
        if folded.is_empty() {
            return None;
        }
        let (base, dim) = match folded.find("3d") {
            Some(pos) => {
                let mut b = String::with_capacity(folded.len() - 2);
                b.push_str(&folded[..pos]);
                b.push_str(&folded[pos + 2..]);
                (b, 3)
            }
            None => (folded, 2),
        };
        if base.is_empty() || !base.chars().all(|c| c.is_ascii_alphanumeric()) {
            return None;
        }
        Some(ChartProps { chart_type: base, dimensionality: dim })
    }
}

/// A worksheet cell position in 1-based R1C1 form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CellRef {
    pub row: u32,
    pub col: u32,
}

impl fmt::Display for CellRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R{}C{}", self.row, self.col)
    }
}

impl FromStr for CellRef {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || format!("expected a cell reference like R1C5, got `{s}`");
        let rest = s.strip_prefix(['R', 'r']).ok_or_else(err)?;
        let c_pos = rest.find(['C', 'c']).ok_or_else(err)?;
        let row: u32 = rest[..c_pos].parse().map_err(|_| err())?;
        let col: u32 = rest[c_pos + 1..].parse().map_err(|_| err())?;
        if row == 0 || col == 0 {
            return Err(format!("cell reference `{s}` must be 1-based"));
        }
        Ok(CellRef { row, col })
    }
}

impl Serialize for CellRef {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CellRef {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The cell span an image or chart is anchored to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellAnchor {
    pub from: CellRef,
    pub to: CellRef,
}

/// Worksheet-wide style usage summary: one entry per distinct cell format
/// actually used on the sheet, in first-use order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CellStyleProps {
    /// Pattern names (`none`, `solid`, `gray0625`, ...).
    pub fill_patterns: Vec<String>,
    /// Foreground fill colors, six uppercase hex digits.
    pub fill_colors: Vec<String>,
    /// Border side styles (`thin`, `double`, ...); `none` for unbordered.
    pub borders: Vec<String>,
}

impl LayoutObject {
    fn bare(kind: ObjectKind) -> Self {
        LayoutObject {
            kind,
            geometry: None,
            text_props: None,
            table_props: None,
            shape_type: None,
            chart_props: None,
            cell_anchor: None,
            cell_style_props: None,
        }
    }

    pub fn textbox(geometry: ObjectGeometry, text: TextProps) -> Self {
        LayoutObject {
            geometry: Some(geometry),
            text_props: Some(text),
            ..Self::bare(ObjectKind::Textbox)
        }
    }

    pub fn image(geometry: ObjectGeometry) -> Self {
        LayoutObject { geometry: Some(geometry), ..Self::bare(ObjectKind::Image) }
    }

    pub fn table(geometry: Option<ObjectGeometry>, dims: TableProps, text: TextProps) -> Self {
        LayoutObject {
            geometry,
            table_props: Some(dims),
            text_props: Some(text),
            ..Self::bare(ObjectKind::Table)
        }
    }

    pub fn shape(geometry: ObjectGeometry, shape_type: String, text: TextProps) -> Self {
        LayoutObject {
            geometry: Some(geometry),
            shape_type: Some(shape_type),
            text_props: Some(text),
            ..Self::bare(ObjectKind::Shape)
        }
    }

    /// Footnote, header, footer, or body-text run aggregate.
    pub fn text_block(kind: ObjectKind, text: TextProps) -> Self {
        debug_assert!(matches!(
            kind,
            ObjectKind::Footnote | ObjectKind::Header | ObjectKind::Footer | ObjectKind::BodyText
        ));
        LayoutObject { text_props: Some(text), ..Self::bare(kind) }
    }

    pub fn cell_styles(text: TextProps, styles: CellStyleProps) -> Self {
        LayoutObject {
            text_props: Some(text),
            cell_style_props: Some(styles),
            ..Self::bare(ObjectKind::CellStyles)
        }
    }

    pub fn sheet_image(anchor: CellAnchor) -> Self {
        LayoutObject { cell_anchor: Some(anchor), ..Self::bare(ObjectKind::SheetImage) }
    }

    pub fn chart(props: ChartProps, anchor: CellAnchor) -> Self {
        LayoutObject {
            chart_props: Some(props),
            cell_anchor: Some(anchor),
            ..Self::bare(ObjectKind::Chart)
        }
    }

    /// Checks that exactly the field groups appropriate to `kind` are set.
    pub fn validate(&self) -> Result<(), String> {
        use ObjectKind::*;
        let groups = [
            ("geometry", self.geometry.is_some()),
            ("text_props", self.text_props.is_some()),
            ("table_props", self.table_props.is_some()),
            ("shape_type", self.shape_type.is_some()),
            ("chart_props", self.chart_props.is_some()),
            ("cell_anchor", self.cell_anchor.is_some()),
            ("cell_style_props", self.cell_style_props.is_some()),
        ];
        // (required, optional) group names per kind
        let (required, optional): (&[&str], &[&str]) = match self.kind {
            Textbox => (&["geometry", "text_props"], &[]),
            Image => (&["geometry"], &[]),
            Table => (&["table_props", "text_props"], &["geometry"]),
            Shape => (&["geometry", "shape_type", "text_props"], &[]),
            Footnote | Header | Footer | BodyText => (&["text_props"], &[]),
            CellStyles => (&["text_props", "cell_style_props"], &[]),
            SheetImage => (&["cell_anchor"], &[]),
            Chart => (&["chart_props", "cell_anchor"], &[]),
        };
        for (name, set) in groups {
            let wanted = required.contains(&name);
            let allowed = wanted || optional.contains(&name);
            if wanted && !set {
                return Err(format!("{} object is missing {name}", self.kind));
            }
            if set && !allowed {
                return Err(format!("{} object must not carry {name}", self.kind));
            }
        }
        if let Some(g) = &self.geometry {
            for v in [g.x, g.y, Some(g.width), Some(g.height)].into_iter().flatten() {
                if !v.is_finite() || v < 0.0 {
                    return Err(format!("{} geometry value {v} out of range", self.kind));
                }
            }
        }
        Ok(())
    }
}

/// Extractor-side color normalization: accepts `RRGGBB` or `AARRGGBB`
/// (leading alpha dropped), with or without `#`, returns six uppercase hex
/// digits. Anything else is unresolvable and reported as `None`.
pub fn normalize_rgb(raw: &str) -> Option<String> {
    let hex = raw.strip_prefix('#').unwrap_or(raw);
    let hex = match hex.len() {
        6 => hex,
        8 => &hex[2..],
        _ => return None,
    };
    if hex.chars().all(|c| c.is_ascii_hexdigit()) {
        Some(hex.to_ascii_uppercase())
    } else {
        None
    }
}

/// Serialize length fields as fixed four-decimal strings and insist on an
/// exact round-trip when reading them back.
mod len_serde {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::units::{fmt_len4, parse_len4};

    fn parse<'de, D: Deserializer<'de>>(s: &str) -> Result<f64, D::Error> {
        parse_len4(s).ok_or_else(|| {
            D::Error::custom(format!("length `{s}` is not in four-decimal form"))
        })
    }

    pub mod scalar {
        use super::*;

        pub fn serialize<S: Serializer>(v: &f64, ser: S) -> Result<S::Ok, S::Error> {
            ser.serialize_str(&fmt_len4(*v))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<f64, D::Error> {
            let s = String::deserialize(de)?;
            parse::<D>(&s)
        }
    }

    pub mod opt {
        use super::*;

        pub fn serialize<S: Serializer>(v: &Option<f64>, ser: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(v) => ser.serialize_some(&fmt_len4(*v)),
                None => ser.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Option<f64>, D::Error> {
            match Option::<String>::deserialize(de)? {
                Some(s) => parse::<D>(&s).map(Some),
                None => Ok(None),
            }
        }
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[f64], ser: S) -> Result<S::Ok, S::Error> {
            ser.collect_seq(v.iter().map(|x| fmt_len4(*x)))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<f64>, D::Error> {
            Vec::<String>::deserialize(de)?
                .iter()
                .map(|s| parse::<D>(s))
                .collect()
        }
    }
}
