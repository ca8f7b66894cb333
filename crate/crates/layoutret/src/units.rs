//! Length conversions between the raw units found in OOXML markup and the
//! canonical units used everywhere else in this crate: centimeters for
//! geometry, typographic points for font sizes.
//!
//! All lengths that enter the system are quantized to a 1/10000 grid
//! ([`round4`]) so that equality checks, serialization, and score
//! normalization agree on one canonical value per length.

use serde::{Deserialize, Serialize};

/// English Metric Units per centimeter (914400 EMU/inch ÷ 2.54).
pub const EMU_PER_CM: f64 = 360_000.0;

/// Twentieths of a point per inch.
pub const TWIPS_PER_INCH: f64 = 1_440.0;

/// Centimeters per inch.
pub const CM_PER_INCH: f64 = 2.54;

/// A raw length unit as it appears in OOXML attribute values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceUnit {
    /// English Metric Units (drawing geometry, slide sizes, image extents).
    Emu,
    /// Twentieths of a point (wordprocessing page sizes and margins).
    Twip,
    /// Half points (`w:sz` font sizes in wordprocessing markup).
    HalfPoint,
    /// Hundredths of a point (`sz` font sizes in drawing markup).
    CentiPoint,
    /// Typographic points (spreadsheet font sizes, already in points).
    Point,
}

/// Converts a raw OOXML length to the canonical unit for its kind:
/// centimeters for `Emu`/`Twip`, points for the font-size units.
///
/// The result is quantized to the 1/10000 grid.
pub fn convert_length(raw: f64, unit: SourceUnit) -> f64 {
    let v = match unit {
        SourceUnit::Emu => raw / EMU_PER_CM,
        SourceUnit::Twip => raw * CM_PER_INCH / TWIPS_PER_INCH,
        SourceUnit::HalfPoint => raw / 2.0,
        SourceUnit::CentiPoint => raw / 100.0,
        SourceUnit::Point => raw,
    };
    round4(v)
}

/// EMU to centimeters, quantized.
pub fn emu_to_cm(emu: i64) -> f64 {
    convert_length(emu as f64, SourceUnit::Emu)
}

/// Twips to centimeters, quantized.
pub fn twip_to_cm(twip: i64) -> f64 {
    convert_length(twip as f64, SourceUnit::Twip)
}

/// Half points to points, quantized.
pub fn half_point_to_pt(hp: i64) -> f64 {
    convert_length(hp as f64, SourceUnit::HalfPoint)
}

/// Inches to centimeters, quantized. Used when a query arrives in inches.
pub fn inch_to_cm(inch: f64) -> f64 {
    round4(inch * CM_PER_INCH)
}

/// Rounds to four fractional digits, half away from zero.
///
/// The result is the double nearest to the decimal `n/10000`, i.e. exactly
/// the value a reader gets back from parsing the serialized string form.
pub fn round4(x: f64) -> f64 {
    (x * 10_000.0).round() / 10_000.0
}

/// Snaps a value onto the 1/10000 grid only when it already sits within
/// floating-point noise of a grid point; leaves everything else untouched.
///
/// Differences of two grid values (e.g. `142.24 - 19.05`) land a few ulps
/// off the decimal they represent; this restores the exact decimal without
/// disturbing genuinely off-grid values.
pub fn snap4(x: f64) -> f64 {
    let scaled = x * 10_000.0;
    let nearest = scaled.round();
    if (scaled - nearest).abs() <= 1e-9 {
        nearest / 10_000.0
    } else {
        x
    }
}

/// Renders a length with exactly four fractional digits, the on-disk form.
pub fn fmt_len4(x: f64) -> String {
    format!("{x:.4}")
}

/// Parses the four-digit on-disk form, insisting on an exact round-trip so
/// that precision drift in a feature database is caught at load time.
pub fn parse_len4(s: &str) -> Option<f64> {
    let v: f64 = s.parse().ok()?;
    if v.is_finite() && fmt_len4(v) == s { Some(v) } else { None }
}

/// Renders a value the way reports display lengths and scores: two
/// decimals, half away from zero (so 0.625 displays as 0.63).
pub fn fmt2(x: f64) -> String {
    format!("{:.2}", (x * 100.0).round() / 100.0)
}
