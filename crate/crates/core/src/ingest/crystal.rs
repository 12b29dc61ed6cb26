use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::cif::{CifBlock, CifDocument};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CrystalError {
    #[error("document has no data block")]
    EmptyDocument,
    #[error("missing field `{0}`")]
    MissingField(String),
    #[error("cannot parse `{value}` in `{tag}` as a number")]
    NumericParseError { tag: String, value: String },
    #[error("field `{tag}` out of range: {reason}")]
    OutOfRange { tag: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomSite {
    pub label: String,
    pub element: String,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Unit cell, formula and atom sites of one crystal structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrystalRecord {
    pub refcode: String,
    /// Cell lengths a, b, c in ångström.
    pub lengths: [f64; 3],
    /// Cell angles alpha, beta, gamma in degrees.
    pub angles: [f64; 3],
    pub formula: String,
    pub atoms: Vec<AtomSite>,
}

const LENGTH_TAGS: [&str; 3] = ["_cell_length_a", "_cell_length_b", "_cell_length_c"];
const ANGLE_TAGS: [&str; 3] = ["_cell_angle_alpha", "_cell_angle_beta", "_cell_angle_gamma"];
const FORMULA_TAG: &str = "_chemical_formula_sum";

/// Parses a CIF number, dropping a trailing standard uncertainty:
/// `"10.123(4)"` reads as `10.123`.
pub fn parse_cif_number(text: &str) -> Option<f64> {
    let t = text.trim();
    let t = match t.find('(') {
        Some(open) if t.ends_with(')') && t[open + 1..t.len() - 1].bytes().all(|b| b.is_ascii_digit()) => &t[..open],
        Some(_) => return None,
        None => t,
    };
    if t.is_empty() || t == "?" || t == "." {
        return None;
    }
    t.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn number(block: &CifBlock, tag: &str) -> Result<f64, CrystalError> {
    let raw = block
        .item(tag)
        .ok_or_else(|| CrystalError::MissingField(tag.to_owned()))?;
    parse_cif_number(raw).ok_or_else(|| CrystalError::NumericParseError {
        tag: tag.to_owned(),
        value: raw.to_owned(),
    })
}

fn valid_element(symbol: &str) -> bool {
    let b = symbol.as_bytes();
    match b.len() {
        1 => b[0].is_ascii_uppercase(),
        2 => b[0].is_ascii_uppercase() && b[1].is_ascii_lowercase(),
        _ => false,
    }
}

/// Element symbol from a site label such as `Zn1` or `O2A`.
fn element_from_label(label: &str) -> String {
    let mut chars = label.chars();
    let mut out = String::new();
    if let Some(c) = chars.next() {
        out.push(c.to_ascii_uppercase());
    }
    if let Some(c) = chars.next() {
        if c.is_ascii_lowercase() {
            out.push(c);
        }
    }
    out
}

/// Reads the crystal record from the first data block.
pub fn extract_crystal(doc: &CifDocument) -> Result<CrystalRecord, CrystalError> {
    let block = doc.blocks.first().ok_or(CrystalError::EmptyDocument)?;
    let mut lengths = [0.0; 3];
    for (slot, tag) in lengths.iter_mut().zip(LENGTH_TAGS) {
        *slot = number(block, tag)?;
        if *slot <= 0.0 {
            return Err(CrystalError::OutOfRange {
                tag: tag.to_owned(),
                reason: "cell lengths must be positive".into(),
            });
        }
    }
    let mut angles = [0.0; 3];
    for (slot, tag) in angles.iter_mut().zip(ANGLE_TAGS) {
        *slot = number(block, tag)?;
        if !(*slot > 0.0 && *slot < 180.0) {
            return Err(CrystalError::OutOfRange {
                tag: tag.to_owned(),
                reason: "cell angles must lie in (0, 180)".into(),
            });
        }
    }
    let formula = block
        .item(FORMULA_TAG)
        .ok_or_else(|| CrystalError::MissingField(FORMULA_TAG.to_owned()))?
        .to_owned();

    let mut atoms = Vec::new();
    if let Some(sites) = block.loop_with("_atom_site_label") {
        let col = |tag: &str| {
            sites
                .column(tag)
                .ok_or_else(|| CrystalError::MissingField(tag.to_owned()))
        };
        let label_col = col("_atom_site_label")?;
        let symbol_col = sites.column("_atom_site_type_symbol");
        let coord_cols = [
            col("_atom_site_fract_x")?,
            col("_atom_site_fract_y")?,
            col("_atom_site_fract_z")?,
        ];
        let coord_tags = ["_atom_site_fract_x", "_atom_site_fract_y", "_atom_site_fract_z"];
        for row in &sites.rows {
            let label = row[label_col].clone();
            let element = match symbol_col {
                Some(c) => row[c].clone(),
                None => element_from_label(&label),
            };
            if !valid_element(&element) {
                return Err(CrystalError::OutOfRange {
                    tag: "_atom_site_type_symbol".into(),
                    reason: format!("`{element}` is not an element symbol"),
                });
            }
            let mut xyz = [0.0; 3];
            for ((slot, &c), tag) in xyz.iter_mut().zip(&coord_cols).zip(coord_tags) {
                *slot = parse_cif_number(&row[c]).ok_or_else(|| CrystalError::NumericParseError {
                    tag: tag.to_owned(),
                    value: row[c].clone(),
                })?;
            }
            atoms.push(AtomSite {
                label,
                element,
                x: xyz[0],
                y: xyz[1],
                z: xyz[2],
            });
        }
    }

    Ok(CrystalRecord {
        refcode: block.name.clone(),
        lengths,
        angles,
        formula,
        atoms,
    })
}

fn quote(value: &str) -> String {
    let bare = !value.is_empty()
        && !value.contains(|c: char| c.is_whitespace())
        && !value.starts_with(['_', '#', '$', '\'', '"', ';', '[', ']'])
        && !["loop_", "stop_", "global_"].contains(&value.to_ascii_lowercase().as_str())
        && !value.to_ascii_lowercase().starts_with("data_")
        && !value.to_ascii_lowercase().starts_with("save_");
    if bare {
        value.to_owned()
    } else if !value.contains('\n') && !value.contains("' ") && !value.ends_with('\'') {
        format!("'{value}'")
    } else if !value.contains('\n') && !value.contains("\" ") && !value.ends_with('"') {
        format!("\"{value}\"")
    } else {
        format!("\n;\n{value}\n;")
    }
}

/// Writes a record as CIF using the tags [`extract_crystal`] reads.
/// Reals are written in shortest round-trip form, so the output parses back
/// to an identical record.
pub fn render_crystal(record: &CrystalRecord) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "data_{}", record.refcode);
    for (tag, v) in LENGTH_TAGS.iter().zip(record.lengths) {
        let _ = writeln!(out, "{tag} {v:?}");
    }
    for (tag, v) in ANGLE_TAGS.iter().zip(record.angles) {
        let _ = writeln!(out, "{tag} {v:?}");
    }
    let _ = writeln!(out, "{FORMULA_TAG} {}", quote(&record.formula));
    if !record.atoms.is_empty() {
        out.push_str("loop_\n_atom_site_label\n_atom_site_type_symbol\n_atom_site_fract_x\n_atom_site_fract_y\n_atom_site_fract_z\n");
        for a in &record.atoms {
            let _ = writeln!(out, "{} {} {:?} {:?} {:?}", quote(&a.label), a.element, a.x, a.y, a.z);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::cif::parse_cif;

    const CUBIC: &str = "data_CUBIC1
_cell_length_a 10.0
_cell_length_b 10.0
_cell_length_c 10.0
_cell_angle_alpha 90
_cell_angle_beta 90
_cell_angle_gamma 90
_chemical_formula_sum 'C24 H12 O13 Zn4'
loop_
_atom_site_label
_atom_site_type_symbol
_atom_site_fract_x
_atom_site_fract_y
_atom_site_fract_z
Zn1 Zn 0.2934(2) 0.2066(2) 0.2066(2)
O1 O 0.25 0.25 0.25
";

    #[test]
    fn cubic_cell() {
        let rec = extract_crystal(&parse_cif(CUBIC).unwrap()).unwrap();
        assert_eq!(rec.refcode, "CUBIC1");
        assert_eq!(rec.lengths, [10.0; 3]);
        assert_eq!(rec.angles, [90.0; 3]);
        assert_eq!(rec.formula, "C24 H12 O13 Zn4");
        assert_eq!(rec.atoms.len(), 2);
        assert_eq!(rec.atoms[0].x, 0.2934);
    }

    #[test]
    fn uncertainty_is_stripped() {
        assert_eq!(parse_cif_number("10.123(4)"), Some(10.123));
        assert_eq!(parse_cif_number("7"), Some(7.0));
        assert_eq!(parse_cif_number("?"), None);
        assert_eq!(parse_cif_number("1.0(x)"), None);
        assert_eq!(parse_cif_number("abc"), None);
    }

    #[test]
    fn missing_and_bad_fields() {
        let no_a = CUBIC.replace("_cell_length_a 10.0\n", "");
        assert_eq!(
            extract_crystal(&parse_cif(&no_a).unwrap()),
            Err(CrystalError::MissingField("_cell_length_a".into()))
        );
        let bad = CUBIC.replace("_cell_length_b 10.0", "_cell_length_b ten");
        assert!(matches!(
            extract_crystal(&parse_cif(&bad).unwrap()),
            Err(CrystalError::NumericParseError { .. })
        ));
        let flat = CUBIC.replace("_cell_angle_beta 90", "_cell_angle_beta 180");
        assert!(matches!(
            extract_crystal(&parse_cif(&flat).unwrap()),
            Err(CrystalError::OutOfRange { .. })
        ));
    }

    #[test]
    fn render_round_trip() {
        let rec = extract_crystal(&parse_cif(CUBIC).unwrap()).unwrap();
        let again = extract_crystal(&parse_cif(&render_crystal(&rec)).unwrap()).unwrap();
        assert_eq!(again, rec);
    }

    #[test]
    fn element_inferred_from_label() {
        assert_eq!(element_from_label("Zn1"), "Zn");
        assert_eq!(element_from_label("O2A"), "O");
        assert_eq!(element_from_label("c3"), "C");
    }
}
