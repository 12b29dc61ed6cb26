use mofkg::ingest::{extract_crystal, parse_cif, AtomSite, CrystalError, CrystalRecord};
use proptest::prelude::*;

use super::fixture_dir;

#[derive(Debug)]
pub enum Expect {
    Record { refcode: &'static str, atoms: usize },
    Syntax { line: usize },
    Crystal(fn(&CrystalError) -> bool),
}

pub fn corpus() -> Vec<(&'static str, Expect)> {
    use Expect::*;
    vec![
        (
            "mof5_cubic.cif",
            Record {
                refcode: "SAHYIK",
                atoms: 4,
            },
        ),
        (
            "uncertainties.cif",
            Record {
                refcode: "HKUST1",
                atoms: 2,
            },
        ),
        (
            "quoting_and_text.cif",
            Record {
                refcode: "QUOTED",
                atoms: 2,
            },
        ),
        (
            "crlf_hexagonal.cif",
            Record {
                refcode: "CRLF1",
                atoms: 1,
            },
        ),
        (
            "two_blocks.cif",
            Record {
                refcode: "FIRST",
                atoms: 0,
            },
        ),
        (
            "unknown_tags.cif",
            Record {
                refcode: "EXTRA",
                atoms: 0,
            },
        ),
        (
            "save_frame.cif",
            Record {
                refcode: "FRAMED",
                atoms: 0,
            },
        ),
        ("err_unterminated_quote.cif", Syntax { line: 3 }),
        ("err_loop_arity.cif", Syntax { line: 7 }),
        ("err_value_before_block.cif", Syntax { line: 2 }),
        ("err_unterminated_text.cif", Syntax { line: 3 }),
        (
            "err_missing_cell.cif",
            Crystal(|e| matches!(e, CrystalError::MissingField(t) if t == "_cell_length_a")),
        ),
        (
            "err_bad_number.cif",
            Crystal(|e| matches!(e, CrystalError::NumericParseError { value, .. } if value == "ten")),
        ),
        (
            "err_angle_range.cif",
            Crystal(|e| matches!(e, CrystalError::OutOfRange { .. })),
        ),
    ]
}

/// Parses every fixture file and checks it against its expectation: a
/// record with the right refcode and atom count, a syntax error on the
/// right line, or the right extraction error. Returns the file count.
pub fn check_corpus() -> Result<usize, String> {
    let dir = fixture_dir("cif");
    let on_disk = std::fs::read_dir(&dir).map_err(|e| e.to_string())?.count();
    let expected = corpus();
    if on_disk != expected.len() {
        return Err(format!("{on_disk} fixture files but {} expectations", expected.len()));
    }
    for (name, expect) in &expected {
        let text = std::fs::read_to_string(dir.join(name)).map_err(|e| format!("{name}: {e}"))?;
        let outcome = match (expect, parse_cif(&text)) {
            (Expect::Syntax { line }, Err(e)) if e.line == *line => Ok(()),
            (_, Err(e)) => Err(format!("unexpected syntax error {e}")),
            (Expect::Syntax { .. }, Ok(_)) => Err("expected a syntax error".to_owned()),
            (_, Ok(doc)) if doc.lines != text.lines().count() => Err("not every line consumed".to_owned()),
            (_, Ok(doc)) => match (expect, extract_crystal(&doc)) {
                (Expect::Record { refcode, atoms }, Ok(rec))
                    if rec.refcode == *refcode && rec.atoms.len() == *atoms =>
                {
                    Ok(())
                }
                (Expect::Crystal(check), Err(e)) if check(&e) => Ok(()),
                (_, other) => Err(format!("unexpected {other:?}")),
            },
        };
        outcome.map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(expected.len())
}

fn element() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["C", "H", "O", "N", "Zn", "Cu", "Co", "Zr", "Mg", "Cl"]).prop_map(str::to_owned)
}

pub fn crystal_record() -> impl Strategy<Value = CrystalRecord> {
    let atom = (
        "[A-Z][a-z]?[0-9]{1,3}( [a-z])?",
        element(),
        -1.0f64..2.0,
        -1.0f64..2.0,
        -1.0f64..2.0,
    )
        .prop_map(|(label, element, x, y, z)| AtomSite {
            label,
            element,
            x,
            y,
            z,
        });
    (
        "[A-Z]{4,6}[0-9]{0,2}",
        prop::array::uniform3(0.5f64..80.0),
        prop::array::uniform3(1.0f64..179.0),
        prop::collection::vec((element(), 1u32..40), 1..5),
        prop::collection::vec(atom, 0..8),
    )
        .prop_map(|(refcode, lengths, angles, formula, atoms)| CrystalRecord {
            refcode,
            lengths,
            angles,
            formula: formula
                .iter()
                .map(|(e, n)| format!("{e}{n}"))
                .collect::<Vec<_>>()
                .join(" "),
            atoms,
        })
}
