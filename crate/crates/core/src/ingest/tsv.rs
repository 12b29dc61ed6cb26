use thiserror::Error;

use crate::graph::{TextTriple, Triple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: expected `head<TAB>relation<TAB>tail`, found {fields} field(s)")]
pub struct FormatError {
    pub line: usize,
    pub fields: usize,
}

/// Reads `head<TAB>relation<TAB>tail` lines; blank lines and `#` comments
/// are skipped and order is preserved.
pub fn load_triples_tsv(text: &str) -> Result<Vec<TextTriple>, FormatError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(FormatError {
                line: i + 1,
                fields: fields.len(),
            });
        }
        out.push(Triple::new(
            fields[0].to_owned(),
            fields[1].to_owned(),
            fields[2].to_owned(),
        ));
    }
    Ok(out)
}

pub fn write_triples_tsv(triples: &[TextTriple]) -> String {
    triples
        .iter()
        .map(|t| format!("{}\t{}\t{}\n", t.head, t.relation, t.tail))
        .collect()
}
