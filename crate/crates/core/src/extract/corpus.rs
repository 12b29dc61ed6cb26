use serde::{Deserialize, Serialize};

/// Hand annotations for one paragraph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldAnnotation {
    /// Canonical solvent names, once each.
    pub solvents: Vec<String>,
    /// Action lemmas in text order, repeated when an action recurs.
    pub actions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldDocument {
    pub doc_id: String,
    pub refcode: String,
    pub text: String,
    pub gold: GoldAnnotation,
}

/// Ten annotated synthesis paragraphs shipped with the crate.
pub fn bundled_corpus() -> Vec<GoldDocument> {
    serde_json::from_str(include_str!("../../data/synthesis_corpus.json")).expect("bundled corpus is valid")
}
