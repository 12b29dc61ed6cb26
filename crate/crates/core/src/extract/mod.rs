//! Rule-based extraction from synthesis paragraphs: sentence segmentation,
//! action steps with quantities, temperatures and durations, and solvent
//! mentions resolved against a dictionary.

mod corpus;
mod fragments;
mod lexicon;
mod segment;
mod solvents;
mod steps;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use corpus::{bundled_corpus, GoldAnnotation, GoldDocument};
pub use fragments::{to_graph_fragments, TEXT_SOURCE};
pub use lexicon::{ActionEntry, Lexicon, LexiconFile, SolventEntry, UnitTables};
pub use segment::{segment_sentences, Span};
pub use solvents::{extract_solvents, SolventMention};
pub use steps::{extract_steps, extract_steps_with_diagnostics, Argument, Diagnostics, Measure, SynthesisStep};

use crate::graph::GraphError;

#[derive(Debug, Error, PartialEq)]
pub enum ExtractError {
    #[error("invalid lexicon: {0}")]
    Lexicon(String),
    #[error("no MOF node with refcode `{0}`")]
    UnknownMof(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Everything extracted from one paragraph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentExtraction {
    pub doc_id: String,
    pub steps: Vec<SynthesisStep>,
    pub solvents: Vec<SolventMention>,
    pub diagnostics: Diagnostics,
}

pub fn extract_document(doc_id: &str, paragraph: &str, lexicon: &Lexicon) -> DocumentExtraction {
    let (steps, diagnostics) = extract_steps_with_diagnostics(paragraph, lexicon);
    DocumentExtraction {
        doc_id: doc_id.to_owned(),
        steps,
        solvents: extract_solvents(paragraph, lexicon),
        diagnostics,
    }
}
