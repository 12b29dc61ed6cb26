use std::collections::{BTreeSet, HashMap};

use mofkg::extract::{bundled_corpus, extract_document, extract_solvents, Lexicon};

fn multiset_hits(gold: &[String], found: &[String]) -> usize {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for f in found {
        *counts.entry(f.as_str()).or_default() += 1;
    }
    gold.iter()
        .filter(|g| match counts.get_mut(g.as_str()) {
            Some(c) if *c > 0 => {
                *c -= 1;
                true
            }
            _ => false,
        })
        .count()
}

pub struct Recall {
    pub documents: usize,
    pub solvent: f64,
    pub action: f64,
}

/// Solvent recall counts each gold solvent of a document once; action recall
/// matches gold actions as a multiset.
pub fn corpus_recall(lex: &Lexicon) -> Recall {
    let corpus = bundled_corpus();
    let (mut solvent_hits, mut solvent_total, mut action_hits, mut action_total) = (0, 0, 0, 0);
    for doc in &corpus {
        let out = extract_document(&doc.doc_id, &doc.text, lex);
        let found: BTreeSet<&str> = out.solvents.iter().map(|m| m.canonical.as_str()).collect();
        solvent_hits += doc.gold.solvents.iter().filter(|s| found.contains(s.as_str())).count();
        solvent_total += doc.gold.solvents.len();
        let actions: Vec<String> = out
            .steps
            .iter()
            .flat_map(|s| s.all_actions())
            .map(str::to_owned)
            .collect();
        action_hits += multiset_hits(&doc.gold.actions, &actions);
        action_total += doc.gold.actions.len();
    }
    Recall {
        documents: corpus.len(),
        solvent: solvent_hits as f64 / solvent_total as f64,
        action: action_hits as f64 / action_total as f64,
    }
}

/// Surface forms that must appear in the corpus, with their canonical names.
pub const SURFACE_FORMS: [(&str, &str); 3] = [
    ("water", "water"),
    ("N,N-dimethyl formamide", "N,N-dimethylformamide"),
    ("DMF", "N,N-dimethylformamide"),
];

/// Surface forms that are missing from the corpus extractions or map to the
/// wrong canonical name.
pub fn surface_form_failures(lex: &Lexicon) -> Vec<String> {
    let mentions: Vec<_> = bundled_corpus()
        .iter()
        .flat_map(|d| extract_solvents(&d.text, lex))
        .collect();
    SURFACE_FORMS
        .iter()
        .filter(|(surface, canonical)| {
            let seen: Vec<_> = mentions.iter().filter(|m| m.surface == *surface).collect();
            seen.is_empty() || seen.iter().any(|m| m.canonical != *canonical)
        })
        .map(|(surface, _)| surface.to_string())
        .collect()
}
