use regex::RegexBuilder;
use serde::{Deserialize, Serialize};

use super::lexicon::Lexicon;
use super::segment::Span;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolventMention {
    pub canonical: String,
    /// Verbatim paragraph text at `span`.
    pub surface: String,
    pub span: Span,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

fn bounded(text: &str, start: usize, end: usize) -> bool {
    let before = text[..start].chars().next_back();
    let after = text[end..].chars().next();
    !before.is_some_and(is_word_char) && !after.is_some_and(is_word_char)
}

/// Dictionary matching of solvent synonyms, ignoring case and respecting word
/// boundaries. Overlapping candidates resolve to the longer surface form
/// (earlier start on ties). Mentions are returned in text order.
pub fn extract_solvents(paragraph: &str, lexicon: &Lexicon) -> Vec<SolventMention> {
    let mut candidates: Vec<(Span, &str)> = Vec::new();
    for (form, canonical) in lexicon.surface_forms() {
        let re = RegexBuilder::new(&regex::escape(form))
            .case_insensitive(true)
            .build()
            .expect("escaped literal");
        let mut from = 0;
        while let Some(m) = re.find_at(paragraph, from) {
            if bounded(paragraph, m.start(), m.end()) {
                candidates.push((Span::new(m.start(), m.end()), canonical));
            }
            from = m.start() + paragraph[m.start()..].chars().next().map_or(1, char::len_utf8);
        }
    }
    candidates.sort_by(|(a, _), (b, _)| (b.end - b.start).cmp(&(a.end - a.start)).then(a.start.cmp(&b.start)));

    let mut chosen: Vec<(Span, &str)> = Vec::new();
    for (span, canonical) in candidates {
        if chosen.iter().all(|(s, _)| !s.overlaps(&span)) {
            chosen.push((span, canonical));
        }
    }
    chosen.sort_by_key(|(s, _)| s.start);
    chosen
        .into_iter()
        .map(|(span, canonical)| SolventMention {
            canonical: canonical.to_owned(),
            surface: span.slice(paragraph).to_owned(),
            span,
        })
        .collect()
}
