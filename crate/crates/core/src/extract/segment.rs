use serde::{Deserialize, Serialize};

/// Half-open UTF-8 byte range into the paragraph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn slice<'a>(&self, text: &'a str) -> &'a str {
        &text[self.start..self.end]
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }
}

/// Words that end in a period without ending a sentence.
const ABBREVIATIONS: &[&str] = &[
    "e.g", "i.e", "approx", "ca", "cf", "vs", "fig", "figs", "ref", "refs", "eq", "eqs", "no", "calcd", "anal", "al",
    "resp", "wt", "vol", "mp", "bp", "temp",
];

fn guarded(word: &str) -> bool {
    let w = word.trim_start_matches(|c: char| !c.is_alphanumeric());
    let lower = w.to_lowercase();
    if ABBREVIATIONS.contains(&lower.as_str()) {
        return true;
    }
    // Initials and one-letter element symbols: "J. Smith", "of C. The".
    let mut chars = w.chars();
    matches!((chars.next(), chars.next()), (Some(c), None) if c.is_uppercase())
}

/// Splits a paragraph into sentence spans.
///
/// A sentence ends at `.`, `!` or `?` followed by whitespace and then a
/// character that is not lowercase, unless the word before a period is an
/// abbreviation or a single capital letter. Periods inside tokens (decimal
/// numbers, `N,N-dimethyl`) never split. The spans cover every
/// non-whitespace character exactly once.
pub fn segment_sentences(text: &str) -> Vec<Span> {
    let mut spans = Vec::new();
    let mut start: Option<usize> = None;
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    for (k, &(i, c)) in chars.iter().enumerate() {
        if start.is_none() {
            if c.is_whitespace() {
                continue;
            }
            start = Some(i);
        }
        if !matches!(c, '.' | '!' | '?') {
            continue;
        }
        let end = i + c.len_utf8();
        let next_is_space = chars.get(k + 1).map_or(true, |&(_, n)| n.is_whitespace());
        if !next_is_space {
            continue;
        }
        let next_visible = chars[k + 1..].iter().map(|&(_, n)| n).find(|n| !n.is_whitespace());
        if matches!(next_visible, Some(n) if n.is_lowercase()) {
            continue;
        }
        if c == '.' && next_visible.is_some() {
            let s = start.expect("inside a sentence");
            let word_start = text[s..i].rfind(char::is_whitespace).map_or(s, |p| s + p + 1);
            if guarded(&text[word_start..i]) {
                continue;
            }
        }
        spans.push(Span::new(start.take().expect("inside a sentence"), end));
    }
    if let Some(s) = start {
        let trimmed = text[s..].trim_end();
        spans.push(Span::new(s, s + trimmed.len()));
    }
    spans
}
