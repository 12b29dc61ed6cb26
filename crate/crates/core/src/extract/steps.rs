use regex::{Captures, Regex};
use serde::{Deserialize, Serialize};

use super::lexicon::Lexicon;
use super::segment::{segment_sentences, Span};

/// A value with a unit. Ranges such as `100–120 °C` keep the midpoint and
/// set `range`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measure {
    pub value: f64,
    pub unit: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub range: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Argument {
    pub reagent: String,
    pub quantity: Option<Measure>,
}

/// One synthesis action, taken from one sentence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisStep {
    pub index: usize,
    /// Lemma of the first action verb in the sentence.
    pub action: String,
    /// Lemmas of any further action verbs in the same sentence, in order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub co_actions: Vec<String>,
    pub arguments: Vec<Argument>,
    pub temperature: Option<Measure>,
    pub duration: Option<Measure>,
    pub span: Span,
}

impl SynthesisStep {
    /// `action` followed by `co_actions`.
    pub fn all_actions(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.action.as_str()).chain(self.co_actions.iter().map(String::as_str))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub sentences: usize,
    /// Sentences without an action verb.
    pub skipped: usize,
}

const STOPWORDS: &[&str] = &[
    "a",
    "an",
    "the",
    "of",
    "in",
    "into",
    "to",
    "with",
    "and",
    "or",
    "was",
    "were",
    "is",
    "are",
    "then",
    "by",
    "for",
    "at",
    "from",
    "on",
    "containing",
    "under",
    "after",
    "before",
    "while",
    "using",
    "as",
];

fn is_stop(word: &str, lexicon: &Lexicon) -> bool {
    let w = word.trim_matches(|c: char| matches!(c, ',' | ';' | ':' | '.'));
    w.is_empty() || STOPWORDS.contains(&w.to_lowercase().as_str()) || lexicon.lemma(w).is_some()
}

fn measure(caps: &Captures<'_>, unit: String) -> Option<Measure> {
    let lo: f64 = caps.get(1)?.as_str().parse().ok()?;
    match caps.get(2).and_then(|m| m.as_str().parse::<f64>().ok()) {
        Some(hi) => Some(Measure {
            value: (lo + hi) / 2.0,
            unit,
            range: true,
        }),
        None => Some(Measure {
            value: lo,
            unit,
            range: false,
        }),
    }
}

/// Matches of `re` whose number does not start inside a word (`NO3`, `H2O`).
fn standalone<'t>(re: &Regex, text: &'t str) -> Vec<Captures<'t>> {
    re.captures_iter(text)
        .filter(|c| {
            let start = c.get(0).expect("whole match").start();
            !text[..start]
                .chars()
                .next_back()
                .is_some_and(|p| p.is_alphanumeric() || p == '.' || p == '_')
        })
        .collect()
}

fn normalize_temperature(unit: &str) -> String {
    if unit == "K" {
        "K".into()
    } else {
        "°C".into()
    }
}

fn normalize_duration(unit: &str) -> String {
    match unit.to_lowercase().as_str() {
        "min" | "mins" | "minute" | "minutes" => "min".into(),
        "d" | "day" | "days" => "d".into(),
        _ => "h".into(),
    }
}

/// Reagent words directly before byte offset `end`: up to four words, stopping
/// at a stopword, an action verb, or a clause boundary.
fn reagent_before(sentence: &str, end: usize, lexicon: &Lexicon) -> Option<String> {
    let before = sentence[..end].trim_end();
    let mut words: Vec<&str> = Vec::new();
    for w in before.split_whitespace().rev() {
        if words.len() == 4 || is_stop(w, lexicon) || w.ends_with(')') && w.starts_with('(') {
            break;
        }
        let clause_end = w.ends_with(',') || w.ends_with(';');
        if clause_end && !words.is_empty() {
            break;
        }
        words.push(w);
        if clause_end {
            break;
        }
    }
    words.reverse();
    let text = words.join(" ");
    let text = text.trim_matches(|c: char| matches!(c, ',' | ';' | ':'));
    (!text.is_empty()).then(|| text.to_owned())
}

/// Reagent words after `of`: up to four words, stopping at a stopword or
/// punctuation.
fn reagent_after_of(rest: &str, lexicon: &Lexicon) -> Option<String> {
    let rest = rest.trim_start();
    let rest = rest.strip_prefix("of ")?;
    let mut words = Vec::new();
    for w in rest.split_whitespace() {
        if words.len() == 4 || is_stop(w, lexicon) || w.starts_with('(') {
            break;
        }
        let ends = w.ends_with(',') || w.ends_with(';') || w.ends_with('.');
        words.push(w.trim_end_matches([',', ';', '.']));
        if ends {
            break;
        }
    }
    (!words.is_empty()).then(|| words.join(" "))
}

fn arguments(sentence: &str, lexicon: &Lexicon) -> Vec<Argument> {
    let mut found: Vec<(usize, Argument)> = Vec::new();
    for caps in standalone(&lexicon.quantity_re, sentence) {
        let whole = caps.get(0).expect("whole match");
        let unit = caps.get(3).expect("unit group").as_str().to_owned();
        let quantity = measure(&caps, unit);
        let before = sentence[..whole.start()].trim_end();
        let reagent = if before.ends_with('(') {
            // "Zn(NO3)2 (0.30 g)": reagent precedes the parenthesis.
            reagent_before(sentence, before.len() - 1, lexicon)
        } else {
            reagent_after_of(&sentence[whole.end()..], lexicon)
        };
        if let Some(reagent) = reagent {
            found.push((whole.start(), Argument { reagent, quantity }));
        }
    }
    found.sort_by_key(|(pos, _)| *pos);
    found.into_iter().map(|(_, a)| a).collect()
}

fn first_measure(re: &Regex, sentence: &str, normalize: fn(&str) -> String) -> Option<Measure> {
    standalone(re, sentence)
        .first()
        .and_then(|c| measure(c, normalize(c.get(3).expect("unit group").as_str())))
}

fn action_words<'a>(sentence: &str, lexicon: &'a Lexicon) -> Vec<&'a str> {
    sentence
        .split(|c: char| !c.is_alphabetic())
        .filter(|w| !w.is_empty())
        .filter_map(|w| lexicon.lemma(w))
        .collect()
}

/// One step per sentence that contains an action verb, in text order.
pub fn extract_steps_with_diagnostics(paragraph: &str, lexicon: &Lexicon) -> (Vec<SynthesisStep>, Diagnostics) {
    let sentences = segment_sentences(paragraph);
    let mut diagnostics = Diagnostics {
        sentences: sentences.len(),
        skipped: 0,
    };
    let mut steps = Vec::new();
    for span in sentences {
        let sentence = span.slice(paragraph);
        let mut actions = action_words(sentence, lexicon).into_iter().map(str::to_owned);
        let Some(action) = actions.next() else {
            diagnostics.skipped += 1;
            continue;
        };
        steps.push(SynthesisStep {
            index: steps.len(),
            action,
            co_actions: actions.collect(),
            arguments: arguments(sentence, lexicon),
            temperature: first_measure(&lexicon.temperature_re, sentence, normalize_temperature),
            duration: first_measure(&lexicon.duration_re, sentence, normalize_duration),
            span,
        });
    }
    (steps, diagnostics)
}

pub fn extract_steps(paragraph: &str, lexicon: &Lexicon) -> Vec<SynthesisStep> {
    extract_steps_with_diagnostics(paragraph, lexicon).0
}
