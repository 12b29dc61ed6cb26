use std::collections::{BTreeMap, HashMap};

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::ExtractError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionEntry {
    pub lemma: String,
    pub variants: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolventEntry {
    pub canonical: String,
    #[serde(default)]
    pub synonyms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct UnitTables {
    #[serde(default)]
    pub volume: Vec<String>,
    #[serde(default)]
    pub mass: Vec<String>,
    #[serde(default)]
    pub amount: Vec<String>,
    #[serde(default)]
    pub temperature: Vec<String>,
    #[serde(default)]
    pub duration: Vec<String>,
}

/// Lexicon file layout: `{actions, solvents, units}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LexiconFile {
    pub actions: Vec<ActionEntry>,
    pub solvents: Vec<SolventEntry>,
    #[serde(default)]
    pub units: UnitTables,
}

/// Action verbs, solvent dictionary and unit tables, with the matchers
/// compiled from them.
#[derive(Debug, Clone)]
pub struct Lexicon {
    file: LexiconFile,
    verbs: HashMap<String, String>,
    /// `(lowercase surface form, canonical)`, longest first.
    surface_forms: Vec<(String, String)>,
    pub(super) quantity_re: Regex,
    pub(super) temperature_re: Regex,
    pub(super) duration_re: Regex,
}

/// Number with an optional range: `120`, `0.30`, `100–120`, `3 to 5`.
const NUMBER: &str = r"(\d+(?:\.\d+)?)(?:\s*(?:–|—|-|~|to)\s*(\d+(?:\.\d+)?))?";

fn unit_regex(units: &[String]) -> Result<Regex, ExtractError> {
    let mut sorted: Vec<&String> = units.iter().collect();
    sorted.sort_by_key(|u| std::cmp::Reverse(u.chars().count()));
    let alts: Vec<String> = sorted.iter().map(|u| regex::escape(u)).collect();
    let pattern = if alts.is_empty() {
        // Matches nothing.
        r"[^\s\S]".to_owned()
    } else {
        format!(r"{NUMBER}\s*({})(?:\b|$)", alts.join("|"))
    };
    Regex::new(&pattern).map_err(|e| ExtractError::Lexicon(e.to_string()))
}

impl Lexicon {
    pub fn new(file: LexiconFile) -> Result<Self, ExtractError> {
        let mut verbs = HashMap::new();
        for a in &file.actions {
            for v in std::iter::once(&a.lemma).chain(&a.variants) {
                let key = v.to_lowercase();
                if let Some(prev) = verbs.insert(key, a.lemma.clone()) {
                    if prev != a.lemma {
                        return Err(ExtractError::Lexicon(format!(
                            "verb form `{v}` belongs to both `{prev}` and `{}`",
                            a.lemma
                        )));
                    }
                }
            }
        }
        let mut owner: BTreeMap<String, String> = BTreeMap::new();
        for s in &file.solvents {
            for form in std::iter::once(&s.canonical).chain(&s.synonyms) {
                let key = form.to_lowercase();
                if key.trim().is_empty() {
                    return Err(ExtractError::Lexicon(format!("empty synonym for `{}`", s.canonical)));
                }
                match owner.get(&key) {
                    Some(prev) if prev != &s.canonical => {
                        return Err(ExtractError::Lexicon(format!(
                            "synonym `{form}` belongs to both `{prev}` and `{}`",
                            s.canonical
                        )));
                    }
                    _ => {
                        owner.insert(key, s.canonical.clone());
                    }
                }
            }
        }
        let mut surface_forms: Vec<(String, String)> = owner.into_iter().collect();
        surface_forms.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));

        let mut quantity_units = file.units.volume.clone();
        quantity_units.extend(file.units.mass.iter().cloned());
        quantity_units.extend(file.units.amount.iter().cloned());
        Ok(Lexicon {
            quantity_re: unit_regex(&quantity_units)?,
            temperature_re: unit_regex(&file.units.temperature)?,
            duration_re: unit_regex(&file.units.duration)?,
            file,
            verbs,
            surface_forms,
        })
    }

    /// The bundled seed lexicon: 20 synthesis actions, common MOF solvents
    /// and unit tables.
    pub fn seed() -> Self {
        Lexicon::from_json(include_str!("../../data/lexicon.json")).expect("bundled lexicon is valid")
    }

    pub fn from_json(text: &str) -> Result<Self, ExtractError> {
        let file: LexiconFile = serde_json::from_str(text).map_err(|e| ExtractError::Lexicon(e.to_string()))?;
        Lexicon::new(file)
    }

    pub fn file(&self) -> &LexiconFile {
        &self.file
    }

    /// Lemma for a (case-insensitive) verb form.
    pub fn lemma(&self, word: &str) -> Option<&str> {
        self.verbs.get(&word.to_lowercase()).map(String::as_str)
    }

    pub(super) fn surface_forms(&self) -> &[(String, String)] {
        &self.surface_forms
    }

    /// Canonical solvent for a surface form, ignoring case.
    pub fn canonical_solvent(&self, surface: &str) -> Option<&str> {
        let key = surface.to_lowercase();
        self.surface_forms
            .iter()
            .find(|(s, _)| *s == key)
            .map(|(_, c)| c.as_str())
    }

    /// Returns a lexicon with one more solvent synonym, creating the canonical
    /// entry when it does not exist.
    pub fn with_synonym(&self, canonical: &str, synonym: &str) -> Result<Self, ExtractError> {
        let mut file = self.file.clone();
        match file.solvents.iter_mut().find(|s| s.canonical == canonical) {
            Some(entry) => entry.synonyms.push(synonym.to_owned()),
            None => file.solvents.push(SolventEntry {
                canonical: canonical.to_owned(),
                synonyms: vec![synonym.to_owned()],
            }),
        }
        Lexicon::new(file)
    }
}
