use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::value::ScalarKind;
use super::GraphError;

/// A declared relation: name plus the labels its endpoints must carry.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RelationSignature {
    pub relation: String,
    pub source: String,
    pub target: String,
}

impl RelationSignature {
    pub fn new(relation: &str, source: &str, target: &str) -> Self {
        RelationSignature {
            relation: relation.to_owned(),
            source: source.to_owned(),
            target: target.to_owned(),
        }
    }
}

/// Labels, relation signatures and per-label required properties.
///
/// Every label also has a key property whose text value identifies a node
/// uniquely within that label. It defaults to the first required property.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSchema {
    labels: BTreeSet<String>,
    signatures: BTreeSet<RelationSignature>,
    required: BTreeMap<String, Vec<(String, ScalarKind)>>,
    key_props: BTreeMap<String, String>,
}

/// On-disk schema file layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchemaFile {
    pub labels: Vec<String>,
    /// `[relation, source label, target label]` triplets.
    pub relations: Vec<(String, String, String)>,
    #[serde(default)]
    pub required_props: BTreeMap<String, Vec<(String, ScalarKind)>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub key_props: BTreeMap<String, String>,
}

pub const HAS_SOLVENT: &str = "HAS_SOLVENT";
pub const PUBLISHED_IN: &str = "PUBLISHED_IN";
pub const AUTHORED_BY: &str = "AUTHORED_BY";
pub const DESCRIBES: &str = "DESCRIBES";
pub const HAS_ATOM: &str = "HAS_ATOM";
pub const HAS_BOND: &str = "HAS_BOND";

impl GraphSchema {
    pub fn new() -> Self {
        GraphSchema {
            labels: BTreeSet::new(),
            signatures: BTreeSet::new(),
            required: BTreeMap::new(),
            key_props: BTreeMap::new(),
        }
    }

    /// The MOF-KG backbone: MOFs, their solvents, atomic composition and the
    /// publication area (publications, authors, journals).
    pub fn mof_default() -> Self {
        let mut s = GraphSchema::new();
        let keyed = [
            ("MOF", "refcode"),
            ("Solvent", "name"),
            ("Author", "name"),
            ("Journal", "name"),
            ("Publication", "doi"),
            ("Atom", "symbol"),
            ("Bond", "key"),
        ];
        for (label, key) in keyed {
            s.add_label(label);
            s.require(label, key, ScalarKind::Text).expect("label just added");
        }
        let sigs = [
            (HAS_SOLVENT, "MOF", "Solvent"),
            (PUBLISHED_IN, "Publication", "Journal"),
            (AUTHORED_BY, "Publication", "Author"),
            (DESCRIBES, "Publication", "MOF"),
            (HAS_ATOM, "MOF", "Atom"),
            (HAS_BOND, "MOF", "Bond"),
        ];
        for (r, a, b) in sigs {
            s.add_signature(r, a, b).expect("labels declared above");
        }
        s
    }

    pub fn add_label(&mut self, label: &str) -> bool {
        self.labels.insert(label.to_owned())
    }

    pub fn add_signature(&mut self, relation: &str, source: &str, target: &str) -> Result<(), GraphError> {
        for l in [source, target] {
            if !self.labels.contains(l) {
                return Err(GraphError::UnknownLabel(l.to_owned()));
            }
        }
        if !self.signatures.insert(RelationSignature::new(relation, source, target)) {
            return Err(GraphError::InvalidSchema(format!(
                "duplicate relation signature {relation}({source}->{target})"
            )));
        }
        Ok(())
    }

    pub fn require(&mut self, label: &str, key: &str, kind: ScalarKind) -> Result<(), GraphError> {
        if !self.labels.contains(label) {
            return Err(GraphError::UnknownLabel(label.to_owned()));
        }
        let reqs = self.required.entry(label.to_owned()).or_default();
        if !reqs.iter().any(|(k, _)| k == key) {
            reqs.push((key.to_owned(), kind));
        }
        Ok(())
    }

    pub fn set_key_property(&mut self, label: &str, prop: &str) -> Result<(), GraphError> {
        if !self.labels.contains(label) {
            return Err(GraphError::UnknownLabel(label.to_owned()));
        }
        self.key_props.insert(label.to_owned(), prop.to_owned());
        Ok(())
    }

    pub fn has_label(&self, label: &str) -> bool {
        self.labels.contains(label)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(String::as_str)
    }

    pub fn signatures(&self) -> impl Iterator<Item = &RelationSignature> {
        self.signatures.iter()
    }

    pub fn has_relation(&self, relation: &str) -> bool {
        self.signatures.iter().any(|s| s.relation == relation)
    }

    pub fn allows(&self, relation: &str, source: &str, target: &str) -> bool {
        self.signatures
            .contains(&RelationSignature::new(relation, source, target))
    }

    pub fn required_props(&self, label: &str) -> &[(String, ScalarKind)] {
        self.required.get(label).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Property whose text value keys nodes of `label`.
    pub fn key_property(&self, label: &str) -> &str {
        if let Some(k) = self.key_props.get(label) {
            return k;
        }
        self.required_props(label)
            .first()
            .map(|(k, _)| k.as_str())
            .unwrap_or("key")
    }

    pub fn from_file(file: &SchemaFile) -> Result<Self, GraphError> {
        let mut s = GraphSchema::new();
        for l in &file.labels {
            if !s.add_label(l) {
                return Err(GraphError::InvalidSchema(format!("duplicate label {l}")));
            }
        }
        for (r, a, b) in &file.relations {
            s.add_signature(r, a, b)?;
        }
        for (label, reqs) in &file.required_props {
            for (k, kind) in reqs {
                s.require(label, k, *kind)?;
            }
        }
        for (label, prop) in &file.key_props {
            s.set_key_property(label, prop)?;
        }
        Ok(s)
    }

    pub fn to_file(&self) -> SchemaFile {
        SchemaFile {
            labels: self.labels.iter().cloned().collect(),
            relations: self
                .signatures
                .iter()
                .map(|s| (s.relation.clone(), s.source.clone(), s.target.clone()))
                .collect(),
            required_props: self.required.clone(),
            key_props: self.key_props.clone(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let file: SchemaFile = serde_json::from_str(text).map_err(|e| GraphError::InvalidSchema(e.to_string()))?;
        GraphSchema::from_file(&file)
    }
}

impl Default for GraphSchema {
    fn default() -> Self {
        GraphSchema::mof_default()
    }
}
