//! Declarative mapping from tabular and CIF sources onto the property graph.
//!
//! A mapping is an ordered list of rules. Each rule reads one named source
//! row by row and either upserts a node or adds an edge between two nodes
//! identified by label and key. Keys and property values are templates over
//! the row's columns, e.g. `"{refcode}"` or `"{doi}"`.
//!
//! ```json
//! {"rules": [
//!   {"name": "mof", "source": "csd",
//!    "node": {"label": "MOF", "key": "{refcode}", "props": {"year": {"template": "{year}", "kind": "int"}}}},
//!   {"name": "has_solvent", "source": "csd",
//!    "edge": {"rel": "HAS_SOLVENT", "src": {"label": "MOF", "key": "{refcode}"},
//!             "dst": {"label": "Solvent", "key": "{solvent}"}}}
//! ]}
//! ```
//!
//! A rule may expand a multi-valued column with
//! `"for_each": {"column": "authors", "sep": ";", "as": "author"}`; the
//! pieces are then available as `{author}`. CIF sources expose one row per
//! data block (items plus `_data_block`), or one row per loop row when the
//! rule names a loop column in `cif_loop`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::cif::CifDocument;
use crate::graph::{GraphSchema, Properties, PropertyGraph, PropertyValue, ScalarKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MappingError {
    #[error("mapping rule `{rule}`: {reason}")]
    Validation { rule: String, reason: String },
    #[error("source `{0}` not found")]
    SourceNotFound(String),
    #[error("invalid mapping file: {0}")]
    Format(String),
    #[error("CSV source `{source_name}`: {reason}")]
    Csv { source_name: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingSpec {
    pub rules: Vec<MappingRule>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingRule {
    pub name: String,
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub for_each: Option<ForEach>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cif_loop: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node: Option<NodeTarget>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge: Option<EdgeTarget>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForEach {
    pub column: String,
    #[serde(default = "default_sep")]
    pub sep: String,
    #[serde(rename = "as")]
    pub bind: String,
}

fn default_sep() -> String {
    ";".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeTarget {
    pub label: String,
    pub key: String,
    #[serde(default)]
    pub props: BTreeMap<String, PropSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointRef {
    pub label: String,
    pub key: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeTarget {
    pub rel: String,
    pub src: EndpointRef,
    pub dst: EndpointRef,
    #[serde(default)]
    pub props: BTreeMap<String, PropSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PropSpec {
    Text(String),
    Typed {
        template: String,
        #[serde(default = "default_kind")]
        kind: ScalarKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        unit: Option<String>,
    },
}

fn default_kind() -> ScalarKind {
    ScalarKind::Text
}

impl PropSpec {
    fn template(&self) -> &str {
        match self {
            PropSpec::Text(t) => t,
            PropSpec::Typed { template, .. } => template,
        }
    }

    fn evaluate(&self, row: &Row) -> Result<Option<PropertyValue>, String> {
        let Some(text) = render(self.template(), row) else {
            return Ok(None);
        };
        let value = match self {
            PropSpec::Text(_) => PropertyValue::Text(text),
            PropSpec::Typed { kind, unit, .. } => match kind {
                ScalarKind::Text => PropertyValue::Text(text),
                ScalarKind::Int => PropertyValue::Int(text.parse().map_err(|_| format!("`{text}` is not an integer"))?),
                ScalarKind::Real => PropertyValue::Real {
                    value: super::crystal::parse_cif_number(&text)
                        .ok_or_else(|| format!("`{text}` is not a number"))?,
                    unit: unit.clone(),
                },
                ScalarKind::Bool => PropertyValue::Bool(match text.to_ascii_lowercase().as_str() {
                    "true" | "yes" | "1" => true,
                    "false" | "no" | "0" => false,
                    _ => return Err(format!("`{text}` is not a boolean")),
                }),
            },
        };
        Ok(Some(value))
    }
}

impl MappingSpec {
    pub fn from_json(text: &str) -> Result<Self, MappingError> {
        serde_json::from_str(text).map_err(|e| MappingError::Format(e.to_string()))
    }

    /// Checks rules against the schema and the sources' declared columns.
    pub fn validate(&self, schema: &GraphSchema, sources: &Sources) -> Result<(), MappingError> {
        for rule in &self.rules {
            let fail = |reason: String| MappingError::Validation {
                rule: rule.name.clone(),
                reason,
            };
            let source = sources
                .get(&rule.source)
                .ok_or_else(|| MappingError::SourceNotFound(rule.source.clone()))?;
            let mut templates: Vec<&str> = Vec::new();
            match (&rule.node, &rule.edge) {
                (Some(node), None) => {
                    if !schema.has_label(&node.label) {
                        return Err(fail(format!("unknown label `{}`", node.label)));
                    }
                    templates.push(&node.key);
                    templates.extend(node.props.values().map(PropSpec::template));
                }
                (None, Some(edge)) => {
                    if !schema.has_relation(&edge.rel) {
                        return Err(fail(format!("unknown relation `{}`", edge.rel)));
                    }
                    if !schema.allows(&edge.rel, &edge.src.label, &edge.dst.label) {
                        return Err(fail(format!(
                            "relation `{}` is not declared for {} -> {}",
                            edge.rel, edge.src.label, edge.dst.label
                        )));
                    }
                    templates.extend([edge.src.key.as_str(), edge.dst.key.as_str()]);
                    templates.extend(edge.props.values().map(PropSpec::template));
                }
                _ => return Err(fail("a rule needs exactly one of `node` or `edge`".into())),
            }
            if rule.cif_loop.is_some() && !matches!(source, Source::Cif(_)) {
                return Err(fail("`cif_loop` only applies to CIF sources".into()));
            }
            let mut declared: BTreeSet<&str> = BTreeSet::new();
            if let Some(fe) = &rule.for_each {
                declared.insert(&fe.bind);
                if !source.declares(&fe.column) {
                    return Err(fail(format!(
                        "column `{}` is not in source `{}`",
                        fe.column, rule.source
                    )));
                }
            }
            for t in templates {
                let refs = placeholders(t).map_err(&fail)?;
                if refs.is_empty() && t.is_empty() {
                    return Err(fail("empty key template".into()));
                }
                for r in refs {
                    if !declared.contains(r) && !source.declares(r) {
                        return Err(fail(format!("column `{r}` is not in source `{}`", rule.source)));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Placeholders referenced by a template.
fn placeholders(template: &str) -> Result<Vec<&str>, String> {
    let mut out = Vec::new();
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        let close = rest[open..]
            .find('}')
            .ok_or_else(|| format!("unclosed placeholder in `{template}`"))?;
        out.push(&rest[open + 1..open + close]);
        rest = &rest[open + close + 1..];
    }
    Ok(out)
}

type Row = HashMap<String, String>;

/// Renders a template against a row; `None` when any referenced column is
/// blank or the result is empty.
fn render(template: &str, row: &Row) -> Option<String> {
    let mut out = String::new();
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let close = rest[open..].find('}')?;
        let name = &rest[open + 1..open + close];
        let value = row.get(name).map(|v| v.trim()).filter(|v| !v.is_empty())?;
        out.push_str(value);
        rest = &rest[open + close + 1..];
    }
    out.push_str(rest);
    let out = out.trim().to_owned();
    (!out.is_empty()).then_some(out)
}

/// A CSV table with a header row.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    /// Reads RFC-4180 CSV; the first record is the header.
    pub fn from_csv(text: &str) -> Result<Self, csv::Error> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let headers = reader.headers()?.iter().map(|h| h.trim().to_owned()).collect();
        let rows = reader
            .records()
            .map(|r| r.map(|rec| rec.iter().map(str::to_owned).collect()))
            .collect::<Result<_, _>>()?;
        Ok(Table { headers, rows })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Table(Table),
    Cif(Vec<CifDocument>),
}

impl Source {
    fn declares(&self, column: &str) -> bool {
        match self {
            // An empty file has no header to check against.
            Source::Table(t) => t.headers.is_empty() || t.headers.iter().any(|h| h == column),
            // CIF blocks carry arbitrary tags; only the tag shape is checked.
            Source::Cif(_) => column.starts_with('_'),
        }
    }

    fn rows(&self, cif_loop: Option<&str>) -> Vec<Row> {
        match self {
            Source::Table(t) => t
                .rows
                .iter()
                .map(|r| t.headers.iter().cloned().zip(r.iter().cloned()).collect())
                .collect(),
            Source::Cif(docs) => {
                let mut rows = Vec::new();
                for block in docs.iter().flat_map(|d| &d.blocks) {
                    let mut base: Row = block.items.iter().cloned().collect();
                    base.insert("_data_block".into(), block.name.clone());
                    match cif_loop {
                        None => rows.push(base),
                        Some(tag) => {
                            if let Some(l) = block.loop_with(tag) {
                                for r in &l.rows {
                                    let mut row = base.clone();
                                    row.extend(l.tags.iter().cloned().zip(r.iter().cloned()));
                                    rows.push(row);
                                }
                            }
                        }
                    }
                }
                rows
            }
        }
    }
}

pub type Sources = BTreeMap<String, Source>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skip {
    pub rule: String,
    /// 1-based data row (header excluded).
    pub row: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct IngestReport {
    pub nodes_created: usize,
    pub edges_created: usize,
    /// Distinct source rows with at least one skipped rule.
    pub rows_skipped: usize,
    pub skipped: Vec<Skip>,
}

impl IngestReport {
    pub fn merge(&mut self, other: IngestReport) {
        self.nodes_created += other.nodes_created;
        self.edges_created += other.edges_created;
        self.rows_skipped += other.rows_skipped;
        self.skipped.extend(other.skipped);
    }
}

/// Runs every rule against its source and writes into `graph`.
///
/// Idempotent on keys: existing nodes and edges are left alone, so a second
/// run creates nothing.
pub fn apply_mapping(
    spec: &MappingSpec,
    sources: &Sources,
    graph: &mut PropertyGraph,
) -> Result<IngestReport, MappingError> {
    spec.validate(graph.schema(), sources)?;
    let mut report = IngestReport::default();
    let mut skipped_rows: BTreeSet<(String, usize)> = BTreeSet::new();
    for rule in &spec.rules {
        let source = &sources[&rule.source];
        for (i, row) in source.rows(rule.cif_loop.as_deref()).into_iter().enumerate() {
            let row_no = i + 1;
            let mut skip = |reason: String| {
                skipped_rows.insert((rule.source.clone(), row_no));
                report.skipped.push(Skip {
                    rule: rule.name.clone(),
                    row: row_no,
                    reason,
                });
            };
            for bound in expand(rule, &row) {
                match apply_rule(rule, &bound, graph) {
                    Ok(Applied::Node) => report.nodes_created += 1,
                    Ok(Applied::Edge) => report.edges_created += 1,
                    Ok(Applied::Nothing) => {}
                    Err(reason) => skip(reason),
                }
            }
        }
    }
    report.rows_skipped = skipped_rows.len();
    Ok(report)
}

fn expand(rule: &MappingRule, row: &Row) -> Vec<Row> {
    let Some(fe) = &rule.for_each else {
        return vec![row.clone()];
    };
    let pieces: Vec<&str> = row
        .get(&fe.column)
        .map(|v| {
            v.split(fe.sep.as_str())
                .map(str::trim)
                .filter(|p| !p.is_empty())
                .collect()
        })
        .unwrap_or_default();
    if pieces.is_empty() {
        // Still evaluate once so the blank value is reported as a skip.
        return vec![row.clone()];
    }
    pieces
        .into_iter()
        .map(|p| {
            let mut r = row.clone();
            r.insert(fe.bind.clone(), p.to_owned());
            r
        })
        .collect()
}

enum Applied {
    Node,
    Edge,
    Nothing,
}

fn eval_props(specs: &BTreeMap<String, PropSpec>, row: &Row) -> Result<Properties, String> {
    let mut props = Properties::new();
    for (name, spec) in specs {
        if let Some(v) = spec.evaluate(row).map_err(|e| format!("property `{name}`: {e}"))? {
            props.insert(name.clone(), v);
        }
    }
    Ok(props)
}

fn apply_rule(rule: &MappingRule, row: &Row, graph: &mut PropertyGraph) -> Result<Applied, String> {
    if let Some(node) = &rule.node {
        let key = render(&node.key, row).ok_or("empty key")?;
        if graph.node_by_key(&node.label, &key).is_some() {
            return Ok(Applied::Nothing);
        }
        let mut props = eval_props(&node.props, row)?;
        let key_prop = graph.schema().key_property(&node.label).to_owned();
        props
            .entry(key_prop)
            .or_insert_with(|| PropertyValue::Text(key.clone()));
        graph.add_node(&node.label, props).map_err(|e| e.to_string())?;
        return Ok(Applied::Node);
    }
    let edge = rule.edge.as_ref().expect("validated rule");
    let src_key = render(&edge.src.key, row).ok_or("empty source key")?;
    let dst_key = render(&edge.dst.key, row).ok_or("empty target key")?;
    let src = graph
        .node_by_key(&edge.src.label, &src_key)
        .ok_or_else(|| format!("no {} node `{src_key}`", edge.src.label))?;
    let dst = graph
        .node_by_key(&edge.dst.label, &dst_key)
        .ok_or_else(|| format!("no {} node `{dst_key}`", edge.dst.label))?;
    if graph.has_edge(&edge.rel, src, dst) {
        return Ok(Applied::Nothing);
    }
    let props = eval_props(&edge.props, row)?;
    graph.add_edge(&edge.rel, src, dst, props).map_err(|e| e.to_string())?;
    Ok(Applied::Edge)
}

/// Mapping for a CSD-style companion CSV with columns `refcode, doi,
/// journal, year, authors, solvent`; authors and solvents are
/// semicolon-separated lists.
pub fn default_csd_mapping(source: &str) -> MappingSpec {
    let text = include_str!("../../data/csd_mapping.json").replace("\"csd\"", &format!("\"{source}\""));
    MappingSpec::from_json(&text).expect("bundled mapping is valid")
}
