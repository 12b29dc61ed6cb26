use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use mofkg::graph::{import_ndjson, to_triples, GraphSchema, PropertyGraph, Triple, TripleProjection, Vocab};
use mofkg::ingest::load_triples_tsv;
use mofkg::kge::{load_checkpoint, Checkpoint, TripleStore};
use serde::Serialize;

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read `{}`", path.display()))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("cannot create `{}`", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("cannot write `{}`", path.display()))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

/// `graph.jsonl` becomes `graph.<suffix>`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map_or_else(|| "out".into(), |s| s.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}.{suffix}"))
}

pub fn load_schema(path: Option<&Path>) -> Result<GraphSchema> {
    match path {
        None => Ok(GraphSchema::mof_default()),
        Some(p) => GraphSchema::from_json(&read_text(p)?).with_context(|| format!("invalid schema `{}`", p.display())),
    }
}

pub fn load_graph(path: &Path, schema: Option<&Path>) -> Result<PropertyGraph> {
    let schema = load_schema(schema)?;
    import_ndjson(&read_text(path)?, schema).with_context(|| format!("invalid graph `{}`", path.display()))
}

/// Triples with their dictionaries and a store over them.
pub struct Dataset {
    pub projection: TripleProjection,
    pub store: TripleStore,
}

impl Dataset {
    pub fn from_graph(graph: &PropertyGraph) -> Self {
        let projection = to_triples(graph, None);
        let store = TripleStore::from_projection(&projection);
        Dataset { projection, store }
    }

    /// Entities are `Label:key` names; the label is the part before the
    /// first colon.
    pub fn from_tsv(path: &Path) -> Result<Self> {
        let text = load_triples_tsv(&read_text(path)?).with_context(|| format!("in `{}`", path.display()))?;
        if text.is_empty() {
            bail!("`{}` contains no triples", path.display());
        }
        let mut names: Vec<String> = text.iter().flat_map(|t| [t.head.clone(), t.tail.clone()]).collect();
        names.sort_unstable();
        names.dedup();
        let mut rels: Vec<String> = text.iter().map(|t| t.relation.clone()).collect();
        rels.sort_unstable();
        rels.dedup();
        let entities = Vocab::from_names(names);
        let relations = Vocab::from_names(rels);
        let triples = text
            .iter()
            .map(|t| {
                Triple::new(
                    entities.get(&t.head).expect("collected above"),
                    relations.get(&t.relation).expect("collected above"),
                    entities.get(&t.tail).expect("collected above"),
                )
            })
            .collect();
        let projection = TripleProjection {
            triples,
            entities,
            relations,
        };
        let store = TripleStore::from_projection(&projection);
        Ok(Dataset { projection, store })
    }

    /// Fails unless `ckpt` was trained on this entity and relation dictionary.
    pub fn check_compatible(&self, ckpt: &Checkpoint) -> Result<()> {
        let digest = self.projection.entities.digest();
        if ckpt.header.entity_digest != digest {
            bail!(
                "entity dictionary digest mismatch: checkpoint {} vs graph {}",
                ckpt.header.entity_digest,
                digest
            );
        }
        if ckpt.header.relation_names != self.projection.relations.names() {
            bail!(
                "relation mismatch: checkpoint {:?} vs graph {:?}",
                ckpt.header.relation_names,
                self.projection.relations.names()
            );
        }
        Ok(())
    }

    pub fn relation(&self, name: &str) -> Result<usize> {
        self.projection
            .relations
            .get(name)
            .with_context(|| format!("the graph has no `{name}` triples"))
    }
}

pub fn load_model(path: &Path) -> Result<Checkpoint> {
    load_checkpoint(path).with_context(|| format!("cannot load checkpoint `{}`", path.display()))
}
