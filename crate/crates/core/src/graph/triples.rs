use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::store::PropertyGraph;

/// A `(head, relation, tail)` fact. Generic over the identifier type so the
/// same shape serves text keys and dense indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triple<T = usize> {
    pub head: T,
    pub relation: T,
    pub tail: T,
}

impl<T> Triple<T> {
    pub fn new(head: T, relation: T, tail: T) -> Self {
        Triple { head, relation, tail }
    }
}

pub type TextTriple = Triple<String>;

/// Bijection between names and dense indices `0..len`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocab {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocab {
    pub fn from_names(names: impl IntoIterator<Item = String>) -> Self {
        let mut v = Vocab::default();
        for n in names {
            v.insert(n);
        }
        v
    }

    /// Returns the index of `name`, adding it if new.
    pub fn insert(&mut self, name: String) -> usize {
        if let Some(&i) = self.index.get(&name) {
            return i;
        }
        let i = self.names.len();
        self.index.insert(name.clone(), i);
        self.names.push(name);
        i
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, index: usize) -> Option<&str> {
        self.names.get(index).map(String::as_str)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Hex SHA-256 over the names in index order, newline-terminated.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for n in &self.names {
            h.update(n.as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }
}

/// Triples projected from a graph, with their entity and relation dictionaries.
#[derive(Debug, Clone, Default)]
pub struct TripleProjection {
    pub triples: Vec<Triple>,
    pub entities: Vocab,
    pub relations: Vocab,
}

impl TripleProjection {
    pub fn to_text(&self, t: &Triple) -> TextTriple {
        Triple::new(
            self.entities.name(t.head).unwrap_or_default().to_owned(),
            self.relations.name(t.relation).unwrap_or_default().to_owned(),
            self.entities.name(t.tail).unwrap_or_default().to_owned(),
        )
    }

    /// Indices of entities whose name starts with `Label:`.
    pub fn entities_with_label(&self, label: &str) -> Vec<usize> {
        let prefix = format!("{label}:");
        (0..self.entities.len())
            .filter(|&i| self.entities.names()[i].starts_with(&prefix))
            .collect()
    }
}

/// Projects the graph's edges onto triples, dropping properties.
///
/// Every node becomes an entity named `Label:key`; entities and relations are
/// indexed in sorted name order. Triples are sorted by relation name, then
/// head name, then tail name. With `relations` set, only those edges are kept.
pub fn to_triples(graph: &PropertyGraph, relations: Option<&BTreeSet<String>>) -> TripleProjection {
    let mut names: Vec<String> = graph.nodes().iter().map(|n| n.entity_name()).collect();
    names.sort_unstable();
    let entities = Vocab::from_names(names);

    let mut text: Vec<(&str, String, String)> = graph
        .edges()
        .iter()
        .filter(|e| relations.map_or(true, |r| r.contains(&e.relation)))
        .map(|e| {
            let h = graph.node(e.source).expect("edge endpoints exist").entity_name();
            let t = graph.node(e.target).expect("edge endpoints exist").entity_name();
            (e.relation.as_str(), h, t)
        })
        .collect();
    text.sort_unstable();

    let rel_names: BTreeSet<&str> = text.iter().map(|(r, _, _)| *r).collect();
    let relations = Vocab::from_names(rel_names.into_iter().map(str::to_owned));

    let triples = text
        .iter()
        .map(|(r, h, t)| {
            Triple::new(
                entities.get(h).expect("entity indexed"),
                relations.get(r).expect("relation indexed"),
                entities.get(t).expect("entity indexed"),
            )
        })
        .collect();
    TripleProjection {
        triples,
        entities,
        relations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::schema::GraphSchema;
    use crate::graph::store::props;

    #[test]
    fn empty_graph_projects_nothing() {
        let g = PropertyGraph::new(GraphSchema::mof_default());
        let p = to_triples(&g, None);
        assert!(p.triples.is_empty());
        assert!(p.entities.is_empty());
        assert!(p.relations.is_empty());
    }

    #[test]
    fn lone_node_is_an_entity() {
        let mut g = PropertyGraph::new(GraphSchema::mof_default());
        g.add_node("MOF", props([("refcode", "ABC")])).unwrap();
        let p = to_triples(&g, None);
        assert!(p.triples.is_empty());
        assert_eq!(p.entities.names(), ["MOF:ABC"]);
    }

    #[test]
    fn vocab_is_bijective() {
        let mut v = Vocab::default();
        assert_eq!(v.insert("a".into()), 0);
        assert_eq!(v.insert("b".into()), 1);
        assert_eq!(v.insert("a".into()), 0);
        assert_eq!(v.name(1), Some("b"));
        assert_eq!(v.get("b"), Some(1));
        assert_ne!(v.digest(), Vocab::from_names(["b".to_owned(), "a".to_owned()]).digest());
    }
}
