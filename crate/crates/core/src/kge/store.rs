use std::collections::{BTreeSet, HashMap, HashSet};

use super::KgeError;
use crate::graph::{Triple, TripleProjection};

/// Dense integer triples plus the lookups needed for sampling and filtering.
///
/// When entity labels are known, each relation also records which entities
/// occur as its heads and tails by label, for type-constrained corruption and
/// candidate sets.
#[derive(Debug, Clone)]
pub struct TripleStore {
    triples: Vec<Triple>,
    n_entities: usize,
    n_relations: usize,
    known: HashSet<Triple>,
    tails_of: HashMap<(usize, usize), Vec<usize>>,
    labels: Option<Vec<String>>,
    head_domain: Vec<Vec<usize>>,
    tail_domain: Vec<Vec<usize>>,
}

impl TripleStore {
    pub fn new(triples: Vec<Triple>, n_entities: usize, n_relations: usize) -> Result<Self, KgeError> {
        for t in &triples {
            for (what, index, len) in [
                ("entity", t.head, n_entities),
                ("relation", t.relation, n_relations),
                ("entity", t.tail, n_entities),
            ] {
                if index >= len {
                    return Err(KgeError::IndexOutOfRange { what, index, len });
                }
            }
        }
        let known: HashSet<Triple> = triples.iter().copied().collect();
        let mut tails_of: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for t in &known {
            tails_of.entry((t.head, t.relation)).or_default().push(t.tail);
        }
        tails_of.values_mut().for_each(|v| v.sort_unstable());
        Ok(TripleStore {
            triples,
            n_entities,
            n_relations,
            known,
            tails_of,
            labels: None,
            head_domain: Vec::new(),
            tail_domain: Vec::new(),
        })
    }

    /// Attaches one label per entity and derives each relation's head and
    /// tail domains: all entities carrying a label seen in that position.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, KgeError> {
        if labels.len() != self.n_entities {
            return Err(KgeError::InvalidConfig(format!(
                "{} labels for {} entities",
                labels.len(),
                self.n_entities
            )));
        }
        let mut head_labels = vec![BTreeSet::new(); self.n_relations];
        let mut tail_labels = vec![BTreeSet::new(); self.n_relations];
        for t in &self.triples {
            head_labels[t.relation].insert(labels[t.head].as_str());
            tail_labels[t.relation].insert(labels[t.tail].as_str());
        }
        let domain = |wanted: &BTreeSet<&str>| -> Vec<usize> {
            (0..labels.len())
                .filter(|&e| wanted.contains(labels[e].as_str()))
                .collect()
        };
        self.head_domain = head_labels.iter().map(domain).collect();
        self.tail_domain = tail_labels.iter().map(domain).collect();
        self.labels = Some(labels);
        Ok(self)
    }

    /// Store over a projection's triples, labelled by the `Label:` prefix of
    /// each entity name.
    pub fn from_projection(projection: &TripleProjection) -> Self {
        let labels = projection
            .entities
            .names()
            .iter()
            .map(|n| n.split_once(':').map_or(n.as_str(), |(l, _)| l).to_owned())
            .collect();
        TripleStore::new(
            projection.triples.clone(),
            projection.entities.len(),
            projection.relations.len(),
        )
        .and_then(|s| s.with_labels(labels))
        .expect("projection indices are dense")
    }

    /// A store over `triples` sharing this store's entity space and labels.
    pub fn subset(&self, triples: Vec<Triple>) -> Result<Self, KgeError> {
        let store = TripleStore::new(triples, self.n_entities, self.n_relations)?;
        match &self.labels {
            Some(l) => {
                let mut s = store.with_labels(l.clone())?;
                // Keep the parent's domains so a relation's candidates do not
                // shrink when the subset lacks some of its triples.
                s.head_domain = self.head_domain.clone();
                s.tail_domain = self.tail_domain.clone();
                Ok(s)
            }
            None => Ok(store),
        }
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn n_entities(&self) -> usize {
        self.n_entities
    }

    pub fn n_relations(&self) -> usize {
        self.n_relations
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.known.contains(t)
    }

    /// Known tails of `(h, r, ?)`, sorted.
    pub fn known_tails(&self, head: usize, relation: usize) -> &[usize] {
        self.tails_of.get(&(head, relation)).map_or(&[], Vec::as_slice)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Entities that may stand at the head of `relation`, if labels are known.
    pub fn head_domain(&self, relation: usize) -> Option<&[usize]> {
        self.head_domain.get(relation).map(Vec::as_slice)
    }

    /// Entities that may stand at the tail of `relation`, if labels are known.
    pub fn tail_domain(&self, relation: usize) -> Option<&[usize]> {
        self.tail_domain.get(relation).map(Vec::as_slice)
    }
}
