use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::schema::{AUTHORED_BY, DESCRIBES, HAS_SOLVENT, PUBLISHED_IN};
use super::store::{NodeId, PropertyGraph};

/// One pair of MOFs that share at least one solvent, with the authors and
/// journals of the publications that describe each of them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoSolventRecord {
    pub mof_a: String,
    pub mof_b: String,
    /// Every solvent the two MOFs share, sorted.
    pub solvents: Vec<String>,
    pub authors_a: Vec<String>,
    pub authors_b: Vec<String>,
    pub journals_a: Vec<String>,
    pub journals_b: Vec<String>,
}

/// Authors and journals of the MOFs that have the same solvent.
///
/// Produces one record per unordered MOF pair with `mof_a < mof_b` (by
/// key), sorted by `(mof_a, mof_b)`. Everything is reported by key.
pub fn co_solvent_query(graph: &PropertyGraph) -> Vec<CoSolventRecord> {
    let mut pairs: BTreeMap<(String, String), BTreeSet<String>> = BTreeMap::new();
    for solvent in graph.nodes_with_label("Solvent") {
        let mut mofs: Vec<&str> = graph
            .in_neighbors(solvent.id, HAS_SOLVENT)
            .filter_map(|id| graph.node(id))
            .map(|n| n.key.as_str())
            .collect();
        mofs.sort_unstable();
        mofs.dedup();
        for (i, a) in mofs.iter().enumerate() {
            for b in &mofs[i + 1..] {
                pairs
                    .entry(((*a).to_owned(), (*b).to_owned()))
                    .or_default()
                    .insert(solvent.key.clone());
            }
        }
    }

    pairs
        .into_iter()
        .map(|((a, b), solvents)| {
            let (authors_a, journals_a) = publication_context(graph, &a);
            let (authors_b, journals_b) = publication_context(graph, &b);
            CoSolventRecord {
                mof_a: a,
                mof_b: b,
                solvents: solvents.into_iter().collect(),
                authors_a,
                authors_b,
                journals_a,
                journals_b,
            }
        })
        .collect()
}

fn publication_context(graph: &PropertyGraph, mof_key: &str) -> (Vec<String>, Vec<String>) {
    let Some(mof) = graph.node_by_key("MOF", mof_key) else {
        return (Vec::new(), Vec::new());
    };
    let mut authors = BTreeSet::new();
    let mut journals = BTreeSet::new();
    for publication in graph.in_neighbors(mof, DESCRIBES) {
        authors.extend(keys(graph, graph.out_neighbors(publication, AUTHORED_BY)));
        journals.extend(keys(graph, graph.out_neighbors(publication, PUBLISHED_IN)));
    }
    (authors.into_iter().collect(), journals.into_iter().collect())
}

fn keys<'a>(graph: &'a PropertyGraph, ids: impl Iterator<Item = NodeId> + 'a) -> impl Iterator<Item = String> + 'a {
    ids.filter_map(|id| graph.node(id)).map(|n| n.key.clone())
}
