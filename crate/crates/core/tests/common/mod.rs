#![allow(dead_code)]

pub mod cif;
pub mod extraction;
pub mod gradients;
pub mod ranking;

use std::path::PathBuf;

use mofkg::graph::{props, GraphSchema, NodeId, PropertyGraph, AUTHORED_BY, DESCRIBES, HAS_SOLVENT, PUBLISHED_IN};

pub fn fixture_dir(name: &str) -> PathBuf {
    // Resolves from the core crate and from crates that include this module.
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

fn node(g: &mut PropertyGraph, label: &str, key_prop: &str, key: &str) -> NodeId {
    match g.node_by_key(label, key) {
        Some(id) => id,
        None => g.add_node(label, props([(key_prop, key)])).unwrap(),
    }
}

/// Adds a MOF with its describing publication, journal, authors and solvents.
pub fn add_described_mof(
    g: &mut PropertyGraph,
    refcode: &str,
    doi: &str,
    journal: &str,
    authors: &[&str],
    solvents: &[&str],
) {
    let mof = node(g, "MOF", "refcode", refcode);
    let publication = node(g, "Publication", "doi", doi);
    g.add_edge(DESCRIBES, publication, mof, Default::default()).unwrap();
    let j = node(g, "Journal", "name", journal);
    if !g.has_edge(PUBLISHED_IN, publication, j) {
        g.add_edge(PUBLISHED_IN, publication, j, Default::default()).unwrap();
    }
    for a in authors {
        let a = node(g, "Author", "name", a);
        if !g.has_edge(AUTHORED_BY, publication, a) {
            g.add_edge(AUTHORED_BY, publication, a, Default::default()).unwrap();
        }
    }
    for s in solvents {
        let s = node(g, "Solvent", "name", s);
        g.add_edge(HAS_SOLVENT, mof, s, Default::default()).unwrap();
    }
}

/// Three MOFs from three publications, all synthesised in DMF.
pub fn co_solvent_fixture() -> PropertyGraph {
    let mut g = PropertyGraph::new(GraphSchema::mof_default());
    add_described_mof(
        &mut g,
        "ABCDEF",
        "10.1000/p1",
        "Inorg. Chem.",
        &["Li, X.", "Smith, J."],
        &["DMF"],
    );
    add_described_mof(
        &mut g,
        "GHIJKL",
        "10.1000/p2",
        "J. Am. Chem. Soc.",
        &["Chen, Y."],
        &["DMF", "water"],
    );
    add_described_mof(&mut g, "MNOPQR", "10.1000/p3", "Inorg. Chem.", &["Smith, J."], &["DMF"]);
    g
}
