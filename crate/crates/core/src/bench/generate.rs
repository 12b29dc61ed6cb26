use rand::seq::index::sample;
use rand::Rng as _;

use super::{BenchConfig, BenchError};
use crate::graph::{
    props, GraphSchema, NodeId, PropertyGraph, AUTHORED_BY, DESCRIBES, HAS_ATOM, HAS_BOND, HAS_SOLVENT, PUBLISHED_IN,
};
use crate::rng;

/// Elements used for atom nodes, common organic elements first.
const ELEMENTS: &[&str] = &[
    "C", "H", "O", "N", "Zn", "Cu", "Co", "Ni", "Fe", "Mn", "Cd", "Zr", "Al", "Mg", "Cr", "In", "Ag", "Ca", "Sr", "Ba",
    "La", "Eu", "Tb", "Gd", "S", "P", "F", "Cl", "Br", "I", "B", "Si", "Ti", "V", "Ga", "Li", "Na", "K", "Pb", "Bi",
];

/// Elements present in nearly every framework.
const COMMON: usize = 3;

/// Non-metals that can serve as a community's linker heteroatom.
const NON_METALS: &[&str] = &["N", "S", "P", "F", "Cl", "Br", "I", "B", "Si"];

const SOLVENTS: &[&str] = &[
    "N,N-dimethylformamide",
    "water",
    "ethanol",
    "methanol",
    "N,N-diethylformamide",
    "N,N-dimethylacetamide",
    "acetonitrile",
    "dimethyl sulfoxide",
    "tetrahydrofuran",
    "1,4-dioxane",
    "acetone",
    "toluene",
    "pyridine",
    "isopropanol",
    "chloroform",
];

fn element_name(i: usize) -> String {
    ELEMENTS.get(i).map_or_else(|| format!("X{i}"), |s| (*s).to_owned())
}

fn solvent_name(i: usize) -> String {
    SOLVENTS
        .get(i)
        .map_or_else(|| format!("solvent-{i}"), |s| (*s).to_owned())
}

/// A generated graph with its planted structure.
#[derive(Debug, Clone)]
pub struct SyntheticKg {
    pub graph: PropertyGraph,
    /// Community of each MOF, by MOF index.
    pub communities: Vec<usize>,
    /// Signature solvent index of each community.
    pub signatures: Vec<usize>,
    /// Solvent index of each MOF, drawn for all MOFs but only recorded in
    /// the graph for the solvent-known ones.
    pub solvents: Vec<usize>,
    /// Indices of MOFs with a `HAS_SOLVENT` edge, ascending.
    pub solvent_known: Vec<usize>,
}

impl SyntheticKg {
    pub fn mof_key(i: usize) -> String {
        format!("M{i:05}")
    }

    pub fn solvent_name(i: usize) -> String {
        solvent_name(i)
    }

    /// Signature solvent name of the community of MOF `i`.
    pub fn signature_of(&self, mof: usize) -> String {
        solvent_name(self.signatures[self.communities[mof]])
    }
}

/// Community profile: a metal, a linker heteroatom and a home journal.
struct Community {
    metal: usize,
    secondary: usize,
    journal: usize,
    authors: Vec<usize>,
}

/// Generates a MOF knowledge graph with planted solvent communities.
///
/// Publications are assigned to latent communities uniformly at random and
/// their MOFs inherit the community. A community owns a block of authors, a
/// home journal, a metal and a secondary element; publications draw most of
/// their authors and usually their journal from it, and MOFs contain the
/// common elements plus the community's metal and heteroatom, with a
/// little noise. A MOF's solvent is the community's signature solvent with
/// probability `rho` and uniform otherwise. Exactly `round(phi · mofs)` MOFs,
/// chosen uniformly, get a `HAS_SOLVENT` edge.
pub fn generate(config: &BenchConfig) -> Result<SyntheticKg, BenchError> {
    config.validate()?;
    let mut rng = rng::derived(config.seed, 10);
    let c = config.communities;
    let (hetero_pool, metal_pool): (Vec<usize>, Vec<usize>) =
        (COMMON.min(config.elements)..config.elements).partition(|&e| NON_METALS.contains(&element_name(e).as_str()));
    let pick = |pool: &[usize], fallback: &[usize], k: usize| -> usize {
        let pool = if pool.is_empty() { fallback } else { pool };
        pool.get(k % pool.len().max(1)).copied().unwrap_or(0)
    };

    let per_circle = (config.authors / c).max(1);
    let communities: Vec<Community> = (0..c)
        .map(|k| {
            let start = (k * per_circle) % config.authors;
            Community {
                metal: pick(&metal_pool, &hetero_pool, k),
                secondary: pick(&hetero_pool, &metal_pool, k),
                journal: k % config.journals,
                authors: (0..per_circle).map(|a| (start + a) % config.authors).collect(),
            }
        })
        .collect();
    let signatures: Vec<usize> = (0..c).map(|k| k % config.solvents).collect();

    let pub_community: Vec<usize> = (0..config.publications).map(|_| rng.random_range(0..c)).collect();
    let mof_pub: Vec<usize> = (0..config.mofs)
        .map(|i| i * config.publications / config.mofs)
        .collect();
    let mof_community: Vec<usize> = mof_pub.iter().map(|&p| pub_community[p]).collect();
    let mof_solvent: Vec<usize> = mof_community
        .iter()
        .map(|&k| {
            if rng.random_bool(config.rho) {
                signatures[k]
            } else {
                rng.random_range(0..config.solvents)
            }
        })
        .collect();
    let n_known = config.solvent_known_count();
    let mut solvent_known: Vec<usize> = sample(&mut rng, config.mofs, n_known).into_vec();
    solvent_known.sort_unstable();

    let mut g = PropertyGraph::new(GraphSchema::mof_default());
    let add = |g: &mut PropertyGraph, label: &str, key_prop: &str, key: String| -> NodeId {
        g.add_node(label, props([(key_prop, key)]))
            .expect("generated keys are unique")
    };
    let solvent_ids: Vec<NodeId> = (0..config.solvents)
        .map(|s| add(&mut g, "Solvent", "name", solvent_name(s)))
        .collect();
    let journal_ids: Vec<NodeId> = (0..config.journals)
        .map(|j| add(&mut g, "Journal", "name", format!("Journal {j:02}")))
        .collect();
    let author_ids: Vec<NodeId> = (0..config.authors)
        .map(|a| add(&mut g, "Author", "name", format!("Author {a:04}")))
        .collect();
    let element_ids: Vec<NodeId> = (0..config.elements)
        .map(|e| add(&mut g, "Atom", "symbol", element_name(e)))
        .collect();

    let link = |g: &mut PropertyGraph, rel: &str, a: NodeId, b: NodeId| {
        if !g.has_edge(rel, a, b) {
            g.add_edge(rel, a, b, Default::default())
                .expect("schema allows generated edges");
        }
    };

    let mut pub_ids = Vec::with_capacity(config.publications);
    for (p, &k) in pub_community.iter().enumerate() {
        let id = g
            .add_node("Publication", props([("doi", format!("10.5555/synthetic.{p:05}"))]))
            .expect("unique doi");
        let com = &communities[k];
        let journal = if rng.random_bool(0.8) {
            com.journal
        } else {
            rng.random_range(0..config.journals)
        };
        link(&mut g, PUBLISHED_IN, id, journal_ids[journal]);
        for _ in 0..config.authors_per_publication {
            let author = if rng.random_bool(0.9) {
                com.authors[rng.random_range(0..com.authors.len())]
            } else {
                rng.random_range(0..config.authors)
            };
            link(&mut g, AUTHORED_BY, id, author_ids[author]);
        }
        pub_ids.push(id);
    }

    let mut bond_ids = std::collections::BTreeMap::new();
    for i in 0..config.mofs {
        let id = g
            .add_node("MOF", props([("refcode", SyntheticKg::mof_key(i))]))
            .expect("unique refcode");
        link(&mut g, DESCRIBES, pub_ids[mof_pub[i]], id);
        let com = &communities[mof_community[i]];
        let mut atoms: Vec<usize> = (0..COMMON.min(config.elements))
            .filter(|_| rng.random_bool(0.95))
            .collect();
        if rng.random_bool(0.95) {
            atoms.push(com.metal);
        }
        if rng.random_bool(0.7) {
            atoms.push(com.secondary);
        }
        if rng.random_bool(0.2) {
            atoms.push(rng.random_range(0..config.elements));
        }
        atoms.sort_unstable();
        atoms.dedup();
        for &a in &atoms {
            link(&mut g, HAS_ATOM, id, element_ids[a]);
        }
        if config.include_bonds {
            for (x, &a) in atoms.iter().enumerate() {
                for &b in &atoms[x + 1..] {
                    let key = format!("{}-{}", element_name(a), element_name(b));
                    let bond = *bond_ids
                        .entry(key.clone())
                        .or_insert_with(|| add(&mut g, "Bond", "key", key));
                    link(&mut g, HAS_BOND, id, bond);
                }
            }
        }
    }
    for &i in &solvent_known {
        let mof = g.node_by_key("MOF", &SyntheticKg::mof_key(i)).expect("MOF added above");
        g.add_edge(
            HAS_SOLVENT,
            mof,
            solvent_ids[mof_solvent[i]],
            props([("source", "synthetic")]),
        )
        .expect("schema allows HAS_SOLVENT");
    }

    Ok(SyntheticKg {
        graph: g,
        communities: mof_community,
        signatures,
        solvents: mof_solvent,
        solvent_known,
    })
}

/// Seeded graph for `config`.
pub fn generate_kg(config: &BenchConfig) -> Result<PropertyGraph, BenchError> {
    generate(config).map(|kg| kg.graph)
}

/// The part of the graph around MOFs with a known solvent: those MOFs, the
/// publications describing them with their authors and journals, their atoms
/// and bonds, and every solvent.
pub fn solvent_known_subgraph(graph: &PropertyGraph) -> PropertyGraph {
    let mut keep = vec![false; graph.nodes().len()];
    let mut mark = |id: NodeId| keep[id.0 as usize] = true;
    for mof in graph.nodes_with_label("MOF") {
        if graph.out_neighbors(mof.id, HAS_SOLVENT).next().is_none() {
            continue;
        }
        mark(mof.id);
        for rel in [HAS_ATOM, HAS_BOND, HAS_SOLVENT] {
            graph.out_neighbors(mof.id, rel).for_each(&mut mark);
        }
        for p in graph.in_neighbors(mof.id, DESCRIBES) {
            mark(p);
            for rel in [AUTHORED_BY, PUBLISHED_IN] {
                graph.out_neighbors(p, rel).for_each(&mut mark);
            }
        }
    }
    for s in graph.nodes_with_label("Solvent") {
        mark(s.id);
    }
    graph.induced_subgraph(|n| keep[n.id.0 as usize])
}
