mod common;

use std::collections::{BTreeMap, BTreeSet};

use mofkg::graph::{
    co_solvent_query, export_ndjson, import_ndjson, props, to_triples, GraphError, GraphSchema, PropertyGraph,
    HAS_ATOM, HAS_SOLVENT,
};
use mofkg::ingest::{
    apply_mapping, default_csd_mapping, extract_crystal, parse_cif, render_crystal, Source, Sources, Table,
};
use proptest::prelude::*;

use common::cif::{check_corpus, crystal_record};
use common::{add_described_mof, co_solvent_fixture, fixture_dir};

#[test]
fn cif_corpus_is_total_and_positioned() {
    let files = check_corpus().unwrap();
    assert!(files >= 10);
}

#[test]
fn cif_fixture_details() {
    let read = |name: &str| {
        let text = std::fs::read_to_string(fixture_dir("cif").join(name)).unwrap();
        parse_cif(&text).unwrap()
    };
    let hkust = extract_crystal(&read("uncertainties.cif")).unwrap();
    assert_eq!(hkust.lengths, [26.343; 3]);
    assert_eq!(hkust.atoms[0].x, 0.28527);

    let quoted = read("quoting_and_text.cif");
    let block = &quoted.blocks[0];
    assert_eq!(
        block.item("_publ_section_title"),
        Some("Solvothermal synthesis of a \"pillared\" layer\nframework; second line of the title")
    );
    assert_eq!(block.item("_journal_name_full"), Some("Journal of Framework Chemistry"));
    assert_eq!(extract_crystal(&quoted).unwrap().atoms[0].label, "Co 1");

    let extra = read("unknown_tags.cif");
    assert_eq!(extra.blocks[0].item("_symmetry_space_group_name_H-M"), Some("F m -3 m"));
    assert_eq!(extra.blocks[0].item("_ccdc_custom_field"), Some("?"));

    let framed = extract_crystal(&read("save_frame.cif")).unwrap();
    assert_eq!(framed.lengths[0], 7.1);

    let two = read("two_blocks.cif");
    assert_eq!(two.blocks.len(), 2);
    assert_eq!(two.blocks[1].name, "SECOND");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn crystal_render_round_trip(rec in crystal_record()) {
        let text = render_crystal(&rec);
        let back = extract_crystal(&parse_cif(&text).unwrap()).unwrap();
        prop_assert_eq!(back, rec);
    }
}

fn sample_graph() -> PropertyGraph {
    let mut g = co_solvent_fixture();
    let zn = g.add_node("Atom", props([("symbol", "Zn")])).unwrap();
    let mof = g.node_by_key("MOF", "ABCDEF").unwrap();
    g.add_edge(HAS_ATOM, mof, zn, props([("count", 4i64)])).unwrap();
    g
}

#[test]
fn ndjson_round_trip_is_byte_identical() {
    let g = sample_graph();
    let text = export_ndjson(&g);
    let back = import_ndjson(&text, GraphSchema::mof_default()).unwrap();
    assert_eq!(export_ndjson(&back), text);
    assert_eq!(back.node_count(), g.node_count());
    assert_eq!(back.edge_count(), g.edge_count());
}

#[test]
fn co_solvent_three_mofs_give_three_pairs() {
    let records = co_solvent_query(&co_solvent_fixture());
    let pairs: Vec<(&str, &str)> = records.iter().map(|r| (r.mof_a.as_str(), r.mof_b.as_str())).collect();
    assert_eq!(
        pairs,
        [("ABCDEF", "GHIJKL"), ("ABCDEF", "MNOPQR"), ("GHIJKL", "MNOPQR")]
    );
    for r in &records {
        assert_eq!(r.solvents, ["DMF"]);
    }
    let first = &records[0];
    assert_eq!(first.authors_a, ["Li, X.", "Smith, J."]);
    assert_eq!(first.authors_b, ["Chen, Y."]);
    assert_eq!(first.journals_a, ["Inorg. Chem."]);
    assert_eq!(first.journals_b, ["J. Am. Chem. Soc."]);
    let last = &records[2];
    assert_eq!(last.authors_b, ["Smith, J."]);
    assert_eq!(last.journals_b, ["Inorg. Chem."]);
}

#[test]
fn co_solvent_single_join() {
    let mut g = PropertyGraph::new(GraphSchema::mof_default());
    add_described_mof(&mut g, "MOF-a", "10.1/a", "CrystEngComm", &["Ng, K."], &["DMF"]);
    add_described_mof(&mut g, "MOF-b", "10.1/b", "CrystEngComm", &["Ng, K."], &["DMF"]);
    assert_eq!(g.node_count(), 7);
    let records = co_solvent_query(&g);
    assert_eq!(records.len(), 1);
    assert_eq!(records[0].authors_a, ["Ng, K."]);
    assert_eq!(records[0].authors_b, ["Ng, K."]);
    assert_eq!(records[0].journals_b, ["CrystEngComm"]);

    let mut disjoint = PropertyGraph::new(GraphSchema::mof_default());
    add_described_mof(&mut disjoint, "A", "10.1/a", "J", &[], &["DMF"]);
    add_described_mof(&mut disjoint, "B", "10.1/b", "J", &[], &["water"]);
    assert!(co_solvent_query(&disjoint).is_empty());
}

const CSD_CSV: &str = "refcode,doi,journal,year,authors,solvent
ABCDEF,10.1000/p1,Inorg. Chem.,2019,\"Li, X.;Smith, J.\",DMF
GHIJKL,10.1000/p2,J. Am. Chem. Soc.,2020,\"Chen, Y.\",
MNOPQR,10.1000/p3,Inorg. Chem.,2021,\"Smith, J.\",DMF
";

#[test]
fn mapping_twice_gives_identical_export() {
    let spec = default_csd_mapping("csd");
    let mut sources = Sources::new();
    sources.insert("csd".into(), Source::Table(Table::from_csv(CSD_CSV).unwrap()));
    let mut g = PropertyGraph::new(GraphSchema::mof_default());
    let first = apply_mapping(&spec, &sources, &mut g).unwrap();
    assert_eq!(first.nodes_created, g.node_count());
    assert_eq!(first.edges_created, g.edge_count());
    assert_eq!(first.rows_skipped, 1);
    let once = export_ndjson(&g);
    let second = apply_mapping(&spec, &sources, &mut g).unwrap();
    assert_eq!((second.nodes_created, second.edges_created), (0, 0));
    assert_eq!(export_ndjson(&g), once);
    assert_eq!(co_solvent_query(&g).len(), 1);
}

#[derive(Debug, Clone)]
struct RandomGraph {
    mofs: usize,
    solvents: usize,
    edges: Vec<(bool, usize, usize)>,
}

fn random_graph() -> impl Strategy<Value = RandomGraph> {
    (1usize..8, 1usize..5).prop_flat_map(|(mofs, solvents)| {
        prop::collection::vec((any::<bool>(), 0..mofs, 0..solvents.max(3)), 0..30).prop_map(move |edges| RandomGraph {
            mofs,
            solvents,
            edges,
        })
    })
}

fn build(spec: &RandomGraph) -> PropertyGraph {
    let mut g = PropertyGraph::new(GraphSchema::mof_default());
    let mofs: Vec<_> = (0..spec.mofs)
        .map(|i| g.add_node("MOF", props([("refcode", format!("M{i}"))])).unwrap())
        .collect();
    let solvents: Vec<_> = (0..spec.solvents)
        .map(|i| g.add_node("Solvent", props([("name", format!("S{i}"))])).unwrap())
        .collect();
    let atoms: Vec<_> = ["C", "H", "O"]
        .iter()
        .map(|s| g.add_node("Atom", props([("symbol", *s)])).unwrap())
        .collect();
    for &(solvent, m, t) in &spec.edges {
        let (rel, target) = if solvent {
            (HAS_SOLVENT, solvents[t % solvents.len()])
        } else {
            (HAS_ATOM, atoms[t % atoms.len()])
        };
        if !g.has_edge(rel, mofs[m], target) {
            g.add_edge(rel, mofs[m], target, Default::default()).unwrap();
        }
    }
    g
}

proptest! {
    #[test]
    fn validated_graphs_have_consistent_edges(spec in random_graph()) {
        let g = build(&spec);
        prop_assert!(g.validate().is_ok());
        for e in g.edges() {
            let (s, t) = (g.node(e.source).unwrap(), g.node(e.target).unwrap());
            prop_assert!(g.schema().allows(&e.relation, &s.label, &t.label));
        }
    }

    #[test]
    fn triples_invert_to_the_edge_set(spec in random_graph(), only_solvent in any::<bool>()) {
        let g = build(&spec);
        let filter: BTreeSet<String> = [HAS_SOLVENT.to_owned()].into();
        let p = to_triples(&g, only_solvent.then_some(&filter));
        let projected: BTreeSet<(String, String, String)> = p
            .triples
            .iter()
            .map(|t| {
                let t = p.to_text(t);
                (t.relation, t.head, t.tail)
            })
            .collect();
        let expected: BTreeSet<(String, String, String)> = g
            .edges()
            .iter()
            .filter(|e| !only_solvent || e.relation == HAS_SOLVENT)
            .map(|e| (
                e.relation.clone(),
                g.node(e.source).unwrap().entity_name(),
                g.node(e.target).unwrap().entity_name(),
            ))
            .collect();
        prop_assert_eq!(projected.len(), p.triples.len());
        prop_assert_eq!(projected, expected);
        prop_assert_eq!(p.entities.len(), g.node_count());
    }

    #[test]
    fn duplicate_edges_fail_without_side_effects(spec in random_graph()) {
        let mut g = build(&spec);
        let before = export_ndjson(&g);
        let existing: Vec<_> = g.edges().iter().map(|e| (e.relation.clone(), e.source, e.target)).collect();
        for (rel, s, t) in existing {
            let err = g.add_edge(&rel, s, t, Default::default()).unwrap_err();
            prop_assert!(matches!(err, GraphError::DuplicateEdge { .. }), "unexpected error: {:?}", err);
        }
        prop_assert_eq!(export_ndjson(&g), before);
    }

    #[test]
    fn co_solvent_ignores_insertion_order(spec in random_graph(), seed in any::<u64>()) {
        let g = build(&spec);
        // Rebuild the same graph inserting nodes in a permuted order.
        let mut order: Vec<usize> = (0..g.node_count()).collect();
        let mut state = seed | 1;
        for i in (1..order.len()).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            order.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let mut h = PropertyGraph::new(GraphSchema::mof_default());
        let mut map = BTreeMap::new();
        for &i in &order {
            let n = &g.nodes()[i];
            map.insert(n.id, h.add_node(&n.label, n.properties.clone()).unwrap());
        }
        for e in g.edges().iter().rev() {
            h.add_edge(&e.relation, map[&e.source], map[&e.target], e.properties.clone()).unwrap();
        }
        prop_assert_eq!(co_solvent_query(&h), co_solvent_query(&g));
    }
}
