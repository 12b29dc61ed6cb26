mod common;

use mofkg::graph::{Triple, Vocab};
use mofkg::ingest::load_triples_tsv;
use mofkg::kge::{
    init_model, load_checkpoint, negative_sample, save_checkpoint, score, train, Checkpoint, LossKind, ModelKind,
    SamplingPolicy, TrainConfig, TripleStore,
};
use mofkg::rng;
use proptest::prelude::*;

use common::fixture_dir;

fn smoke_store() -> (TripleStore, Vocab) {
    let text = std::fs::read_to_string(fixture_dir("smoke.tsv")).unwrap();
    let triples = load_triples_tsv(&text).unwrap();
    let mut names: Vec<String> = triples.iter().flat_map(|t| [t.head.clone(), t.tail.clone()]).collect();
    names.sort();
    names.dedup();
    let entities = Vocab::from_names(names);
    let mut rels: Vec<String> = triples.iter().map(|t| t.relation.clone()).collect();
    rels.sort();
    rels.dedup();
    let relations = Vocab::from_names(rels);
    let dense = triples
        .iter()
        .map(|t| {
            Triple::new(
                entities.get(&t.head).unwrap(),
                relations.get(&t.relation).unwrap(),
                entities.get(&t.tail).unwrap(),
            )
        })
        .collect();
    let labels = entities
        .names()
        .iter()
        .map(|n| n.split(':').next().unwrap().to_owned())
        .collect();
    let store = TripleStore::new(dense, entities.len(), relations.len())
        .unwrap()
        .with_labels(labels)
        .unwrap();
    (store, entities)
}

#[test]
fn smoke_fixture_has_twenty_triples() {
    let (store, entities) = smoke_store();
    assert_eq!(store.len(), 20);
    assert_eq!(entities.len(), 14);
}

#[test]
fn distmult_margin_loss_decreases_on_smoke_fixture() {
    let (store, _) = smoke_store();
    let config = TrainConfig {
        model: ModelKind::DistMult,
        epochs: 50,
        loss: Some(LossKind::Margin),
        ..TrainConfig::default()
    };
    let report = train(&store, &config).unwrap().report;
    let (first, last) = (report.epochs[0].loss, report.epochs.last().unwrap().loss);
    assert!(last < first, "initial {first}, final {last}");
}

#[test]
fn default_config_loss_is_non_increasing_on_smoke_fixture() {
    let (store, _) = smoke_store();
    let report = train(&store, &TrainConfig::default()).unwrap().report;
    let losses: Vec<f64> = report.epochs.iter().map(|e| e.loss).collect();
    for (epoch, w) in losses.windows(2).enumerate() {
        assert!(
            w[1] <= w[0],
            "epoch {} -> {}: {} -> {}",
            epoch + 1,
            epoch + 2,
            w[0],
            w[1]
        );
    }
}

#[test]
fn every_model_trains_on_smoke_fixture() {
    let (store, _) = smoke_store();
    for kind in ModelKind::ALL {
        let config = TrainConfig {
            epochs: 30,
            ..TrainConfig::for_model(kind)
        };
        let trained = train(&store, &config).unwrap();
        assert!(trained.params.all_finite(), "{kind}");
        let losses = &trained.report.epochs;
        assert!(losses.last().unwrap().loss < losses[0].loss, "{kind}");
    }
}

#[test]
fn same_seed_gives_identical_parameters() {
    let (store, _) = smoke_store();
    for kind in ModelKind::ALL {
        let config = TrainConfig {
            epochs: 5,
            ..TrainConfig::for_model(kind)
        };
        let a = train(&store, &config).unwrap().params;
        let b = train(&store, &config).unwrap().params;
        assert_eq!(a, b, "{kind}");
        let other = train(&store, &TrainConfig { seed: 7, ..config }).unwrap().params;
        assert_ne!(a, other, "{kind}");
    }
}

#[test]
fn zero_learning_rate_only_renormalizes() {
    let (store, _) = smoke_store();
    for kind in ModelKind::ALL {
        let config = TrainConfig {
            epochs: 1,
            learning_rate: 0.0,
            ..TrainConfig::for_model(kind)
        };
        let trained = train(&store, &config).unwrap().params;
        let mut expected = init_model(kind, config.dim, store.n_entities(), store.n_relations(), config.seed).unwrap();
        expected.renormalize_entities();
        assert_eq!(trained, expected, "{kind}");
    }
}

#[test]
fn checkpoint_file_round_trip_is_bit_exact() {
    let (store, entities) = smoke_store();
    let dir = tempfile::tempdir().unwrap();
    for kind in ModelKind::ALL {
        let config = TrainConfig {
            epochs: 2,
            ..TrainConfig::for_model(kind)
        };
        let params = train(&store, &config).unwrap().params;
        let ckpt = Checkpoint::new(
            params,
            config.seed,
            config.digest(),
            entities.digest(),
            vec!["DESCRIBES".into(), "HAS_ATOM".into(), "HAS_SOLVENT".into()],
        );
        let path = dir.path().join(format!("{kind}.ckpt"));
        save_checkpoint(&path, &ckpt).unwrap();
        let back = load_checkpoint(&path).unwrap();
        assert_eq!(back.to_bytes(), ckpt.to_bytes(), "{kind}");
        assert_eq!(back, ckpt);
    }
}

#[test]
fn negative_sampling_statistics() {
    let (store, _) = smoke_store();
    let mut rng = rng::seeded(11);
    let draws = 10_000;
    let mut heads = 0;
    for i in 0..draws {
        let pos = store.triples()[i % store.len()];
        let neg = negative_sample(&pos, &store, &mut rng, SamplingPolicy::Uniform);
        assert!(!store.contains(&neg.triple));
        assert!(!neg.unfiltered);
        if neg.corrupted_head {
            heads += 1;
            assert_eq!((neg.triple.relation, neg.triple.tail), (pos.relation, pos.tail));
        } else {
            assert_eq!((neg.triple.head, neg.triple.relation), (pos.head, pos.relation));
        }
    }
    let ratio = heads as f64 / draws as f64;
    assert!((ratio - 0.5).abs() <= 0.02, "head ratio {ratio}");
}

#[test]
fn type_constrained_tails_are_solvents() {
    let (store, entities) = smoke_store();
    let mut rng = rng::seeded(3);
    let solvent_rel = store
        .triples()
        .iter()
        .find(|t| entities.name(t.tail).unwrap().starts_with("Solvent:"))
        .unwrap()
        .relation;
    let mut tails = 0;
    for i in 0..2_000 {
        let pos = store
            .triples()
            .iter()
            .filter(|t| t.relation == solvent_rel)
            .nth(i % 5)
            .copied()
            .unwrap();
        let neg = negative_sample(&pos, &store, &mut rng, SamplingPolicy::TypeConstrained);
        if !neg.corrupted_head {
            tails += 1;
            assert!(entities.name(neg.triple.tail).unwrap().starts_with("Solvent:"));
        } else {
            assert!(entities.name(neg.triple.head).unwrap().starts_with("MOF:"));
        }
    }
    assert!(tails > 0);
}

#[test]
fn two_entity_store_corrupts_away_from_the_positive() {
    let store = TripleStore::new(vec![Triple::new(0, 0, 1)], 2, 1).unwrap();
    let mut rng = rng::seeded(0);
    for _ in 0..100 {
        let neg = negative_sample(&store.triples()[0], &store, &mut rng, SamplingPolicy::Uniform);
        assert_ne!(neg.triple, store.triples()[0]);
    }
}

fn entity_count() -> impl Strategy<Value = (usize, usize, usize, u64)> {
    (2usize..12).prop_flat_map(|e| (Just(e), 0..e, 0..e, any::<u64>()))
}

proptest! {
    #[test]
    fn distmult_is_symmetric((e, h, t, seed) in entity_count()) {
        let p = init_model(ModelKind::DistMult, 16, e, 2, seed).unwrap();
        prop_assert_eq!(score(&p, h, 1, t).unwrap(), score(&p, t, 1, h).unwrap());
    }

    #[test]
    fn transe_is_translation_invariant((e, h, t, seed) in entity_count(), shift in prop::collection::vec(-3.0f64..3.0, 16)) {
        let p = init_model(ModelKind::TransE, 16, e, 2, seed).unwrap();
        let mut moved = p.clone();
        for row in moved.tables[0].data.chunks_mut(16) {
            row.iter_mut().zip(&shift).for_each(|(v, s)| *v += s);
        }
        let (a, b) = (score(&p, h, 0, t).unwrap(), score(&moved, h, 0, t).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{} vs {}", a, b);
    }

    #[test]
    fn complex_with_zero_imaginary_parts_is_distmult((e, h, t, seed) in entity_count()) {
        let d = 8;
        let dm = init_model(ModelKind::DistMult, d, e, 2, seed).unwrap();
        let mut cx = init_model(ModelKind::ComplEx, d, e, 2, seed).unwrap();
        for (table, src) in cx.tables.iter_mut().zip(&dm.tables) {
            for (pair, &re) in table.data.chunks_mut(2).zip(&src.data) {
                pair[0] = re;
                pair[1] = 0.0;
            }
        }
        prop_assert_eq!(score(&cx, h, 1, t).unwrap(), score(&dm, h, 1, t).unwrap());
    }

    #[test]
    fn simple_with_shared_roles_is_distmult((e, h, t, seed) in entity_count()) {
        let d = 8;
        let dm = init_model(ModelKind::DistMult, d, e, 2, seed).unwrap();
        let mut se = init_model(ModelKind::SimplE, d, e, 2, seed).unwrap();
        se.tables[0].data.clone_from(&dm.tables[0].data);
        se.tables[1].data.clone_from(&dm.tables[0].data);
        se.tables[2].data.clone_from(&dm.tables[1].data);
        se.tables[3].data.clone_from(&dm.tables[1].data);
        let (a, b) = (score(&se, h, 1, t).unwrap(), score(&dm, h, 1, t).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{} vs {}", a, b);
    }
}
