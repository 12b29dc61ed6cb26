//! A sort-based ranking oracle and the fixtures it is compared on.

use std::collections::BTreeSet;

use mofkg::eval::{
    amri, evaluate, hits_at_k, mean_rank, mrr, rank_from_scores, CandidatePolicy, EvalSetting, RankingResult, TiePolicy,
};
use mofkg::graph::Triple;
use mofkg::kge::{init_model_with_shape, score, ConvShape, ModelKind, ModelParameters, TripleStore};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOY_SHAPE: ConvShape = ConvShape {
    rows: 2,
    cols: 2,
    filters: 2,
    kernel: 2,
};

fn toy_store(n_entities: usize, rng: &mut ChaCha8Rng) -> TripleStore {
    let labels: Vec<String> = (0..n_entities)
        .map(|e| if e < n_entities.div_ceil(2) { "MOF" } else { "Solvent" }.to_owned())
        .collect();
    let mut triples = BTreeSet::new();
    for _ in 0..2 * n_entities {
        let r = rng.random_range(0..2);
        let h = rng.random_range(0..n_entities);
        let t = rng.random_range(0..n_entities);
        triples.insert(Triple::new(h, r, t));
    }
    TripleStore::new(triples.into_iter().collect(), n_entities, 2)
        .unwrap()
        .with_labels(labels)
        .unwrap()
}

/// Rounds every parameter to a multiple of ½ so that exact score ties occur.
fn coarsen(mut p: ModelParameters) -> ModelParameters {
    for t in &mut p.tables {
        t.data.iter_mut().for_each(|v| *v = (*v * 2.0).round() / 2.0);
    }
    p
}

fn oracle_score(p: &ModelParameters, h: usize, r: usize, t: usize) -> f64 {
    match p.kind {
        ModelKind::DistMult => {
            let (e, rel) = (&p.tables[0], &p.tables[1]);
            (0..p.dim).map(|i| e.row(h)[i] * rel.row(r)[i] * e.row(t)[i]).sum()
        }
        _ => score(p, h, r, t).unwrap(),
    }
}

/// Sort-based ranking over an explicitly built candidate list.
fn oracle_rank(p: &ModelParameters, q: Triple, filter: &TripleStore, setting: EvalSetting) -> (f64, usize) {
    let all: Vec<usize> = (0..p.n_entities).collect();
    let mut candidates = match setting.candidates {
        CandidatePolicy::AllEntities => all,
        CandidatePolicy::TypeConstrained => {
            let labels = filter.labels().unwrap();
            let tail_labels: BTreeSet<&str> = filter
                .triples()
                .iter()
                .filter(|t| t.relation == q.relation)
                .map(|t| labels[t.tail].as_str())
                .collect();
            let typed: Vec<usize> = all
                .iter()
                .copied()
                .filter(|&e| tail_labels.contains(labels[e].as_str()))
                .collect();
            if typed.is_empty() {
                all
            } else {
                typed
            }
        }
    };
    if setting.filtered {
        candidates.retain(|&e| {
            e == q.tail
                || !filter
                    .triples()
                    .iter()
                    .any(|t| t.head == q.head && t.relation == q.relation && t.tail == e)
        });
    }
    let mut scores: Vec<f64> = candidates
        .iter()
        .map(|&e| oracle_score(p, q.head, q.relation, e))
        .collect();
    let target = oracle_score(p, q.head, q.relation, q.tail);
    scores.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let first = scores.iter().position(|&s| s == target).unwrap() + 1;
    let last = scores.iter().rposition(|&s| s == target).unwrap() + 1;
    let rank = match setting.tie_policy {
        TiePolicy::Optimistic => first as f64,
        TiePolicy::Pessimistic => last as f64,
        TiePolicy::Realistic => (first + last) as f64 / 2.0,
    };
    (rank, candidates.len())
}

fn all_settings() -> Vec<EvalSetting> {
    let mut out = Vec::new();
    for filtered in [true, false] {
        for tie_policy in [TiePolicy::Optimistic, TiePolicy::Pessimistic, TiePolicy::Realistic] {
            for candidates in [CandidatePolicy::AllEntities, CandidatePolicy::TypeConstrained] {
                out.push(EvalSetting {
                    filtered,
                    tie_policy,
                    candidates,
                });
            }
        }
    }
    out
}

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Compares `evaluate` with the oracle for every model, tie policy,
/// candidate policy and filter setting on random stores with 2 to 20
/// entities. Returns the number of queries checked.
pub fn brute_force_agreement() -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for n_entities in 2..=20 {
        let store = toy_store(n_entities, &mut rng);
        for kind in ModelKind::ALL {
            let raw = init_model_with_shape(kind, 4, n_entities, 2, TOY_SHAPE, n_entities as u64).unwrap();
            for params in [raw.clone(), coarsen(raw)] {
                for setting in all_settings() {
                    let got = evaluate(&params, store.triples(), &store, setting).map_err(|e| e.to_string())?;
                    let mut ranks = Vec::new();
                    let mut expected_span = 0.0;
                    for (q, r) in store.triples().iter().zip(&got.rankings) {
                        let (rank, size) = oracle_rank(&params, *q, &store, setting);
                        if (r.rank, r.candidates) != (rank, size) {
                            return Err(format!(
                                "{kind} E={n_entities} {setting:?} {q:?}: got ({}, {}), oracle ({rank}, {size})",
                                r.rank, r.candidates
                            ));
                        }
                        ranks.push(rank);
                        expected_span += (size as f64 - 1.0) / 2.0;
                        checked += 1;
                    }
                    let n = ranks.len() as f64;
                    let rep = &got.report;
                    let mut expected = vec![
                        ("MRR", rep.mrr, ranks.iter().map(|r| 1.0 / r).sum::<f64>() / n),
                        ("MR", rep.mean_rank, ranks.iter().sum::<f64>() / n),
                    ];
                    for k in [1, 5, 10] {
                        let hits = ranks.iter().filter(|&&r| r <= k as f64).count() as f64 / n;
                        expected.push(("Hits@k", rep.hits_at(k), hits));
                    }
                    let expected_amri = if expected_span == 0.0 {
                        0.0
                    } else {
                        1.0 - (rep.mean_rank - 1.0) / (expected_span / n)
                    };
                    expected.push(("AMRI", rep.amri, expected_amri));
                    for (name, got, want) in expected {
                        if !close(got, want) {
                            return Err(format!("{kind} E={n_entities} {setting:?}: {name} {got} vs {want}"));
                        }
                    }
                }
            }
        }
    }
    Ok(checked)
}

pub fn results(ranks: &[f64], size: usize) -> Vec<RankingResult> {
    ranks
        .iter()
        .map(|&rank| RankingResult {
            head: 0,
            relation: 0,
            tail: 0,
            rank,
            candidates: size,
        })
        .collect()
}

/// Hand-computed metric values, as `(what, got, expected)`.
pub fn metric_fixtures() -> Vec<(&'static str, f64, f64)> {
    vec![
        ("MRR of ranks 1, 2, 4", mrr(&[1.0, 2.0, 4.0]).unwrap(), 7.0 / 12.0),
        ("AMRI with every rank 1", amri(&results(&[1.0; 5], 9)).unwrap(), 1.0),
        ("AMRI at the expected rank", amri(&results(&[2.0; 5], 3)).unwrap(), 0.0),
        ("AMRI with every rank last", amri(&results(&[7.0; 4], 7)).unwrap(), -1.0),
        ("AMRI with one candidate", amri(&results(&[1.0; 3], 1)).unwrap(), 0.0),
        (
            "Hits@1 of ranks 1, 2, 4",
            hits_at_k(&[1.0, 2.0, 4.0], 1).unwrap(),
            1.0 / 3.0,
        ),
        ("MR of ranks 1, 2, 4", mean_rank(&[1.0, 2.0, 4.0]).unwrap(), 7.0 / 3.0),
    ]
}

/// AMRI of a scorer that draws every score uniformly at random.
pub fn random_scorer_amri(seed: u64, queries: usize, size: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cands: Vec<usize> = (0..size).collect();
    let rankings: Vec<RankingResult> = (0..queries)
        .map(|_| {
            let scores: Vec<f64> = (0..size).map(|_| rng.random()).collect();
            let tail = rng.random_range(0..size);
            rank_from_scores(&scores, (0, 0, tail), &cands, &[], TiePolicy::Realistic).unwrap()
        })
        .collect();
    amri(&rankings).unwrap()
}
