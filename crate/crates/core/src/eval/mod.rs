//! Filtered tail-ranking evaluation.
//!
//! For a test triple `(h, r, t)` every candidate tail is scored; in the
//! filtered setting other known true tails of `(h, r, ?)` are removed first.
//! Ties are resolved by a [`TiePolicy`] and the resulting ranks are folded
//! into MRR, Hits@K, mean rank and AMRI, where
//! `AMRI = 1 - (MR - 1) / E[MR - 1]` and `E[MR - 1] = mean((|C| - 1) / 2)` is
//! the expectation under a uniformly random scorer.

mod metrics;
pub(crate) mod table;

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use metrics::{amri, hits_at_k, mean_rank, mrr, pairwise_sum};
pub use table::render_table;

use crate::graph::Triple;
use crate::kge::{score_tails, KgeError, ModelParameters, TripleStore};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("nothing to evaluate")]
    EmptyInput,
    #[error("true tail {tail} is not among the candidates of ({head}, {relation}, ?)")]
    TrueTailNotInCandidates { head: usize, relation: usize, tail: usize },
    #[error(transparent)]
    Kge(#[from] KgeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TiePolicy {
    /// `1 + #{strictly better}`
    Optimistic,
    /// `#{better or equal}`, counting the true tail itself
    Pessimistic,
    /// Mean of the two.
    #[default]
    Realistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidatePolicy {
    AllEntities,
    /// Entities whose label appears as a tail of the relation; all entities
    /// when the store has no labels.
    #[default]
    TypeConstrained,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalSetting {
    pub filtered: bool,
    pub tie_policy: TiePolicy,
    pub candidates: CandidatePolicy,
}

impl Default for EvalSetting {
    fn default() -> Self {
        EvalSetting {
            filtered: true,
            tie_policy: TiePolicy::Realistic,
            candidates: CandidatePolicy::TypeConstrained,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankingResult {
    pub head: usize,
    pub relation: usize,
    pub tail: usize,
    /// 1-based; fractional under the realistic tie policy.
    pub rank: f64,
    /// Candidates left after filtering, the true tail included.
    pub candidates: usize,
}

/// Ranks `tail` among `candidates` given one score per entity.
///
/// `exclude` lists entities to drop from the candidate set (other true tails
/// in the filtered setting); the true tail itself is never dropped.
pub fn rank_from_scores(
    scores: &[f64],
    (head, relation, tail): (usize, usize, usize),
    candidates: &[usize],
    exclude: &[usize],
    tie: TiePolicy,
) -> Result<RankingResult, EvalError> {
    if !candidates.contains(&tail) {
        return Err(EvalError::TrueTailNotInCandidates { head, relation, tail });
    }
    let exclude: HashSet<usize> = exclude.iter().copied().filter(|&e| e != tail).collect();
    let target = scores[tail];
    let (mut greater, mut equal, mut size) = (0usize, 0usize, 0usize);
    for &c in candidates {
        if exclude.contains(&c) {
            continue;
        }
        size += 1;
        if c == tail {
            continue;
        }
        if scores[c] > target {
            greater += 1;
        } else if scores[c] == target {
            equal += 1;
        }
    }
    let optimistic = 1.0 + greater as f64;
    let pessimistic = optimistic + equal as f64;
    let rank = match tie {
        TiePolicy::Optimistic => optimistic,
        TiePolicy::Pessimistic => pessimistic,
        TiePolicy::Realistic => (optimistic + pessimistic) / 2.0,
    };
    Ok(RankingResult {
        head,
        relation,
        tail,
        rank,
        candidates: size,
    })
}

fn candidate_set(store: &TripleStore, relation: usize, policy: CandidatePolicy) -> Vec<usize> {
    match policy {
        CandidatePolicy::TypeConstrained => match store.tail_domain(relation) {
            Some(d) if !d.is_empty() => d.to_vec(),
            _ => (0..store.n_entities()).collect(),
        },
        CandidatePolicy::AllEntities => (0..store.n_entities()).collect(),
    }
}

/// Ranks the true tail of `(h, r, t)` under `setting`, using `filter` for the
/// known true triples.
pub fn rank_query(
    params: &ModelParameters,
    query: Triple,
    filter: &TripleStore,
    setting: EvalSetting,
) -> Result<RankingResult, EvalError> {
    let scores = score_tails(params, query.head, query.relation)?;
    let candidates = candidate_set(filter, query.relation, setting.candidates);
    let exclude = if setting.filtered {
        filter.known_tails(query.head, query.relation)
    } else {
        &[]
    };
    rank_from_scores(
        &scores,
        (query.head, query.relation, query.tail),
        &candidates,
        exclude,
        setting.tie_policy,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub model: String,
    pub n: usize,
    pub mrr: f64,
    pub amri: f64,
    /// Keys `"1"`, `"5"`, `"10"`.
    pub hits: BTreeMap<String, f64>,
    pub mean_rank: f64,
    pub setting: EvalSetting,
}

impl MetricsReport {
    pub fn from_rankings(model: &str, rankings: &[RankingResult], setting: EvalSetting) -> Result<Self, EvalError> {
        let ranks: Vec<f64> = rankings.iter().map(|r| r.rank).collect();
        let mut hits = BTreeMap::new();
        for k in [1, 5, 10] {
            hits.insert(k.to_string(), hits_at_k(&ranks, k)?);
        }
        Ok(MetricsReport {
            model: model.to_owned(),
            n: rankings.len(),
            mrr: mrr(&ranks)?,
            amri: amri(rankings)?,
            hits,
            mean_rank: mean_rank(&ranks)?,
            setting,
        })
    }

    pub fn hits_at(&self, k: usize) -> f64 {
        self.hits.get(&k.to_string()).copied().unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub report: MetricsReport,
    pub rankings: Vec<RankingResult>,
}

/// Tail-ranks every test triple and aggregates the metrics. Queries run in
/// parallel; results and sums keep test-set order, so the output does not
/// depend on the thread count.
pub fn evaluate(
    params: &ModelParameters,
    test: &[Triple],
    filter: &TripleStore,
    setting: EvalSetting,
) -> Result<Evaluation, EvalError> {
    if test.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let rankings = test
        .par_iter()
        .map(|&q| rank_query(params, q, filter, setting))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Evaluation {
        report: MetricsReport::from_rankings(params.kind.name(), &rankings, setting)?,
        rankings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rank(scores: &[f64], tail: usize, exclude: &[usize], tie: TiePolicy) -> RankingResult {
        let cands: Vec<usize> = (0..scores.len()).collect();
        rank_from_scores(scores, (0, 0, tail), &cands, exclude, tie).unwrap()
    }

    #[test]
    fn strict_best() {
        let mut scores = vec![0.0; 10];
        scores[3] = 1.0;
        let r = rank(&scores, 3, &[], TiePolicy::Realistic);
        assert_eq!((r.rank, r.candidates), (1.0, 10));
    }

    #[test]
    fn all_tied() {
        let scores = vec![0.5; 10];
        assert_eq!(rank(&scores, 0, &[], TiePolicy::Optimistic).rank, 1.0);
        assert_eq!(rank(&scores, 0, &[], TiePolicy::Pessimistic).rank, 10.0);
        assert_eq!(rank(&scores, 0, &[], TiePolicy::Realistic).rank, 5.5);
    }

    #[test]
    fn filtering_shrinks_candidates() {
        let scores: Vec<f64> = (0..10).map(f64::from).collect();
        let r = rank(&scores, 0, &[0, 7, 8, 9], TiePolicy::Realistic);
        assert_eq!(r.candidates, 7);
        assert_eq!(r.rank, 7.0);
    }

    #[test]
    fn missing_true_tail() {
        let err = rank_from_scores(&[0.0; 3], (0, 0, 2), &[0, 1], &[], TiePolicy::Realistic).unwrap_err();
        assert!(matches!(err, EvalError::TrueTailNotInCandidates { tail: 2, .. }));
    }
}
