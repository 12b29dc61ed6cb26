use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::store::TripleStore;
use crate::graph::Triple;
use crate::rng::Rng;

/// Where replacement entities come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingPolicy {
    /// Any entity.
    #[default]
    Uniform,
    /// Entities whose label occurs at that position of the relation, e.g.
    /// only solvents for `HAS_SOLVENT` tails. Falls back to uniform when the
    /// store has no labels.
    TypeConstrained,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NegativeSample {
    pub triple: Triple,
    /// True when the head was replaced, false for the tail.
    pub corrupted_head: bool,
    /// Set when no false triple was found within the attempt budget and the
    /// last draw was returned as is.
    pub unfiltered: bool,
}

pub const MAX_ATTEMPTS: usize = 100;

/// Corrupts the head or the tail (each with probability ½) with a random
/// entity, redrawing while the result is a known true triple.
pub fn negative_sample(triple: &Triple, store: &TripleStore, rng: &mut Rng, policy: SamplingPolicy) -> NegativeSample {
    let corrupted_head = rng.random_bool(0.5);
    let domain = match policy {
        SamplingPolicy::Uniform => None,
        SamplingPolicy::TypeConstrained if corrupted_head => store.head_domain(triple.relation),
        SamplingPolicy::TypeConstrained => store.tail_domain(triple.relation),
    }
    .filter(|d| !d.is_empty());
    let mut candidate = *triple;
    for _ in 0..MAX_ATTEMPTS {
        let e = match domain {
            Some(d) => d[rng.random_range(0..d.len())],
            None => rng.random_range(0..store.n_entities()),
        };
        candidate = if corrupted_head {
            Triple::new(e, triple.relation, triple.tail)
        } else {
            Triple::new(triple.head, triple.relation, e)
        };
        if !store.contains(&candidate) {
            return NegativeSample {
                triple: candidate,
                corrupted_head,
                unfiltered: false,
            };
        }
    }
    NegativeSample {
        triple: candidate,
        corrupted_head,
        unfiltered: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn two_entity_store() {
        let store = TripleStore::new(vec![Triple::new(0, 0, 1)], 2, 1).unwrap();
        let mut rng = seeded(1);
        for _ in 0..200 {
            let n = negative_sample(&store.triples()[0], &store, &mut rng, SamplingPolicy::Uniform);
            assert_ne!(n.triple, store.triples()[0]);
            assert!(!n.unfiltered);
        }
    }

    #[test]
    fn exhausted_budget_is_flagged() {
        let all: Vec<Triple> = (0..2).flat_map(|h| (0..2).map(move |t| Triple::new(h, 0, t))).collect();
        let store = TripleStore::new(all, 2, 1).unwrap();
        let n = negative_sample(&Triple::new(0, 0, 0), &store, &mut seeded(0), SamplingPolicy::Uniform);
        assert!(n.unfiltered);
    }
}
