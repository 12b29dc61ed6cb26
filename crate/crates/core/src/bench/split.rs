use rand::seq::index::sample;

use super::BenchError;
use crate::graph::Triple;
use crate::rng;

const MIN_TRIPLES: usize = 5;

/// Nearest integer, halves to even, for non-negative `x`.
pub fn round_half_even(x: f64) -> usize {
    x.round_ties_even() as usize
}

/// Holds out `round(fraction · n)` of the triples with `relation`, chosen
/// uniformly without replacement; every other triple stays in training.
/// Both halves keep the input order.
pub fn split(
    triples: &[Triple],
    relation: usize,
    relation_name: &str,
    fraction: f64,
    seed: u64,
) -> Result<(Vec<Triple>, Vec<Triple>), BenchError> {
    let target: Vec<usize> = (0..triples.len())
        .filter(|&i| triples[i].relation == relation)
        .collect();
    if target.len() < MIN_TRIPLES {
        return Err(BenchError::TooFewTriples {
            relation: relation_name.to_owned(),
            needed: MIN_TRIPLES,
            found: target.len(),
        });
    }
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(BenchError::InvalidConfig(format!(
            "test fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let n_test = round_half_even(fraction * target.len() as f64);
    if n_test == 0 || n_test == target.len() {
        return Err(BenchError::InvalidConfig(format!(
            "test fraction {fraction} of {} triples leaves an empty side",
            target.len()
        )));
    }
    let mut rng = rng::derived(seed, 11);
    let mut is_test = vec![false; triples.len()];
    for k in sample(&mut rng, target.len(), n_test) {
        is_test[target[k]] = true;
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (t, held_out) in triples.iter().zip(is_test) {
        if held_out {
            test.push(*t);
        } else {
            train.push(*t);
        }
    }
    Ok((train, test))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triples(n: usize) -> Vec<Triple> {
        (0..n).map(|i| Triple::new(i, i % 2, i + 1)).collect()
    }

    #[test]
    fn ties_to_even() {
        assert_eq!(round_half_even(53.6), 54);
        assert_eq!(round_half_even(2.5), 2);
        assert_eq!(round_half_even(3.5), 4);
        assert_eq!(round_half_even(267.99), 268);
    }

    #[test]
    fn sizes_and_disjointness() {
        let all: Vec<Triple> = (0..268).map(|i| Triple::new(i, 0, 0)).chain(triples(50)).collect();
        let (train, test) = split(&all, 0, "R", 0.2, 42).unwrap();
        let n_rel0 = all.iter().filter(|t| t.relation == 0).count();
        assert_eq!(test.len(), round_half_even(0.2 * n_rel0 as f64));
        assert_eq!(train.len() + test.len(), all.len());
        assert!(test.iter().all(|t| t.relation == 0 && !train.contains(t)));
        assert_eq!(split(&all, 0, "R", 0.2, 42).unwrap().1, test);
    }

    #[test]
    fn rejections() {
        assert!(matches!(
            split(&triples(6), 0, "R", 0.2, 0),
            Err(BenchError::TooFewTriples { found: 3, .. })
        ));
        assert!(matches!(
            split(&triples(40), 0, "R", 0.0, 0),
            Err(BenchError::InvalidConfig(_))
        ));
    }
}
