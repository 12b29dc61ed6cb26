use super::{EvalError, RankingResult};

/// Pairwise (cascade) summation in index order. The result depends only on
/// the values and their order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

fn mean(values: &[f64]) -> Result<f64, EvalError> {
    if values.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    Ok(pairwise_sum(values) / values.len() as f64)
}

/// Mean reciprocal rank.
pub fn mrr(ranks: &[f64]) -> Result<f64, EvalError> {
    let inv: Vec<f64> = ranks.iter().map(|r| 1.0 / r).collect();
    mean(&inv)
}

/// Fraction of ranks `≤ k`. Fractional ranks compare numerically, so 5.5
/// counts for K = 10 but not for K = 5.
pub fn hits_at_k(ranks: &[f64], k: usize) -> Result<f64, EvalError> {
    if ranks.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    Ok(ranks.iter().filter(|&&r| r <= k as f64).count() as f64 / ranks.len() as f64)
}

pub fn mean_rank(ranks: &[f64]) -> Result<f64, EvalError> {
    mean(ranks)
}

/// Adjusted arithmetic mean rank index: 1 for a perfect scorer, 0 in
/// expectation for a random one, −1 when every true tail ranks last. Defined
/// as 0 when every candidate set has a single member.
pub fn amri(results: &[RankingResult]) -> Result<f64, EvalError> {
    if results.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let ranks: Vec<f64> = results.iter().map(|r| r.rank).collect();
    let expected: Vec<f64> = results.iter().map(|r| (r.candidates as f64 - 1.0) / 2.0).collect();
    let expected_minus_one = mean(&expected)?;
    if expected_minus_one == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 - (mean(&ranks)? - 1.0) / expected_minus_one)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn results(pairs: &[(f64, usize)]) -> Vec<RankingResult> {
        pairs
            .iter()
            .map(|&(rank, candidates)| RankingResult {
                head: 0,
                relation: 0,
                tail: 0,
                rank,
                candidates,
            })
            .collect()
    }

    #[test]
    fn reciprocal_rank() {
        assert_eq!(mrr(&[1.0, 1.0, 1.0]).unwrap(), 1.0);
        assert!((mrr(&[1.0, 2.0, 4.0]).unwrap() - 1.75 / 3.0).abs() < 1e-12);
        assert!(matches!(mrr(&[]), Err(EvalError::EmptyInput)));
    }

    #[test]
    fn hits() {
        assert!((hits_at_k(&[1.0, 2.0, 11.0], 10).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(hits_at_k(&[5.5], 5).unwrap(), 0.0);
        assert_eq!(hits_at_k(&[5.5], 10).unwrap(), 1.0);
    }

    #[test]
    fn amri_reference_points() {
        assert_eq!(amri(&results(&[(1.0, 10), (1.0, 4)])).unwrap(), 1.0);
        assert_eq!(amri(&results(&[(2.0, 3), (2.0, 3)])).unwrap(), 0.0);
        assert_eq!(amri(&results(&[(10.0, 10), (4.0, 4)])).unwrap(), -1.0);
        assert_eq!(amri(&results(&[(1.0, 1)])).unwrap(), 0.0);
    }

    #[test]
    fn pairwise_matches_naive_on_integers() {
        let v: Vec<f64> = (0..1000).map(f64::from).collect();
        assert_eq!(pairwise_sum(&v), 499_500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }
}
