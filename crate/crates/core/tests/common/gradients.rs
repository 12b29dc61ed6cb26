//! Analytic gradients against central finite differences.

use mofkg::kge::{
    conve_min_preactivation, init_model_with_shape, score, score_gradient, ConvShape, ModelKind, ModelParameters,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const STEP: f64 = 1e-5;
pub const TOLERANCE: f64 = 1e-4;

pub fn small_shape() -> ConvShape {
    ConvShape {
        rows: 2,
        cols: 4,
        filters: 3,
        kernel: 2,
    }
}

/// Worst relative error over every parameter the triple touches, plus a check
/// that every other parameter has zero gradient. Relative error is measured
/// against `max(|analytic|, |numeric|, 1e-6)`.
pub fn check(params: &ModelParameters, h: usize, r: usize, t: usize) -> f64 {
    let grad = score_gradient(params, h, r, t).unwrap();
    let mut probe = params.clone();
    let mut worst: f64 = 0.0;
    for k in 0..params.tables.len() {
        let analytic = grad.table(k);
        assert_eq!(analytic.len(), params.tables[k].data.len());
        for (idx, &a) in analytic.iter().enumerate() {
            let orig = probe.tables[k].data[idx];
            probe.tables[k].data[idx] = orig + STEP;
            let up = score(&probe, h, r, t).unwrap();
            probe.tables[k].data[idx] = orig - STEP;
            let down = score(&probe, h, r, t).unwrap();
            probe.tables[k].data[idx] = orig;
            let numeric = (up - down) / (2.0 * STEP);
            if a == 0.0 && numeric.abs() < 1e-9 {
                continue;
            }
            let denom = a.abs().max(numeric.abs()).max(1e-6);
            worst = worst.max((a - numeric).abs() / denom);
        }
    }
    worst
}

/// Worst error of each of `n` random draws. Draws at a kink (ReLU at zero,
/// TransE distance at zero) are redrawn.
pub fn draws(kind: ModelKind, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (entities, relations, dim) = (5, 3, 8);
    let mut errors = Vec::new();
    let mut attempt = 0u64;
    while errors.len() < n {
        attempt += 1;
        let params =
            init_model_with_shape(kind, dim, entities, relations, small_shape(), seed * 1000 + attempt).unwrap();
        let (h, r, t) = (
            rng.random_range(0..entities),
            rng.random_range(0..relations),
            rng.random_range(0..entities),
        );
        if kind == ModelKind::ConvE && conve_min_preactivation(&params, h, r) < 1e-6 {
            continue;
        }
        if kind == ModelKind::TransE && score(&params, h, r, t).unwrap().abs() < 1e-6 {
            continue;
        }
        errors.push(check(&params, h, r, t));
    }
    errors
}
