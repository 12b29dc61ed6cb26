//! Analytic gradients against central finite differences.

mod common;

use mofkg::kge::{conve_min_preactivation, init_model_with_shape, ConvShape, ModelKind};

use common::gradients::{check, draws, TOLERANCE};

#[test]
fn gradients_match_finite_differences() {
    for kind in ModelKind::ALL {
        let errors = draws(kind, 100, 17);
        let worst = errors.iter().cloned().fold(0.0, f64::max);
        assert!(worst < TOLERANCE, "{kind}: worst relative error {worst:e}");
    }
}

#[test]
fn conve_gradient_at_default_shape() {
    let params = init_model_with_shape(ModelKind::ConvE, 64, 4, 2, ConvShape::default(), 5).unwrap();
    assert!(conve_min_preactivation(&params, 1, 0) > 1e-6);
    assert!(check(&params, 1, 0, 2) < TOLERANCE);
    assert!(check(&params, 3, 1, 3) < TOLERANCE);
}
