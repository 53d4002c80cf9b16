//! Shared inputs for the phiform benchmarks.

use phiform_core::{gaussian_charge, trial_fbeta, FormParams, QuadratureSpec, RadialCharge};

/// Charges benchmarked by every form group, labelled for criterion ids.
pub fn charges() -> Vec<(&'static str, RadialCharge)> {
    vec![
        ("gaussian_1", gaussian_charge(1.0).expect("valid scale")),
        ("fbeta_1", trial_fbeta(1.0).expect("valid beta")),
        ("fbeta_0.3", trial_fbeta(0.3).expect("valid beta")),
    ]
}

pub fn params(gamma: f64, lambda: f64) -> FormParams {
    FormParams::new(gamma, lambda).expect("valid parameters")
}

pub fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}
