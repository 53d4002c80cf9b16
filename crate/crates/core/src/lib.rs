//! Numerical evaluation of the regularized three-boson zero-range quadratic
//! form `Φ^λ` in the momentum, Mellin-diagonalized and position
//! representations, with the stability thresholds and the collapse sweep.

#![allow(clippy::excessive_precision, clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod charges;
pub mod error;
pub mod momentum_forms;
pub mod position_forms;
pub mod quadrature;
pub mod specfun;
pub mod stability;

pub use charges::{
    gaussian_charge, gaussian_mixture, parse_charge, scale_charge, trial_fbeta, ChargeFamily, ChargeSpec,
    MellinProfile, MixtureTerm, RadialCharge, ThetaProfile,
};
pub use error::{Error, Result};
pub use momentum_forms::{DiagonalizedComponents, FormBreakdown, FormParams};
pub use position_forms::{CoerciveThreshold, HardyRellich, PositionFormBreakdown, SandwichBounds};
pub use quadrature::{QuadResult, QuadratureSpec, Scheme};
pub use stability::{CollapseVerdict, ScalingFit, SweepEntry, SweepRecord};
