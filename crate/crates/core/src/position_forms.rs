//! Position-space representation of the form components, the off-diagonal
//! negative/positive decomposition, and the bounds built on them.
//!
//! Angular integrals over the relative direction of `x` and `y` are done in
//! closed form. With `D(z) = K₂(z) − K₀(z) = 2K₁(z)/z` and `c = √(4λ/3)`,
//!
//! ```text
//! ∫_{-1}^{1} du K₂(c|x−y|)/|x−y|² = (2xy)⁻¹ [D(c|x−y|) − D(c(x+y))]
//! ∫_{-1}^{1} du K₂(c√Q)/Q         = (xy)⁻¹  [D(z₋) − D(z₊)],   Q = x² + y² + xyu
//! ```
//!
//! where `z± = c√(x² + y² ± xy)`; both follow from `(K₁(z)/z)' = −K₂(z)/z`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::charges::{gagliardo_seminorm_sq, RadialCharge};
use crate::error::{Error, Result};
use crate::momentum_forms::{phi_diag, phi_total, phi_zero, FormParams};
use crate::quadrature::{
    try_integrate, try_integrate_band_logdiag, try_integrate_box_logdiag, try_integrate_with_breaks, InnerError,
    QuadResult, QuadratureSpec,
};
use crate::specfun::{bessel_k2, bessel_k2_minus_k0};
use crate::stability::gamma_prime_critical;

/// `e^{-z}` below this is treated as zero when truncating kernel ranges.
const KERNEL_DECAY: f64 = 50.0;

/// Position-space pieces of `Φ^λ_diag + Φ^λ_off + Φ_reg`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositionFormBreakdown {
    /// `12π√λ ‖ξ‖²`
    pub diag_l2: f64,
    /// `K₂`-difference part of the diagonal term.
    pub diag_gagliardo: f64,
    /// `−24π ∫ e^{-√λ|x|} |ξ|²/|x|`
    pub off_negative: f64,
    /// `K₂`-difference part of the off-diagonal term.
    pub off_positive: f64,
    pub reg: f64,
    pub err_estimate: f64,
}

impl PositionFormBreakdown {
    pub fn diag(&self) -> f64 {
        self.diag_l2 + self.diag_gagliardo
    }

    pub fn off(&self) -> f64 {
        self.off_negative + self.off_positive
    }
}

fn check_lambda_positive(lambda: f64) -> Result<f64> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok((4.0 * lambda / 3.0).sqrt())
    } else {
        Err(Error::InvalidParams(format!("position forms need lambda > 0, got {lambda}")))
    }
}

/// `D(z) = K₂(z) − K₀(z)`, zero past underflow.
fn kernel_d(z: f64) -> Result<f64> {
    bessel_k2_minus_k0(z)
}

/// `∫₀^R w(y) ξ(y)² dy` over the position radius of `f`, split geometrically
/// towards the origin so that stretched tails and the core are both resolved.
fn radial_integral<W>(f: &RadialCharge, w: W, spec: &QuadratureSpec) -> Result<QuadResult>
where
    W: Fn(f64) -> f64,
{
    let radius = f.position_radius()?;
    let breaks = f.geometric_breaks(radius);
    try_integrate_with_breaks(
        |y| {
            let xi = f.position(y)?;
            Ok(w(y) * xi * xi)
        },
        0.0,
        radius,
        &breaks,
        spec,
    )
}

/// Returns `(12π√λ ‖ξ‖², K₂-difference term)`.
fn diag_parts(f: &RadialCharge, lambda: f64, spec: &QuadratureSpec) -> Result<(QuadResult, QuadResult)> {
    let c = check_lambda_positive(lambda)?;
    if f.is_zero() {
        return Ok((QuadResult::ZERO, QuadResult::ZERO));
    }
    let l2 = radial_integral(f, |y| y * y, spec)?.scaled(12.0 * PI * lambda.sqrt() * 4.0 * PI);
    // |ξ(x) − ξ(y)|² survives when only one point lies inside the support.
    let band = KERNEL_DECAY / c;
    let radius = f.position_radius()? + band;
    let gag = try_integrate_band_logdiag(
        |x, y| {
            let d = f.position(x)? - f.position(y)?;
            if d == 0.0 {
                return Ok(0.0);
            }
            Ok(x * y * d * d * (kernel_d(c * (x - y).abs())? - kernel_d(c * (x + y))?))
        },
        0.0,
        radius,
        band,
        spec,
    )?;
    Ok((l2, gag.scaled(2.0 * 3f64.sqrt() * lambda / PI * 4.0 * PI * PI)))
}

/// `12π√λ ‖ξ‖² + (2√3λ/π) ∫∫ |ξ(x) − ξ(y)|² K₂(c|x − y|)/|x − y|² dx dy`.
pub fn phi_diag_position(f: &RadialCharge, lambda: f64, spec: &QuadratureSpec) -> Result<QuadResult> {
    let (l2, gag) = diag_parts(f, lambda, spec)?;
    Ok(l2.plus(gag))
}

/// `∫∫_{(0, radius)²} xy a(x, y) [D(z₋) − D(z₊)] dx dy`, the radial
/// reduction of `(8π²)⁻¹ ∫∫ d³x d³y a K₂(c√Q)/Q`.
fn off_kernel_integral<A>(c: f64, radius: f64, a: A, spec: &QuadratureSpec) -> Result<QuadResult>
where
    A: Fn(f64, f64) -> Result<f64>,
{
    try_integrate_box_logdiag(
        |x, y| {
            let a = a(x, y)?;
            if a == 0.0 {
                return Ok(0.0);
            }
            let (s, m) = (x * x + y * y, x * y);
            let k = kernel_d(c * (s - m).sqrt())? - kernel_d(c * (s + m).sqrt())?;
            Ok(m * a * k)
        },
        0.0,
        radius,
        spec,
    )
}

/// `z₋ ≥ c·max(x, y)·√3/2`, so the off-diagonal kernel is negligible once
/// either radius exceeds this.
fn off_reach(c: f64) -> f64 {
    KERNEL_DECAY / (c * 0.75f64.sqrt())
}

/// `−(8√3λ/π) ∫∫ ξ(x) ξ(y) K₂(c√Q)/Q dx dy` with `Q = x² + y² + x·y`.
pub fn phi_off_position(f: &RadialCharge, lambda: f64, spec: &QuadratureSpec) -> Result<QuadResult> {
    let c = check_lambda_positive(lambda)?;
    if f.is_zero() {
        return Ok(QuadResult::ZERO);
    }
    let radius = f.position_radius()?.min(off_reach(c));
    let r = off_kernel_integral(c, radius, |x, y| Ok(f.position(x)? * f.position(y)?), spec)?;
    Ok(r.scaled(-8.0 * 3f64.sqrt() * lambda / PI * 8.0 * PI * PI))
}

/// Negative (Yukawa) and positive (`K₂`-difference) parts of `Φ^λ_off`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffDecomposition {
    pub negative: QuadResult,
    pub positive: QuadResult,
}

impl OffDecomposition {
    pub fn sum(&self) -> f64 {
        self.negative.value + self.positive.value
    }
}

/// `Φ^λ_off = −24π ∫ e^{-√λ|x|}|ξ|²/|x| + (4√3λ/π) ∫∫ |ξ(x) − ξ(y)|² K₂(c√Q)/Q`.
pub fn phi_off_decomposed(f: &RadialCharge, lambda: f64, spec: &QuadratureSpec) -> Result<OffDecomposition> {
    let c = check_lambda_positive(lambda)?;
    if f.is_zero() {
        return Ok(OffDecomposition {
            negative: QuadResult::ZERO,
            positive: QuadResult::ZERO,
        });
    }
    let k = lambda.sqrt();
    let negative = radial_integral(f, |y| y * (-k * y).exp(), spec)?.scaled(-24.0 * PI * 4.0 * PI);
    let positive = off_kernel_integral(
        c,
        off_reach(c),
        |x, y| {
            let d = f.position(x)? - f.position(y)?;
            Ok(d * d)
        },
        spec,
    )?
    .scaled(4.0 * 3f64.sqrt() * lambda / PI * 8.0 * PI * PI);
    Ok(OffDecomposition { negative, positive })
}

/// `|LHS − RHS|` of
/// `(λ/(√3π²)) ∫ d³x K₂(c√Q)/Q = e^{-√λ y}/y`, `Q = y² + x² + x·y`,
/// with the left side by nested quadrature in `|x|` and the angle cosine.
pub fn yukawa_identity_residual(lambda: f64, y: f64, spec: &QuadratureSpec) -> Result<f64> {
    let c = check_lambda_positive(lambda)?;
    if !(y.is_finite() && y > 0.0) {
        return Err(Error::InvalidParams(format!("y must be positive, got {y}")));
    }
    let inner_spec = spec.tightened(0.01);
    let inner_errors = InnerError::default();
    let reach = off_reach(c) + 2.0 * y;
    let radial = |x: f64| -> Result<f64> {
        let r = try_integrate(
            |u| {
                let q = y * y + x * x + x * y * u;
                Ok(bessel_k2(c * q.sqrt())? / q)
            },
            -1.0,
            1.0,
            &inner_spec,
        )?;
        inner_errors.record(&r);
        Ok(x * x * r.value)
    };
    let lhs = try_integrate_with_breaks(radial, 0.0, reach, &[y], spec)?;
    let lhs = lambda / (3f64.sqrt() * PI * PI) * 2.0 * PI * lhs.value;
    let rhs = (-lambda.sqrt() * y).exp() / y;
    Ok((lhs - rhs).abs())
}

/// `12πγ ∫ |ξ(x)|²/|x| d³x = 48π²γ ∫₀^∞ y ξ(y)² dy`.
pub fn phi_reg_position(f: &RadialCharge, gamma: f64, spec: &QuadratureSpec) -> Result<QuadResult> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::InvalidParams(format!("gamma must be finite and non-negative, got {gamma}")));
    }
    if gamma == 0.0 || f.is_zero() {
        return Ok(QuadResult::ZERO);
    }
    Ok(radial_integral(f, |y| y, spec)?.scaled(48.0 * PI * PI * gamma))
}

/// All position-space pieces at once.
pub fn position_breakdown(
    f: &RadialCharge,
    lambda: f64,
    gamma: f64,
    spec: &QuadratureSpec,
) -> Result<PositionFormBreakdown> {
    let (l2, gag) = diag_parts(f, lambda, spec)?;
    let off = phi_off_decomposed(f, lambda, spec)?;
    let reg = phi_reg_position(f, gamma, spec)?;
    Ok(PositionFormBreakdown {
        diag_l2: l2.value,
        diag_gagliardo: gag.value,
        off_negative: off.negative.value,
        off_positive: off.positive.value,
        reg: reg.value,
        err_estimate: l2.err_estimate
            + gag.err_estimate
            + off.negative.err_estimate
            + off.positive.err_estimate
            + reg.err_estimate,
    })
}

/// Both sides of `∫|u|²/|x| ≤ (π/2) ∫|k||û|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyRellich {
    /// `∫ |ξ|²/|x| d³x`, in position space.
    pub lhs: f64,
    /// `(π/2) ∫ |k| |ξ̂|² d³k = (4π)⁻¹ [ξ]²_{1/2}`, in momentum space.
    pub rhs: f64,
    pub gap: f64,
}

pub fn hardy_rellich_gap(f: &RadialCharge, spec: &QuadratureSpec) -> Result<HardyRellich> {
    if f.is_zero() {
        return Ok(HardyRellich {
            lhs: 0.0,
            rhs: 0.0,
            gap: 0.0,
        });
    }
    let lhs = radial_integral(f, |y| y, spec)?.value * 4.0 * PI;
    let rhs = gagliardo_seminorm_sq(f, spec)?.value / (4.0 * PI);
    Ok(HardyRellich {
        lhs,
        rhs,
        gap: rhs - lhs,
    })
}

/// Lower and upper bounds on `Φ^λ` and its value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichBounds {
    pub lower: f64,
    pub upper: f64,
    pub value: f64,
}

impl SandwichBounds {
    pub fn holds(&self) -> bool {
        self.lower <= self.value && self.value <= self.upper
    }
}

/// `lower = Φ_diag + 3 min{0, γ − 2}[ξ]² + Φ_0`,
/// `upper = Φ_diag + (3γ + 96√3/π)[ξ]² + Φ_0`, `value = Φ^λ`.
pub fn sandwich_bounds(f: &RadialCharge, params: &FormParams, spec: &QuadratureSpec) -> Result<SandwichBounds> {
    check_lambda_positive(params.lambda)?;
    params.validate()?;
    let diag = phi_diag(f, params.lambda, spec)?.value;
    let zero = phi_zero(f, params, spec)?.value;
    let seminorm = gagliardo_seminorm_sq(f, spec)?.value;
    let value = phi_total(f, params, spec)?.total;
    let g = params.gamma;
    Ok(SandwichBounds {
        lower: diag + 3.0 * (g - 2.0).min(0.0) * seminorm + zero,
        upper: diag + (3.0 * g + 96.0 * 3f64.sqrt() / PI) * seminorm + zero,
        value,
    })
}

const ESSINF_GRID: usize = 100_000;

/// Grid approximation of `ess inf_y β(y)` with `β(y) = −1/𝔞 + γ(θ(y) − 1)/y`:
/// the minimum over `10⁵` points of `(0, 10b]`, the right limits at the
/// breakpoints of `θ`, and the tail value `−1/𝔞`.
pub fn essinf_beta(params: &FormParams) -> f64 {
    let tail = -params.inv_scattering_length;
    let Some(support) = params.theta.support() else {
        return tail;
    };
    let range = 10.0 * params.theta.cutoff().max(support);
    let mut best = tail;
    for k in 1..=ESSINF_GRID {
        let y = range * k as f64 / ESSINF_GRID as f64;
        best = best.min(params.beta_potential(y));
    }
    for bp in params.theta.breakpoints() {
        if bp > 0.0 {
            best = best.min(params.beta_potential(bp * (1.0 + 1e-12)));
        }
    }
    best
}

/// Result of the position-space coercivity estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "lambda", rename_all = "snake_case")]
pub enum CoerciveThreshold {
    /// `Φ^λ > 0` for every `λ` above this value.
    Finite(f64),
    /// `γ ≤ γ′_c`: the estimate gives no threshold.
    Inconclusive,
}

impl CoerciveThreshold {
    pub fn value(&self) -> Option<f64> {
        match self {
            CoerciveThreshold::Finite(v) => Some(*v),
            CoerciveThreshold::Inconclusive => None,
        }
    }

    /// True when the estimate certifies positivity at `lambda`.
    pub fn certifies(&self, lambda: f64) -> bool {
        matches!(self, CoerciveThreshold::Finite(t) if lambda > *t)
    }
}

/// `3 min{0, ess inf β}² / (3 − π² max{0, 2 − γ}²)` for `γ > γ′_c`.
pub fn coercive_lambda_threshold(params: &FormParams) -> CoerciveThreshold {
    if params.gamma <= gamma_prime_critical() {
        return CoerciveThreshold::Inconclusive;
    }
    let denom = 3.0 - PI * PI * (2.0 - params.gamma).max(0.0).powi(2);
    if denom <= 0.0 {
        return CoerciveThreshold::Inconclusive;
    }
    let m = essinf_beta(params).min(0.0);
    CoerciveThreshold::Finite(3.0 * m * m / denom)
}

/// `|x − y|⁴/(x² + y² + x·y)²` for radii `x`, `y` and angle cosine `u`; its
/// supremum 16 is approached at `u = −1`, `x = y`.
pub fn optimal_constant_ratio(x: f64, y: f64, u: f64) -> f64 {
    let diff2 = x * x + y * y - 2.0 * x * y * u;
    let q = x * x + y * y + x * y * u;
    diff2 * diff2 / (q * q)
}
