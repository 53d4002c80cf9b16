//! Deterministic quadrature for the radial, two-dimensional and bi-radial
//! integrals used by the form evaluators.
//!
//! Every routine takes a [`QuadratureSpec`] and returns a [`QuadResult`] or
//! an [`Error::Convergence`] carrying the best estimate. Integrands are
//! fallible (`Fn(f64) -> Result<f64>`) so that nested integrals propagate
//! their own failures instead of returning a silent best effort.

mod kronrod;
mod tanh_sinh;

use std::cell::Cell;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Quadrature scheme for one-dimensional panels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Globally adaptive 21-point Gauss–Kronrod.
    GaussLegendreAdaptive,
    /// Tanh-sinh with level doubling.
    DoubleExponential,
}

/// Tolerances and truncation controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Upper cut for semi-infinite domains.
    pub truncation_radius: f64,
    pub scheme: Scheme,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 2000,
            truncation_radius: 40.0,
            scheme: Scheme::GaussLegendreAdaptive,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.abs_tol) {
            return Err(Error::InvalidSpec(format!("abs_tol must be positive, got {}", self.abs_tol)));
        }
        if !ok(self.rel_tol) {
            return Err(Error::InvalidSpec(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidSpec("max_subdivisions must be at least 1".into()));
        }
        if !ok(self.truncation_radius) {
            return Err(Error::InvalidSpec(format!(
                "truncation_radius must be positive, got {}",
                self.truncation_radius
            )));
        }
        Ok(())
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_truncation_radius(mut self, radius: f64) -> Self {
        self.truncation_radius = radius;
        self
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    /// Spec for an inner integral whose values feed an outer rule.
    pub fn tightened(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            ..*self
        }
    }

    fn max_level(&self) -> usize {
        // tanh-sinh level k costs about 16·2^k evaluations
        let budget = (self.max_subdivisions.max(1) * kronrod::EVALS_PER_PANEL) as f64 / 16.0;
        (budget.log2().floor() as usize).clamp(4, 14)
    }
}

/// Value of an integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub err_estimate: f64,
    pub evaluations: usize,
}

impl QuadResult {
    pub const ZERO: QuadResult = QuadResult {
        value: 0.0,
        err_estimate: 0.0,
        evaluations: 0,
    };

    pub fn scaled(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            err_estimate: self.err_estimate * factor.abs(),
            evaluations: self.evaluations,
        }
    }

    pub fn plus(self, other: QuadResult) -> Self {
        Self {
            value: self.value + other.value,
            err_estimate: self.err_estimate + other.err_estimate,
            evaluations: self.evaluations + other.evaluations,
        }
    }
}

/// Integrate a fallible integrand over `[a, b]` with the scheme in `spec`.
pub fn try_integrate<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadResult>
where
    F: Fn(f64) -> Result<f64>,
{
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("integrate", format!("interval [{a}, {b}] must be finite")));
    }
    if a == b {
        return Ok(QuadResult::ZERO);
    }
    if b < a {
        return try_integrate(f, b, a, spec).map(|r| r.scaled(-1.0));
    }
    match spec.scheme {
        Scheme::GaussLegendreAdaptive => {
            kronrod::integrate(&f, a, b, spec.abs_tol, spec.rel_tol, spec.max_subdivisions)
        }
        Scheme::DoubleExponential => {
            tanh_sinh::integrate(&f, a, b, spec.abs_tol, spec.rel_tol, spec.max_level())
        }
    }
}

/// Integrate `f` over `[a, b]`.
pub fn integrate<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    try_integrate(|x| Ok(f(x)), a, b, spec)
}

/// Integrate a fallible integrand over `[a, b]` split at the given interior
/// breakpoints (ignored when outside the interval).
pub fn try_integrate_with_breaks<F>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<QuadResult>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut points = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    points.extend(inner);
    points.push(b);
    let pieces = points.len() - 1;
    let piece_spec = spec.with_tolerances(spec.abs_tol / pieces as f64, spec.rel_tol);
    let mut total = QuadResult::ZERO;
    for w in points.windows(2) {
        total = total.plus(try_integrate(&f, w[0], w[1], &piece_spec)?);
    }
    Ok(total)
}

/// `∫₀^∞ f(x) dx`, truncated at `spec.truncation_radius`.
///
/// The caller chooses the radius from the integrand's decay envelope; the
/// neglected tail is not included in the error estimate.
pub fn integrate_semiaxis<F>(f: F, spec: &QuadratureSpec) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    spec.validate()?;
    try_integrate(|x| Ok(f(x)), 0.0, spec.truncation_radius, spec)
}

/// Tracks the largest error estimate reported by inner integrals.
#[derive(Default)]
pub(crate) struct InnerError {
    worst: Cell<f64>,
    evaluations: Cell<usize>,
}

impl InnerError {
    pub(crate) fn record(&self, r: &QuadResult) {
        self.worst.set(self.worst.get().max(r.err_estimate));
        self.evaluations.set(self.evaluations.get() + r.evaluations);
    }

    /// Fold the inner errors into an outer result over a domain of the given
    /// measure.
    pub(crate) fn fold_into(&self, outer: QuadResult, measure: f64) -> QuadResult {
        QuadResult {
            value: outer.value,
            err_estimate: outer.err_estimate + self.worst.get() * measure.abs(),
            evaluations: outer.evaluations + self.evaluations.get(),
        }
    }
}

/// `∫∫_{[lo, hi]²} k(s, t) ds dt` for kernels that may carry an integrable
/// (logarithmic) singularity on the diagonal `s = t`.
///
/// The square is rotated to `(σ, r) = (s + t, s − t)`; the two halves
/// `r < 0` and `r > 0` are folded onto `r ∈ [0, w(σ)]` and the inner
/// integral uses tanh-sinh, whose endpoint clustering removes the diagonal
/// singularity. The outer integral in `σ` is split at the corner `σ = lo + hi`
/// where `w(σ)` has a kink.
pub fn try_integrate_box_logdiag<K>(k: K, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<QuadResult>
where
    K: Fn(f64, f64) -> Result<f64>,
{
    try_integrate_band_logdiag(k, lo, hi, f64::INFINITY, spec)
}

/// As [`try_integrate_box_logdiag`], for kernels negligible when
/// `|s − t| > band`: only the diagonal strip of half-width `band` is
/// integrated.
pub fn try_integrate_band_logdiag<K>(k: K, lo: f64, hi: f64, band: f64, spec: &QuadratureSpec) -> Result<QuadResult>
where
    K: Fn(f64, f64) -> Result<f64>,
{
    spec.validate()?;
    if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
        return Err(Error::domain("integrate_box_logdiag", format!("invalid box [{lo}, {hi}]")));
    }
    if !(band > 0.0) {
        return Err(Error::domain("integrate_band_logdiag", format!("band must be positive, got {band}")));
    }
    let side = hi - lo;
    let inner_spec = spec
        .with_tolerances(spec.abs_tol * 0.1 / (2.0 * side), spec.rel_tol * 0.1)
        .with_scheme(Scheme::DoubleExponential);
    let inner_errors = InnerError::default();

    let outer = |sigma: f64| -> Result<f64> {
        let w = (sigma - 2.0 * lo).min(2.0 * hi - sigma).min(band);
        if w <= 0.0 {
            return Ok(0.0);
        }
        // Below this offset s and t round to the same double; the skipped
        // strip carries O(cut·|ln cut|) of a log-singular integrand.
        let cut = 8.0 * f64::EPSILON * sigma.abs().max(1.0);
        let folded = |r: f64| -> Result<f64> {
            if r <= cut {
                return Ok(0.0);
            }
            let s = 0.5 * (sigma + r);
            let t = 0.5 * (sigma - r);
            Ok(k(s, t)? + k(t, s)?)
        };
        let r = try_integrate(folded, 0.0, w, &inner_spec)?;
        inner_errors.record(&r);
        Ok(0.5 * r.value)
    };

    let mut breaks = vec![lo + hi];
    if band.is_finite() {
        breaks.extend([2.0 * lo + band, 2.0 * hi - band]);
    }
    let result = try_integrate_with_breaks(outer, 2.0 * lo, 2.0 * hi, &breaks, spec)?;
    Ok(inner_errors.fold_into(result, side))
}

/// `∫∫_{(0, R)²} k(p, q) dp dq` with a logarithmic diagonal singularity
/// allowed, `R = spec.truncation_radius`.
pub fn integrate_square_logdiag<K>(k: K, spec: &QuadratureSpec) -> Result<QuadResult>
where
    K: Fn(f64, f64) -> f64,
{
    spec.validate()?;
    try_integrate_box_logdiag(|p, q| Ok(k(p, q)), 0.0, spec.truncation_radius, spec)
}

/// Six-dimensional integral of a bi-radial function,
/// `∫d³x d³y G = 8π² ∫x²dx ∫y²dy ∫_{−1}^{1} du F(x, y, u)`, where `u` is the
/// cosine of the angle between the two vectors. Both radii are truncated at
/// `spec.truncation_radius`.
pub fn integrate_radial_pair<F>(f: F, spec: &QuadratureSpec) -> Result<QuadResult>
where
    F: Fn(f64, f64, f64) -> f64,
{
    spec.validate()?;
    let radius = spec.truncation_radius;
    let mid_spec = spec.tightened(0.1);
    let inner_spec = spec.tightened(0.01);
    let mid_errors = InnerError::default();
    let inner_errors = InnerError::default();

    let outer = |x: f64| -> Result<f64> {
        let middle = |y: f64| -> Result<f64> {
            let r = try_integrate(|u| Ok(f(x, y, u)), -1.0, 1.0, &inner_spec)?;
            inner_errors.record(&r);
            Ok(y * y * r.value)
        };
        // split at y = x, where the angular integrand is least smooth
        let r = try_integrate_with_breaks(middle, 0.0, radius, &[x], &mid_spec)?;
        mid_errors.record(&r);
        Ok(x * x * r.value)
    };

    let result = try_integrate(outer, 0.0, radius, spec)?;
    let result = mid_errors.fold_into(result, radius);
    let result = inner_errors.fold_into(result, 2.0 * radius.powi(5));
    Ok(result.scaled(8.0 * PI * PI))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn semiaxis_closed_forms() {
        let s = spec();
        let r = integrate_semiaxis(|x| (-x).exp(), &s).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10, "{r:?}");
        let r = integrate_semiaxis(|x| x.powi(3) * (-x * x).exp(), &s.with_truncation_radius(10.0)).unwrap();
        assert!((r.value - 0.5).abs() < 1e-10);
        let r = integrate_semiaxis(|x| x * (-x * x).exp(), &s.with_truncation_radius(10.0)).unwrap();
        assert!((r.value - 0.5).abs() < 1e-10);
    }

    #[test]
    fn both_schemes_agree() {
        for scheme in [Scheme::GaussLegendreAdaptive, Scheme::DoubleExponential] {
            let s = spec().with_scheme(scheme).with_truncation_radius(12.0);
            let r = integrate_semiaxis(|x| x.powi(3) * (-x * x).exp(), &s).unwrap();
            assert!((r.value - 0.5).abs() < 1e-10, "{scheme:?}: {r:?}");
            assert!(r.err_estimate >= 0.0);
        }
    }

    #[test]
    fn endpoint_log_singularity_with_tanh_sinh() {
        let s = spec().with_scheme(Scheme::DoubleExponential);
        let r = integrate(|x| x.ln(), 0.0, 1.0, &s).unwrap();
        assert!((r.value + 1.0).abs() < 1e-12, "{r:?}");
        let r = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, &s).unwrap();
        assert!((r.value - 2.0).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn reversed_and_empty_intervals() {
        let s = spec();
        let r = integrate(|x| x, 1.0, 0.0, &s).unwrap();
        assert!((r.value + 0.5).abs() < 1e-14);
        assert_eq!(integrate(|x| x, 2.0, 2.0, &s).unwrap().value, 0.0);
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let s = QuadratureSpec {
            max_subdivisions: 3,
            ..spec()
        };
        let err = integrate(|x| (50.0 * x).sin().abs(), 0.0, 10.0, &s).unwrap_err();
        match err {
            Error::Convergence { best, subdivisions } => {
                assert!(best.value.is_finite());
                assert_eq!(subdivisions, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let err = integrate(|x| 1.0 / (x - 0.5), 0.0, 1.0, &spec().with_scheme(Scheme::DoubleExponential));
        assert!(matches!(err, Err(Error::NonFiniteIntegrand { .. })), "{err:?}");
    }

    #[test]
    fn spec_validation() {
        let bad = [
            QuadratureSpec { abs_tol: 0.0, ..spec() },
            QuadratureSpec { rel_tol: -1.0, ..spec() },
            QuadratureSpec { max_subdivisions: 0, ..spec() },
            QuadratureSpec { truncation_radius: f64::NAN, ..spec() },
        ];
        for s in bad {
            assert!(matches!(s.validate(), Err(Error::InvalidSpec(_))));
        }
    }

    #[test]
    fn log_difference_on_unit_square() {
        // ∫∫_{(0,1)²} ln|p − q| = −3/2
        let s = spec().with_truncation_radius(1.0);
        let r = integrate_square_logdiag(|p, q| (p - q).abs().ln(), &s).unwrap();
        assert!((r.value + 1.5).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn separable_exponential_on_quadrant() {
        let s = spec().with_truncation_radius(45.0);
        let r = integrate_square_logdiag(|p, q| (-p - q).exp(), &s).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn gaussian_log_kernel_matches_polar_reference() {
        // Polar reduction: (1/2)∫₀^{π/2} cos t sin t ln((cos t + sin t)²/(cos t − sin t)²) dt = π/4
        // (mpmath, scripts/reference_values.py).
        let s = spec().with_truncation_radius(7.0);
        let r = integrate_square_logdiag(
            |p, q| p * q * (-p * p - q * q).exp() * ((p + q) * (p + q) / ((p - q) * (p - q))).ln(),
            &s,
        )
        .unwrap();
        assert!((r.value - PI / 4.0).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn radial_pair_gaussian_and_odd() {
        let s = spec().with_tolerances(1e-10, 1e-7).with_truncation_radius(7.0);
        let r = integrate_radial_pair(|x, y, _| (-x * x - y * y).exp(), &s).unwrap();
        assert!((r.value / PI.powi(3) - 1.0).abs() < 1e-7, "{r:?}");
        let r = integrate_radial_pair(|_, _, _| 0.0, &s).unwrap();
        assert_eq!(r.value, 0.0);
        let r = integrate_radial_pair(|x, y, u| (-x - y).exp() * u, &s.with_truncation_radius(40.0)).unwrap();
        assert!(r.value.abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn deterministic_bits() {
        let s = spec().with_truncation_radius(3.0);
        let k = |p: f64, q: f64| (p * q).sin() * (p - q).abs().ln();
        let a = integrate_square_logdiag(k, &s).unwrap();
        let b = integrate_square_logdiag(k, &s).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }
}
