//! The form components in the momentum representation (s-wave double
//! integrals) and in the Mellin-diagonalized representation.
//!
//! With `t = ln p` and `g(t) = e^{2t} f̂(e^t)` the s-wave components read
//!
//! ```text
//! Φ_diag = 48π² ∫ e^{-t} √(3e^{2t}/4 + λ) g(t)² dt
//! Φ_off  = −96π ∫∫ g(s) g(t) ln(1 + 2pq/(p² + q² − pq + λ)) ds dt
//! Φ_reg  = 24πγ ∫∫ g(s) g(t) 2 ln coth(|s − t|/2) ds dt
//! ```
//!
//! The general-λ off-diagonal kernel is the angular integral of
//! `1/(p² + q² + p·q + λ)` over the relative direction:
//! `∫_{-1}^{1} du/(p² + q² + pqu + λ) = (pq)⁻¹ ln((p² + q² + pq + λ)/(p² + q² − pq + λ))`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::charges::{default_mellin_grid, mellin_transform, MellinProfile, RadialCharge, ThetaProfile};
use crate::error::{Error, Result};
use crate::quadrature::{try_integrate, try_integrate_box_logdiag, try_integrate_with_breaks, QuadResult, QuadratureSpec};
use crate::specfun::{off_weight, reg_weight, symbol_s, SymbolParams};

/// Physical and regularization parameters of the form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormParams {
    /// Three-body repulsion strength `γ ≥ 0`.
    pub gamma: f64,
    /// Spectral shift `λ ≥ 0`.
    pub lambda: f64,
    /// Inverse scattering length `1/𝔞`; zero encodes `|𝔞| = ∞`.
    pub inv_scattering_length: f64,
    pub theta: ThetaProfile,
}

impl Default for FormParams {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            lambda: 0.0,
            inv_scattering_length: 0.0,
            theta: ThetaProfile::default(),
        }
    }
}

impl FormParams {
    pub fn new(gamma: f64, lambda: f64) -> Result<Self> {
        let p = Self {
            gamma,
            lambda,
            ..Self::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_inv_scattering_length(mut self, inv_a: f64) -> Self {
        self.inv_scattering_length = inv_a;
        self
    }

    pub fn with_theta(mut self, theta: ThetaProfile) -> Self {
        self.theta = theta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::InvalidParams(format!("gamma must be finite and non-negative, got {}", self.gamma)));
        }
        check_lambda(self.lambda)?;
        if !self.inv_scattering_length.is_finite() {
            return Err(Error::InvalidParams("inverse scattering length must be finite".into()));
        }
        self.theta.validate()
    }

    /// `β(y) = −1/𝔞 + γ (θ(y) − 1)/y`.
    pub fn beta_potential(&self, y: f64) -> f64 {
        -self.inv_scattering_length + self.gamma * (self.theta.eval(y) - 1.0) / y
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("lambda must be finite and non-negative, got {lambda}")))
    }
}

/// Component values of `Φ^λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormBreakdown {
    pub diag: f64,
    pub off: f64,
    pub reg: f64,
    pub zero: f64,
    pub total: f64,
    pub err_estimate: f64,
}

impl FormBreakdown {
    pub const ZERO: FormBreakdown = FormBreakdown {
        diag: 0.0,
        off: 0.0,
        reg: 0.0,
        zero: 0.0,
        total: 0.0,
        err_estimate: 0.0,
    };

    pub fn from_components(diag: QuadResult, off: QuadResult, reg: QuadResult, zero: QuadResult) -> Self {
        Self {
            diag: diag.value,
            off: off.value,
            reg: reg.value,
            zero: zero.value,
            total: diag.value + off.value + reg.value + zero.value,
            err_estimate: diag.err_estimate + off.err_estimate + reg.err_estimate + zero.err_estimate,
        }
    }
}

/// `2 ln coth(r/2)` for `r > 0`, i.e. `ln((p+q)²/(p−q)²)` at `r = |ln(p/q)|`.
pub(crate) fn reg_log_kernel(r: f64) -> f64 {
    let e = (-r).exp();
    2.0 * (e.ln_1p() - (-e).ln_1p())
}

/// `ln((p² + q² + pq + λ)/(p² + q² − pq + λ))` at `p = e^s`, `q = e^t`.
pub(crate) fn off_log_kernel(s: f64, t: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        let c = (s - t).cosh();
        return (2.0 / (2.0 * c - 1.0)).ln_1p();
    }
    let (p, q) = (s.exp(), t.exp());
    let pq = p * q;
    (2.0 * pq / (p * p + q * q - pq + lambda)).ln_1p()
}

/// `48π² ∫₀^∞ p² √(3p²/4 + λ) f̂(p)² dp`.
pub fn phi_diag(f: &RadialCharge, lambda: f64, spec: &QuadratureSpec) -> Result<QuadResult> {
    check_lambda(lambda)?;
    if f.is_zero() {
        return Ok(QuadResult::ZERO);
    }
    let (lo, hi) = f.log_window();
    let r = try_integrate(
        |t| {
            let g = f.log_profile(t);
            let w = (0.75 + lambda * (-2.0 * t).exp()).sqrt();
            Ok(w * g * g)
        },
        lo,
        hi,
        spec,
    )?;
    Ok(r.scaled(48.0 * PI * PI))
}

/// `−96π ∫∫ pq f̂(p) f̂(q) ln((p² + q² + pq + λ)/(p² + q² − pq + λ)) dp dq`.
pub fn phi_off(f: &RadialCharge, lambda: f64, spec: &QuadratureSpec) -> Result<QuadResult> {
    check_lambda(lambda)?;
    if f.is_zero() {
        return Ok(QuadResult::ZERO);
    }
    let (lo, hi) = f.log_window();
    let r = try_integrate_box_logdiag(
        |s, t| Ok(f.log_profile(s) * f.log_profile(t) * off_log_kernel(s, t, lambda)),
        lo,
        hi,
        spec,
    )?;
    Ok(r.scaled(-96.0 * PI))
}

/// `24πγ ∫∫ pq f̂(p) f̂(q) ln((p + q)²/(p − q)²) dp dq`.
pub fn phi_reg(f: &RadialCharge, gamma: f64, spec: &QuadratureSpec) -> Result<QuadResult> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::InvalidParams(format!("gamma must be finite and non-negative, got {gamma}")));
    }
    if gamma == 0.0 || f.is_zero() {
        return Ok(QuadResult::ZERO);
    }
    Ok(coulomb_energy(f, spec)?.scaled(24.0 * PI * gamma))
}

/// `∫∫ pq f̂(p) f̂(q) ln((p + q)²/(p − q)²) dp dq`, which equals
/// `2 ∫₀^∞ y ξ(y)² dy`.
fn coulomb_energy(f: &RadialCharge, spec: &QuadratureSpec) -> Result<QuadResult> {
    let (lo, hi) = f.log_window();
    try_integrate_box_logdiag(
        |s, t| Ok(f.log_profile(s) * f.log_profile(t) * reg_log_kernel((s - t).abs())),
        lo,
        hi,
        spec,
    )
}

/// `48π² ∫₀^∞ y² β(y) ξ(y)² dy` with `β(y) = −1/𝔞 + γ(θ(y) − 1)/y`.
///
/// Split as `−(12π/𝔞)‖ξ‖² − Φ_reg + 48π²γ ∫ y θ(y) ξ(y)² dy`; the first two
/// terms are evaluated in momentum space, so the position profile is only
/// needed on the support of `θ`.
pub fn phi_zero(f: &RadialCharge, params: &FormParams, spec: &QuadratureSpec) -> Result<QuadResult> {
    params.validate()?;
    if f.is_zero() {
        return Ok(QuadResult::ZERO);
    }
    let reg = phi_reg(f, params.gamma, spec)?;
    phi_zero_with_reg(f, params, reg, spec)
}

fn phi_zero_with_reg(
    f: &RadialCharge,
    params: &FormParams,
    reg: QuadResult,
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    let mut total = QuadResult::ZERO;
    if params.inv_scattering_length != 0.0 {
        let norm = f.momentum_moment(2, spec)?.scaled(4.0 * PI);
        total = total.plus(norm.scaled(-12.0 * PI * params.inv_scattering_length));
    }
    if params.gamma == 0.0 {
        return Ok(total);
    }
    let Some(support) = params.theta.support() else {
        // θ ≡ 1: the γ term vanishes identically.
        return Ok(total);
    };
    let theta = &params.theta;
    let upper = support.min(f.position_radius()?);
    let mut breaks = f.geometric_breaks(upper);
    breaks.extend(theta.breakpoints().into_iter().filter(|&b| b < upper));
    let inside = try_integrate_with_breaks(
        |y| {
            let xi = f.position(y)?;
            Ok(y * theta.eval(y) * xi * xi)
        },
        0.0,
        upper,
        &breaks,
        spec,
    )?;
    Ok(total
        .plus(reg.scaled(-1.0))
        .plus(inside.scaled(48.0 * PI * PI * params.gamma)))
}

/// All four components and their exact sum.
pub fn phi_total(f: &RadialCharge, params: &FormParams, spec: &QuadratureSpec) -> Result<FormBreakdown> {
    params.validate()?;
    if f.is_zero() {
        return Ok(FormBreakdown::ZERO);
    }
    let ((diag, off), reg) = rayon::join(
        || rayon::join(|| phi_diag(f, params.lambda, spec), || phi_off(f, params.lambda, spec)),
        || phi_reg(f, params.gamma, spec),
    );
    let reg = reg?;
    let zero = phi_zero_with_reg(f, params, reg, spec)?;
    Ok(FormBreakdown::from_components(diag?, off?, reg, zero))
}

/// The three `λ = 0` components as multiplication operators on the Mellin
/// profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalizedComponents {
    pub diag: f64,
    pub off: f64,
    pub reg: f64,
}

impl DiagonalizedComponents {
    pub fn total(&self) -> f64 {
        self.diag + self.off + self.reg
    }
}

/// Components from a precomputed Mellin profile.
pub fn diagonalized_from_profile(profile: &MellinProfile, gamma: f64) -> Result<DiagonalizedComponents> {
    SymbolParams::new(gamma)?;
    let c = 48.0 * PI * PI;
    let diag = c * 0.5 * 3f64.sqrt() * profile.norm_sq();
    let off = c * profile.weighted_norm_sq(off_weight);
    let reg = c * gamma * profile.weighted_norm_sq(reg_weight);
    Ok(DiagonalizedComponents { diag, off, reg })
}

/// `48π² ∫ |f̂^♯(x)|² w(x) dx` for the diagonal, off-diagonal and
/// regularizing weights, on the default Mellin grid of `f`.
pub fn phi_diagonalized(f: &RadialCharge, gamma: f64, spec: &QuadratureSpec) -> Result<DiagonalizedComponents> {
    let (extent, step) = default_mellin_grid(f);
    let profile = mellin_transform(f, extent, step, spec)?;
    diagonalized_from_profile(&profile, gamma)
}

/// `48π² ∫ |f̂^♯(x)|² S(x) dx`.
pub fn symbol_integral(profile: &MellinProfile, gamma: f64) -> Result<f64> {
    let p = SymbolParams::new(gamma)?;
    let v = profile.weighted_norm_sq(|x| symbol_s(x, p).unwrap_or(f64::NAN));
    if !v.is_finite() {
        return Err(Error::domain("symbol_integral", "non-finite symbol value on the Mellin grid"));
    }
    Ok(48.0 * PI * PI * v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charges::{gaussian_charge, scale_charge, trial_fbeta};

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn kernels() {
        for r in [1e-6f64, 0.1, 1.0, 5.0] {
            let (p, q) = (r.exp(), 1.0);
            let direct = ((p + q) * (p + q) / ((p - q) * (p - q))).ln();
            assert!(rel(reg_log_kernel(r), direct) < 1e-9, "{r}");
        }
        assert!(rel(reg_log_kernel(40.0), 4.0 * (-40.0f64).exp()) < 1e-15);
        for (s, t, l) in [(0.3, -0.2, 0.0), (0.3, -0.2, 2.0), (4.0, 3.0, 0.5)] {
            let (p, q) = (f64::exp(s), f64::exp(t));
            let direct = ((p * p + q * q + p * q + l) / (p * p + q * q - p * q + l)).ln();
            assert!(rel(off_log_kernel(s, t, l), direct) < 1e-13);
        }
    }

    #[test]
    fn gaussian_closed_forms() {
        let g = gaussian_charge(1.0).unwrap();
        let s = spec();
        let diag = phi_diag(&g, 0.0, &s).unwrap().value;
        assert!(rel(diag, 12.0 * 3f64.sqrt() * PI * PI) < 1e-10, "{diag}");
        let reg = phi_reg(&g, 1.0, &s).unwrap().value;
        assert!(rel(reg, 24.0 * PI * PI) < 1e-8, "{reg}");
        let off = phi_off(&g, 0.0, &s).unwrap().value;
        assert!(rel(off, -253.8770427731086198) < 1e-8, "{off}");
    }

    #[test]
    fn fbeta_reference_values() {
        let f = trial_fbeta(1.0).unwrap();
        let s = spec();
        assert!(rel(phi_diag(&f, 0.0, &s).unwrap().value, 93.454877101792885228) < 1e-9);
        assert!(rel(phi_off(&f, 0.0, &s).unwrap().value, -153.67251792077577091) < 1e-8);
        assert!(rel(phi_reg(&f, 1.0, &s).unwrap().value, 130.63594196022848975) < 1e-8);
    }

    #[test]
    fn diag_monotone_in_lambda() {
        let g = gaussian_charge(1.0).unwrap();
        let v: Vec<f64> = [0.0, 1.0, 4.0]
            .iter()
            .map(|&l| phi_diag(&g, l, &spec()).unwrap().value)
            .collect();
        assert!(v[0] < v[1] && v[1] < v[2]);
    }

    #[test]
    fn zero_charge_and_zero_gamma() {
        let z = RadialCharge::zero();
        let p = FormParams::new(1.0, 1.0).unwrap();
        assert_eq!(phi_total(&z, &p, &spec()).unwrap(), FormBreakdown::ZERO);
        let g = gaussian_charge(1.0).unwrap();
        assert_eq!(phi_reg(&g, 0.0, &spec()).unwrap().value, 0.0);
    }

    #[test]
    fn phi_zero_scattering_length_only() {
        let g = gaussian_charge(1.0).unwrap();
        let p = FormParams::new(0.0, 0.0).unwrap().with_inv_scattering_length(1.0);
        let z = phi_zero(&g, &p, &spec()).unwrap().value;
        assert!(rel(z, -12.0 * PI * PI.powf(1.5)) < 1e-9, "{z}");
    }

    #[test]
    fn phi_zero_vanishes_when_theta_covers_charge() {
        let g = gaussian_charge(0.1).unwrap();
        let p = FormParams::new(1.0, 0.0).unwrap().with_theta(ThetaProfile::indicator(5.0).unwrap());
        let z = phi_zero(&g, &p, &spec()).unwrap();
        assert!(z.value.abs() < 1e-6 * phi_reg(&g, 1.0, &spec()).unwrap().value, "{z:?}");
        let c = FormParams::new(1.0, 0.0).unwrap().with_theta(ThetaProfile::Constant);
        assert_eq!(phi_zero(&g, &c, &spec()).unwrap().value, 0.0);
    }

    #[test]
    fn phi_zero_matches_direct_position_integral() {
        let g = gaussian_charge(1.0).unwrap();
        let p = FormParams::new(1.5, 0.0)
            .unwrap()
            .with_inv_scattering_length(-0.4)
            .with_theta(ThetaProfile::indicator(0.8).unwrap());
        let z = phi_zero(&g, &p, &spec()).unwrap().value;
        let direct = try_integrate_with_breaks(
            |y| Ok(y * y * p.beta_potential(y) * g.position(y)?.powi(2)),
            0.0,
            12.0,
            &[0.8],
            &spec(),
        )
        .unwrap()
        .value
            * 48.0
            * PI
            * PI;
        assert!(rel(z, direct) < 1e-8, "{z} vs {direct}");
    }

    #[test]
    fn scaling_exactness() {
        let f = trial_fbeta(0.5).unwrap();
        let s = spec();
        let reg1 = phi_reg(&f, 1.0, &s).unwrap().value;
        let diag1 = phi_diag(&f, 0.0, &s).unwrap().value;
        for n in [2u32, 5] {
            let h = scale_charge(&f, n).unwrap();
            let n2 = f64::from(n * n);
            assert!(rel(phi_reg(&h, 1.0, &s).unwrap().value, n2 * reg1) < 1e-8);
            assert!(rel(phi_diag(&h, 0.0, &s).unwrap().value, n2 * diag1) < 1e-8);
        }
    }

    #[test]
    fn off_converges_as_lambda_vanishes() {
        let g = gaussian_charge(1.0).unwrap();
        let s = spec();
        let at0 = phi_off(&g, 0.0, &s).unwrap().value;
        let gaps: Vec<f64> = [1.0, 0.1, 0.01]
            .iter()
            .map(|&l| (phi_off(&g, l, &s).unwrap().value - at0).abs())
            .collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
    }

    #[test]
    fn diagonalized_matches_direct() {
        let s = spec();
        for f in [trial_fbeta(1.0).unwrap(), trial_fbeta(0.5).unwrap(), gaussian_charge(1.0).unwrap()] {
            let d = phi_diagonalized(&f, 1.0, &s).unwrap();
            let direct = [
                phi_diag(&f, 0.0, &s).unwrap().value,
                phi_off(&f, 0.0, &s).unwrap().value,
                phi_reg(&f, 1.0, &s).unwrap().value,
            ];
            for (a, b) in [d.diag, d.off, d.reg].into_iter().zip(direct) {
                assert!((a - b).abs() <= (1e-6 * b.abs()).max(1e-8), "{}: {a} vs {b}", f.label());
            }
        }
    }

    #[test]
    fn symbol_sum_rule() {
        let f = trial_fbeta(1.0).unwrap();
        let (e, h) = default_mellin_grid(&f);
        let m = mellin_transform(&f, e, h, &spec()).unwrap();
        let d = diagonalized_from_profile(&m, 0.6).unwrap();
        let s = symbol_integral(&m, 0.6).unwrap();
        assert!((d.total() - s).abs() < 1e-8, "{} vs {s}", d.total());
    }
}
