//! Radial charges: closed-form test families, the trial family `f_β`, the
//! scaling sequence `η_n`, and the transforms between momentum, position and
//! Mellin pictures.
//!
//! Conventions. The Fourier transform is unitary with the symmetric
//! `(2π)^{-3/2}` normalization, so for radial functions
//! `ξ(y) = √(2/π) y⁻¹ ∫₀^∞ p sin(py) f̂(p) dp` and the Gaussian is self-dual.
//! Most integrals are done in the logarithmic variable `t = ln p` with the
//! profile `g(t) = e^{2t} f̂(e^t)`, which turns dilations into shifts and makes
//! the trial family a fixed bump `g(t) = e^{-cosh βt}`.

mod mellin;
mod position;
mod theta;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{try_integrate, QuadResult, QuadratureSpec};

pub use mellin::{default_mellin_grid, mellin_transform, MellinProfile};
pub use theta::ThetaProfile;

use position::PositionTable;

/// `g(t)` below this fraction of its peak is treated as zero when choosing
/// integration windows (`e^{-46}`).
const WINDOW_DECAY: f64 = 46.0;

/// One term `weight · e^{-(scale·p)²/2}` of a Gaussian mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureTerm {
    pub weight: f64,
    pub scale: f64,
}

/// Undilated charge family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ChargeFamily {
    Gaussian { scale: f64 },
    FBeta { beta: f64 },
    GaussianMixture { terms: Vec<MixtureTerm> },
}

/// Tail class of a momentum profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayClass {
    /// `e^{-(scale·p)²/2}`
    Gaussian,
    /// `e^{-p^β/2}` at large `p` and `e^{-p^{-β}/2}` at small `p`.
    StretchedExponential { beta: f64 },
    /// Identically zero.
    Zero,
}

/// Decay metadata used to pick truncation radii.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayEnvelope {
    pub class: DecayClass,
    /// Characteristic momentum scale of the profile.
    pub scale: f64,
}

#[derive(Debug)]
struct Base {
    family: ChargeFamily,
    table: OnceLock<Result<PositionTable>>,
}

/// A radial charge `ξ` given by its momentum profile `f̂(p)`, possibly dilated
/// as `η̂(p) = f̂(p/n)/n`, `η(y) = n² ξ(ny)`.
///
/// Cloning is cheap; clones share cached derived data.
#[derive(Clone)]
pub struct RadialCharge {
    base: Arc<Base>,
    dilation: f64,
    label: String,
}

impl fmt::Debug for RadialCharge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialCharge")
            .field("family", &self.base.family)
            .field("dilation", &self.dilation)
            .field("label", &self.label)
            .finish()
    }
}

fn check_positive(what: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidCharge(format!("{what} must be positive and finite, got {v}")))
    }
}

fn gaussian_log_profile(scale: f64, t: f64) -> f64 {
    let p2 = (2.0 * t).exp();
    p2 * (-0.5 * scale * scale * p2).exp()
}

impl RadialCharge {
    fn from_family(family: ChargeFamily, label: String) -> Self {
        Self {
            base: Arc::new(Base {
                family,
                table: OnceLock::new(),
            }),
            dilation: 1.0,
            label,
        }
    }

    /// The identically vanishing charge.
    pub fn zero() -> Self {
        Self::from_family(ChargeFamily::GaussianMixture { terms: Vec::new() }, "zero".into())
    }

    pub fn family(&self) -> &ChargeFamily {
        &self.base.family
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dilation(&self) -> f64 {
        self.dilation
    }

    pub fn is_zero(&self) -> bool {
        match &self.base.family {
            ChargeFamily::GaussianMixture { terms } => terms.iter().all(|t| t.weight == 0.0),
            _ => false,
        }
    }

    pub fn envelope(&self) -> DecayEnvelope {
        let (class, scale) = match &self.base.family {
            ChargeFamily::Gaussian { scale } => (DecayClass::Gaussian, 1.0 / scale),
            ChargeFamily::FBeta { beta } => (DecayClass::StretchedExponential { beta: *beta }, 1.0),
            ChargeFamily::GaussianMixture { terms } => {
                if self.is_zero() {
                    (DecayClass::Zero, 1.0)
                } else {
                    let smallest = terms.iter().map(|t| t.scale).fold(f64::INFINITY, f64::min);
                    (DecayClass::Gaussian, 1.0 / smallest)
                }
            }
        };
        DecayEnvelope {
            class,
            scale: scale * self.dilation,
        }
    }

    fn base_momentum(&self, p: f64) -> f64 {
        match &self.base.family {
            ChargeFamily::Gaussian { scale } => (-0.5 * (scale * p).powi(2)).exp(),
            ChargeFamily::FBeta { beta } => {
                let cosh = 0.5 * (p.powf(*beta) + p.powf(-beta));
                (-cosh).exp() / (p * p)
            }
            ChargeFamily::GaussianMixture { terms } => terms
                .iter()
                .map(|t| t.weight * (-0.5 * (t.scale * p).powi(2)).exp())
                .sum(),
        }
    }

    fn base_log_profile(&self, t: f64) -> f64 {
        match &self.base.family {
            ChargeFamily::Gaussian { scale } => gaussian_log_profile(*scale, t),
            ChargeFamily::FBeta { beta } => (-(beta * t).cosh()).exp(),
            ChargeFamily::GaussianMixture { terms } => terms
                .iter()
                .map(|term| term.weight * gaussian_log_profile(term.scale, t))
                .sum(),
        }
    }

    /// Momentum profile `f̂(p)`.
    pub fn momentum(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return 0.0;
        }
        self.base_momentum(p / self.dilation) / self.dilation
    }

    /// Logarithmic profile `g(t) = e^{2t} f̂(e^t)`.
    pub fn log_profile(&self, t: f64) -> f64 {
        self.dilation * self.base_log_profile(t - self.dilation.ln())
    }

    /// Interval in `t = ln p` outside of which `g` is negligible.
    pub fn log_window(&self) -> (f64, f64) {
        let (lo, hi) = match &self.base.family {
            ChargeFamily::Gaussian { scale } => gaussian_window(*scale),
            ChargeFamily::FBeta { beta } => {
                let half = WINDOW_DECAY.acosh() / beta;
                (-half, half)
            }
            ChargeFamily::GaussianMixture { terms } => {
                if terms.is_empty() {
                    (-1.0, 1.0)
                } else {
                    terms.iter().map(|t| gaussian_window(t.scale)).fold(
                        (f64::INFINITY, f64::NEG_INFINITY),
                        |(lo, hi), (a, b)| (lo.min(a), hi.max(b)),
                    )
                }
            }
        };
        let shift = self.dilation.ln();
        (lo + shift, hi + shift)
    }

    /// Closed-form position profile, when the family has one.
    pub fn position_closed_form(&self, y: f64) -> Option<f64> {
        let n = self.dilation;
        let base = |y: f64| -> Option<f64> {
            match &self.base.family {
                ChargeFamily::Gaussian { scale } => Some(gaussian_position(*scale, y)),
                ChargeFamily::GaussianMixture { terms } => {
                    Some(terms.iter().map(|t| t.weight * gaussian_position(t.scale, y)).sum())
                }
                ChargeFamily::FBeta { .. } => None,
            }
        };
        base(n * y).map(|v| n * n * v)
    }

    pub fn has_closed_form_position(&self) -> bool {
        !matches!(self.base.family, ChargeFamily::FBeta { .. })
    }

    fn table(&self) -> Result<&PositionTable> {
        let ChargeFamily::FBeta { beta } = self.base.family else {
            unreachable!("tables are only built for the trial family")
        };
        self.base
            .table
            .get_or_init(|| PositionTable::build(|y| position::fbeta_position(beta, y)))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Position profile `ξ(y)`: closed form where available, otherwise a cached
    /// piecewise Chebyshev table of the sine transform.
    pub fn position(&self, y: f64) -> Result<f64> {
        if let Some(v) = self.position_closed_form(y) {
            return Ok(v);
        }
        let n = self.dilation;
        Ok(n * n * self.table()?.eval(n * y))
    }

    /// Radius beyond which `y³ ξ(y)²` is negligible.
    pub fn position_radius(&self) -> Result<f64> {
        let base = match &self.base.family {
            ChargeFamily::Gaussian { scale } => 9.5 * scale,
            ChargeFamily::GaussianMixture { terms } => {
                9.5 * terms.iter().map(|t| t.scale).fold(1e-300, f64::max)
            }
            ChargeFamily::FBeta { .. } => self.table()?.radius(),
        };
        Ok(base / self.dilation)
    }

    /// Halvings of `upper` down to the inner length scale `e^{-t_hi}` of the
    /// log window, so that adaptive rules see every scale of the profile.
    pub(crate) fn geometric_breaks(&self, upper: f64) -> Vec<f64> {
        let inner = (-self.log_window().1).exp();
        let mut breaks = Vec::new();
        let mut y = 0.5 * upper;
        while y > inner && breaks.len() < 200 {
            breaks.push(y);
            y *= 0.5;
        }
        breaks
    }

    /// `∫₀^∞ p^k f̂(p)² dp`, computed as `∫ e^{(k-3)t} g(t)² dt`.
    pub fn momentum_moment(&self, k: i32, spec: &QuadratureSpec) -> Result<QuadResult> {
        if self.is_zero() {
            return Ok(QuadResult::ZERO);
        }
        let (lo, hi) = self.log_window();
        let m = f64::from(k - 3);
        try_integrate(
            |t| {
                let g = self.log_profile(t);
                Ok((m * t).exp() * g * g)
            },
            lo,
            hi,
            spec,
        )
    }
}

fn gaussian_window(scale: f64) -> (f64, f64) {
    let lo = -scale.ln() - 0.5 * WINDOW_DECAY;
    let hi = (2.0 * WINDOW_DECAY).sqrt().ln() - scale.ln();
    (lo, hi)
}

fn gaussian_position(scale: f64, y: f64) -> f64 {
    (-0.5 * (y / scale).powi(2)).exp() / scale.powi(3)
}

/// `f̂(p) = e^{-(scale·p)²/2}`, with `ξ(y) = scale⁻³ e^{-y²/(2 scale²)}`.
pub fn gaussian_charge(scale: f64) -> Result<RadialCharge> {
    check_positive("gaussian scale", scale)?;
    Ok(RadialCharge::from_family(
        ChargeFamily::Gaussian { scale },
        format!("gaussian:{scale}"),
    ))
}

/// Trial charge `f̂_β(p) = p⁻² exp(-(p^β + p^{-β})/2)`.
pub fn trial_fbeta(beta: f64) -> Result<RadialCharge> {
    check_positive("beta", beta)?;
    Ok(RadialCharge::from_family(
        ChargeFamily::FBeta { beta },
        format!("fbeta:{beta}"),
    ))
}

/// `f̂(p) = Σ wᵢ e^{-(sᵢ p)²/2}`.
pub fn gaussian_mixture(terms: &[MixtureTerm]) -> Result<RadialCharge> {
    for t in terms {
        check_positive("mixture scale", t.scale)?;
        if !t.weight.is_finite() {
            return Err(Error::InvalidCharge(format!("mixture weight {} is not finite", t.weight)));
        }
    }
    let label = terms
        .iter()
        .map(|t| format!("{}*gaussian:{}", t.weight, t.scale))
        .collect::<Vec<_>>()
        .join("+");
    Ok(RadialCharge::from_family(
        ChargeFamily::GaussianMixture { terms: terms.to_vec() },
        format!("mixture[{label}]"),
    ))
}

/// Scaling sequence `η̂_n(p) = f̂(p/n)/n`, equivalently `η_n(y) = n² ξ(ny)`.
pub fn scale_charge(f: &RadialCharge, n: u32) -> Result<RadialCharge> {
    if n == 0 {
        return Err(Error::InvalidCharge("scale index must be at least 1".into()));
    }
    if n == 1 {
        return Ok(f.clone());
    }
    Ok(RadialCharge {
        base: Arc::clone(&f.base),
        dilation: f.dilation * f64::from(n),
        label: format!("{}@n={n}", f.label),
    })
}

/// Numerical radial sine transform of the momentum profile,
/// `ξ(y) = √(2/π) y⁻¹ ∫₀^∞ p sin(py) f̂(p) dp`.
///
/// Independent of any closed form; the trial family uses a rotated contour
/// once `y` is large compared to the inverse momentum cut.
pub fn radial_fourier_to_position(f: &RadialCharge, y: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(y.is_finite() && y > 0.0) {
        return Err(Error::domain("radial_fourier_to_position", format!("y must be positive, got {y}")));
    }
    if f.is_zero() {
        return Ok(0.0);
    }
    if let ChargeFamily::FBeta { beta } = f.base.family {
        let n = f.dilation;
        return Ok(n * n * position::fbeta_position(beta, n * y)?);
    }
    let (lo, hi) = f.log_window();
    let inner = spec.tightened(0.01);
    let r = try_integrate(
        |t| {
            let p = t.exp();
            Ok(position::sinc(p * y) * p * f.log_profile(t))
        },
        lo,
        hi,
        &inner,
    )?;
    Ok((2.0 / PI).sqrt() * r.value)
}

/// Radial sine transform of an arbitrary radial function `h` on `(0, radius)`:
/// `√(2/π) k⁻¹ ∫₀^radius r sin(kr) h(r) dr`. The transform is its own inverse.
pub fn radial_sine_transform<H>(h: H, k: f64, radius: f64, spec: &QuadratureSpec) -> Result<f64>
where
    H: Fn(f64) -> Result<f64>,
{
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::domain("radial_sine_transform", format!("k must be positive, got {k}")));
    }
    let r = try_integrate(|r| Ok(r * r * position::sinc(k * r) * h(r)?), 0.0, radius, spec)?;
    Ok((2.0 / PI).sqrt() * r.value)
}

/// `[f]²_{1/2} = 8π³ ∫₀^∞ p³ f̂(p)² dp`.
pub fn gagliardo_seminorm_sq(f: &RadialCharge, spec: &QuadratureSpec) -> Result<QuadResult> {
    Ok(f.momentum_moment(3, spec)?.scaled(8.0 * PI.powi(3)))
}

/// Textual charge specification: `gaussian:<scale>` or `fbeta:<beta>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ChargeSpec {
    Gaussian(f64),
    FBeta(f64),
}

impl ChargeSpec {
    pub fn build(&self) -> Result<RadialCharge> {
        match *self {
            ChargeSpec::Gaussian(s) => gaussian_charge(s),
            ChargeSpec::FBeta(b) => trial_fbeta(b),
        }
    }
}

impl FromStr for ChargeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (family, value) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidCharge(format!("expected <family>:<value>, got {s:?}")))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::InvalidCharge(format!("cannot parse {value:?} as a number")))?;
        check_positive(family, v)?;
        match family.trim() {
            "gaussian" => Ok(ChargeSpec::Gaussian(v)),
            "fbeta" => Ok(ChargeSpec::FBeta(v)),
            other => Err(Error::InvalidCharge(format!(
                "unknown charge family {other:?} (expected gaussian or fbeta)"
            ))),
        }
    }
}

impl fmt::Display for ChargeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChargeSpec::Gaussian(s) => write!(f, "gaussian:{s}"),
            ChargeSpec::FBeta(b) => write!(f, "fbeta:{b}"),
        }
    }
}

/// Parse a textual charge specification into a charge.
pub fn parse_charge(spec: &str) -> Result<RadialCharge> {
    spec.parse::<ChargeSpec>()?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn gaussian_moments() {
        let g = gaussian_charge(1.0).unwrap();
        let m3 = g.momentum_moment(3, &spec()).unwrap().value;
        assert!((m3 - 0.5).abs() < 1e-12, "{m3}");
        let g2 = gaussian_charge(2.0).unwrap();
        let m3 = g2.momentum_moment(3, &spec()).unwrap().value;
        assert!((m3 - 1.0 / 32.0).abs() < 1e-13, "{m3}");
        // ∫p² e^{-p²} = √π/4
        let m2 = g.momentum_moment(2, &spec()).unwrap().value;
        assert!((m2 - PI.sqrt() / 4.0).abs() < 1e-12);
    }

    #[test]
    fn fbeta_pointwise_and_norm() {
        let f = trial_fbeta(1.0).unwrap();
        assert!((f.momentum(1.0) - (-1.0f64).exp()).abs() < 1e-16);
        let m3 = f.momentum_moment(3, &spec()).unwrap().value;
        assert!((m3 - 0.22778774549906687131).abs() < 1e-10, "{m3}");
    }

    #[test]
    fn log_profile_matches_momentum() {
        for f in [gaussian_charge(0.7).unwrap(), trial_fbeta(0.4).unwrap()] {
            for n in [1, 3] {
                let h = scale_charge(&f, n).unwrap();
                for t in [-2.0, -0.3, 0.0, 1.1, 2.5] {
                    let p: f64 = f64::exp(t);
                    let want = p * p * h.momentum(p);
                    assert!((h.log_profile(t) - want).abs() <= 1e-14 * want.abs().max(1e-300));
                }
            }
        }
    }

    #[test]
    fn scaling_laws() {
        let f = gaussian_charge(1.0).unwrap();
        let s = spec();
        let m2 = f.momentum_moment(2, &s).unwrap().value;
        let m3 = f.momentum_moment(3, &s).unwrap().value;
        for n in [1u32, 2, 4, 8] {
            let h = scale_charge(&f, n).unwrap();
            let nf = f64::from(n);
            let r2 = h.momentum_moment(2, &s).unwrap().value / (nf * m2);
            let r3 = h.momentum_moment(3, &s).unwrap().value / (nf * nf * m3);
            assert!((r2 - 1.0).abs() < 1e-8 && (r3 - 1.0).abs() < 1e-8, "{n}: {r2} {r3}");
        }
        let h = scale_charge(&f, 2).unwrap();
        assert!((h.momentum_moment(3, &s).unwrap().value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn identity_scaling_is_identical() {
        let f = trial_fbeta(0.5).unwrap();
        let h = scale_charge(&f, 1).unwrap();
        assert_eq!(h.label(), f.label());
        assert_eq!(h.momentum(1.3).to_bits(), f.momentum(1.3).to_bits());
        assert!(scale_charge(&f, 0).is_err());
    }

    #[test]
    fn gaussian_position_closed_and_numeric() {
        let g = gaussian_charge(1.0).unwrap();
        let s = spec();
        for (y, want) in [(1.0f64, (-0.5f64).exp()), (2.0, (-2.0f64).exp())] {
            assert!((g.position(y).unwrap() - want).abs() < 1e-15);
            let num = radial_fourier_to_position(&g, y, &s).unwrap();
            assert!((num - want).abs() < 1e-10, "{y}: {num}");
        }
        let h = scale_charge(&gaussian_charge(0.8).unwrap(), 3).unwrap();
        for y in [0.05, 0.2, 0.6] {
            let num = radial_fourier_to_position(&h, y, &s).unwrap();
            assert!((num - h.position(y).unwrap()).abs() < 1e-8 * h.position(0.0).unwrap());
        }
    }

    #[test]
    fn fbeta_position_reference() {
        let f = trial_fbeta(1.0).unwrap();
        let direct = radial_fourier_to_position(&f, 1.0, &spec()).unwrap();
        assert!((direct - 0.37078908558421605997).abs() < 1e-11, "{direct}");
        let tabled = f.position(1.0).unwrap();
        assert!((tabled - 0.37078908558421605997).abs() < 1e-10, "{tabled}");
    }

    #[test]
    fn transform_is_an_involution_for_gaussian() {
        let g = gaussian_charge(1.0).unwrap();
        let s = spec().with_tolerances(1e-12, 1e-10);
        for p in [0.5, 1.0, 2.0] {
            let back = radial_sine_transform(|y| radial_fourier_to_position(&g, y, &s), p, 12.0, &s.tightened(10.0)).unwrap();
            assert!((back - g.momentum(p)).abs() < 1e-6, "{p}: {back}");
        }
    }

    #[test]
    fn gagliardo_values() {
        let s = spec();
        let g = gaussian_charge(1.0).unwrap();
        let v = gagliardo_seminorm_sq(&g, &s).unwrap().value;
        assert!((v / (4.0 * PI.powi(3)) - 1.0).abs() < 1e-10);
        let h = scale_charge(&g, 2).unwrap();
        let vh = gagliardo_seminorm_sq(&h, &s).unwrap().value;
        assert!((vh / (4.0 * v) - 1.0).abs() < 1e-8);
        assert_eq!(gagliardo_seminorm_sq(&RadialCharge::zero(), &s).unwrap().value, 0.0);
    }

    #[test]
    fn parse_specs() {
        assert_eq!("gaussian:1".parse::<ChargeSpec>().unwrap(), ChargeSpec::Gaussian(1.0));
        assert_eq!("fbeta:0.3".parse::<ChargeSpec>().unwrap(), ChargeSpec::FBeta(0.3));
        for bad in ["gaussian", "gaussian:-1", "fbeta:0", "lorentz:1", "fbeta:x", "gaussian:nan"] {
            assert!(bad.parse::<ChargeSpec>().is_err(), "{bad}");
        }
        let c = parse_charge("fbeta:0.5").unwrap();
        assert_eq!(c.label(), "fbeta:0.5");
        assert!(gaussian_charge(0.0).is_err());
        assert!(trial_fbeta(-1.0).is_err());
    }

    #[test]
    fn mixture_position_is_linear() {
        let m = gaussian_mixture(&[
            MixtureTerm { weight: 0.5, scale: 1.0 },
            MixtureTerm { weight: 2.0, scale: 0.3 },
        ])
        .unwrap();
        let y = 0.4;
        let want = 0.5 * gaussian_position(1.0, y) + 2.0 * gaussian_position(0.3, y);
        assert!((m.position(y).unwrap() - want).abs() < 1e-14);
        let num = radial_fourier_to_position(&m, y, &spec()).unwrap();
        assert!((num - want).abs() < 1e-8 * want);
    }
}
