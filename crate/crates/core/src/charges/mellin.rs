use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{try_integrate, QuadratureSpec};

use super::{ChargeFamily, RadialCharge};

/// Samples of `f̂^♯(x) = (2π)^{-1/2} ∫ e^{-itx} e^{2t} f̂(e^t) dt` on a uniform
/// symmetric grid `x_k = -extent + k·grid_step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MellinProfile {
    pub samples: Vec<(f64, Complex64)>,
    pub grid_step: f64,
    pub extent: f64,
}

impl MellinProfile {
    /// Trapezoidal `∫ |f̂^♯(x)|² w(x) dx`.
    pub fn weighted_norm_sq<W: Fn(f64) -> f64>(&self, w: W) -> f64 {
        let last = self.samples.len().saturating_sub(1);
        let sum: f64 = self
            .samples
            .iter()
            .enumerate()
            .map(|(k, (x, v))| {
                let edge = if k == 0 || k == last { 0.5 } else { 1.0 };
                edge * v.norm_sqr() * w(*x)
            })
            .sum();
        sum * self.grid_step
    }

    /// Trapezoidal `∫ |f̂^♯(x)|² dx`; equals `∫₀^∞ p³ f̂(p)² dp`.
    pub fn norm_sq(&self) -> f64 {
        self.weighted_norm_sq(|_| 1.0)
    }
}

/// Default `(extent, grid_step)`: `40/β` for the trial family, where
/// `|K_{ix/β}(1)|` has dropped below `1e-12`, and `40` for Gaussian families.
pub fn default_mellin_grid(f: &RadialCharge) -> (f64, f64) {
    let extent = match f.family() {
        ChargeFamily::FBeta { beta } => 40.0 / beta,
        _ => 40.0,
    };
    (extent, 0.05)
}

/// Sample the Mellin profile of `f` by quadrature in `t = ln p`.
pub fn mellin_transform(
    f: &RadialCharge,
    extent: f64,
    grid_step: f64,
    spec: &QuadratureSpec,
) -> Result<MellinProfile> {
    if !(extent.is_finite() && extent > 0.0 && grid_step.is_finite() && grid_step > 0.0) {
        return Err(Error::InvalidParams(format!(
            "Mellin grid needs positive extent and step, got {extent} and {grid_step}"
        )));
    }
    let half = (extent / grid_step).round() as usize;
    if half == 0 || half > 5_000_000 {
        return Err(Error::InvalidParams(format!("Mellin grid of {} points is out of range", 2 * half + 1)));
    }
    let (lo, hi) = f.log_window();
    let norm = 1.0 / (2.0 * PI).sqrt();
    let sample = |k: usize| -> Result<(f64, Complex64)> {
        let x = (k as f64 - half as f64) * grid_step;
        if f.is_zero() {
            return Ok((x, Complex64::new(0.0, 0.0)));
        }
        let re = try_integrate(|t| Ok((t * x).cos() * f.log_profile(t)), lo, hi, spec)?;
        let im = try_integrate(|t| Ok(-(t * x).sin() * f.log_profile(t)), lo, hi, spec)?;
        Ok((x, Complex64::new(norm * re.value, norm * im.value)))
    };
    let samples = (0..=2 * half)
        .into_par_iter()
        .map(sample)
        .collect::<Result<Vec<_>>>()?;
    Ok(MellinProfile {
        samples,
        grid_step,
        extent: half as f64 * grid_step,
    })
}
