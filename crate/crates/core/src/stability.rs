//! Stability thresholds, minimization of the symbol `S`, and the collapse
//! experiment along the scaling sequence `η_n` of the trial family.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charges::{scale_charge, trial_fbeta};
use crate::error::{Error, Result};
use crate::momentum_forms::{phi_total, FormBreakdown, FormParams};
use crate::quadrature::{try_integrate, QuadratureSpec};
use crate::specfun::{macdonald_imag_order, symbol_s, SymbolParams};

/// `γ_c = 4/3 − √3/π`, the sharp stability threshold.
pub fn gamma_critical() -> f64 {
    4.0 / 3.0 - 3f64.sqrt() / PI
}

/// `γ′_c = 2 − √3/π`, the threshold of the position-space estimate.
pub fn gamma_prime_critical() -> f64 {
    2.0 - 3f64.sqrt() / PI
}

/// Minimum of `S` over `[0, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolMinimum {
    pub x_min: f64,
    pub s_min: f64,
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Grid scan of `S(·, γ)` on `grid + 1` points of `[0, x_max]`, refined by
/// golden-section search around the best grid point. `S` is even, so the
/// half-line suffices.
pub fn min_symbol(gamma: f64, x_max: f64, grid: usize) -> Result<SymbolMinimum> {
    let p = SymbolParams::new(gamma)?;
    if !(x_max.is_finite() && x_max > 0.0) || grid < 2 {
        return Err(Error::InvalidParams(format!(
            "min_symbol needs x_max > 0 and at least 2 intervals, got {x_max} and {grid}"
        )));
    }
    let h = x_max / grid as f64;
    let mut best = (0.0, symbol_s(0.0, p)?);
    for k in 1..=grid {
        let x = k as f64 * h;
        let s = symbol_s(x, p)?;
        if s < best.1 {
            best = (x, s);
        }
    }
    let (mut a, mut b) = ((best.0 - h).max(0.0), (best.0 + h).min(x_max));
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (symbol_s(c, p)?, symbol_s(d, p)?);
    while b - a > 1e-12 * (1.0 + best.0) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = symbol_s(c, p)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = symbol_s(d, p)?;
        }
    }
    for (x, s) in [(c, fc), (d, fd)] {
        if s < best.1 {
            best = (x, s);
        }
    }
    Ok(SymbolMinimum {
        x_min: best.0,
        s_min: best.1,
    })
}

/// Bisection bracket for the threshold search.
pub const THRESHOLD_BRACKET: (f64, f64) = (0.5, 1.5);

/// Bisection on `γ ↦ min_x S(x, γ)` over [`THRESHOLD_BRACKET`].
pub fn threshold_from_symbol(tol: f64) -> Result<f64> {
    threshold_from_symbol_with(tol, 50.0, 2000)
}

/// [`threshold_from_symbol`] with explicit scan range and resolution.
pub fn threshold_from_symbol_with(tol: f64, x_max: f64, grid: usize) -> Result<f64> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParams(format!("tolerance must be positive, got {tol}")));
    }
    let s_min = |g: f64| min_symbol(g, x_max, grid).map(|m| m.s_min);
    let (mut lo, mut hi) = THRESHOLD_BRACKET;
    let (f_lo, f_hi) = (s_min(lo)?, s_min(hi)?);
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(Error::BracketFailure { lo, hi, f_lo, f_hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if s_min(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `48π² ∫ |f̂^♯_β(x)|² S(x) dx` from the closed form
/// `f̂^♯_β(x) = √(2/π) β⁻¹ K_{ix/β}(1)`, i.e.
/// `(192π/β) ∫₀^∞ K_{iν}(1)² S(βν) dν`.
pub fn leading_coefficient(beta: f64, gamma: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidParams(format!("beta must be positive, got {beta}")));
    }
    let p = SymbolParams::new(gamma)?;
    let r = try_integrate(
        |nu| {
            let k = macdonald_imag_order(nu)?;
            Ok(k * k * symbol_s(beta * nu, p)?)
        },
        0.0,
        40.0,
        spec,
    )?;
    Ok(192.0 * PI / beta * r.value)
}

/// Largest `β` in `beta_grid` whose leading coefficient is negative, or
/// `None` when the grid has no such value.
pub fn find_negative_beta(gamma: f64, beta_grid: &[f64], spec: &QuadratureSpec) -> Result<Option<f64>> {
    if !(gamma >= 0.0 && gamma < gamma_critical()) {
        return Err(Error::InvalidParams(format!(
            "find_negative_beta needs 0 ≤ γ < γ_c, got {gamma}"
        )));
    }
    let mut best: Option<f64> = None;
    for &beta in beta_grid {
        if leading_coefficient(beta, gamma, spec)? < 0.0 {
            best = Some(best.map_or(beta, |b| b.max(beta)));
        }
    }
    Ok(best)
}

/// One evaluation of `Φ^λ[η_n]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub n: u32,
    pub beta: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub breakdown: FormBreakdown,
    pub total_over_n2: f64,
}

/// A sweep row: the record, or the error that prevented it.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub n: u32,
    pub outcome: Result<SweepRecord>,
}

/// Evaluate `Φ^λ` on `η_n = scale_charge(trial_fbeta(β), n)` for each `n`.
/// Rows are computed in parallel and returned in the order of `n_list`;
/// a failed row does not stop the sweep.
pub fn collapse_sweep(
    beta: f64,
    params: &FormParams,
    n_list: &[u32],
    spec: &QuadratureSpec,
) -> Result<Vec<SweepEntry>> {
    params.validate()?;
    spec.validate()?;
    if n_list.is_empty() || n_list.windows(2).any(|w| w[1] <= w[0]) || n_list[0] == 0 {
        return Err(Error::InvalidParams("n_list must be nonempty, positive and increasing".into()));
    }
    let base = trial_fbeta(beta)?;
    Ok(n_list
        .par_iter()
        .map(|&n| {
            let outcome = scale_charge(&base, n).and_then(|eta| phi_total(&eta, params, spec)).map(|b| {
                let nf = f64::from(n);
                SweepRecord {
                    n,
                    beta,
                    gamma: params.gamma,
                    lambda: params.lambda,
                    breakdown: b,
                    total_over_n2: b.total / (nf * nf),
                }
            });
            SweepEntry { n, outcome }
        })
        .collect())
}

/// Least-squares fit `total ≈ c2·n² + c1·n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub c2: f64,
    pub c1: f64,
    /// Root of the summed squared misfit.
    pub residual: f64,
}

pub fn fit_scaling(records: &[SweepRecord]) -> Result<ScalingFit> {
    if records.len() < 4 {
        return Err(Error::InsufficientRecords {
            needed: 4,
            got: records.len(),
        });
    }
    let (mut s4, mut s3, mut s2, mut t2, mut t1) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for r in records {
        let n = f64::from(r.n);
        let t = r.breakdown.total;
        s4 += n.powi(4);
        s3 += n.powi(3);
        s2 += n * n;
        t2 += n * n * t;
        t1 += n * t;
    }
    let det = s4 * s2 - s3 * s3;
    if det.abs() <= f64::EPSILON * s4 * s2 {
        return Err(Error::InvalidParams("scaling fit needs at least two distinct n".into()));
    }
    let c2 = (t2 * s2 - t1 * s3) / det;
    let c1 = (s4 * t1 - s3 * t2) / det;
    let residual = records
        .iter()
        .map(|r| {
            let n = f64::from(r.n);
            (r.breakdown.total - c2 * n * n - c1 * n).powi(2)
        })
        .sum::<f64>()
        .sqrt();
    Ok(ScalingFit { c2, c1, residual })
}

/// Outcome of the collapse test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CollapseVerdict {
    #[serde(rename = "collapse")]
    Collapse,
    #[serde(rename = "no-collapse")]
    NoCollapse,
}

/// Collapse when the last five totals are strictly decreasing and the final
/// one lies below `−100·|total|` of the first record (the `n = 1` row in a
/// standard sweep).
pub fn collapse_verdict(records: &[SweepRecord]) -> CollapseVerdict {
    if records.len() < 5 {
        return CollapseVerdict::NoCollapse;
    }
    let tail = &records[records.len() - 5..];
    let decreasing = tail.windows(2).all(|w| w[1].breakdown.total < w[0].breakdown.total);
    let reference = records[0].breakdown.total.abs();
    let deep = tail[4].breakdown.total < -100.0 * reference;
    if decreasing && deep {
        CollapseVerdict::Collapse
    } else {
        CollapseVerdict::NoCollapse
    }
}
