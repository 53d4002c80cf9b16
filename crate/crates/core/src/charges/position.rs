//! Position profile of the trial family and its cached interpolation table.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::quadrature::{try_integrate, QuadratureSpec, Scheme};

use super::WINDOW_DECAY;

/// `sin(z)/z` with the removable singularity filled in.
pub(super) fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        1.0 - z * z / 6.0
    } else {
        z.sin() / z
    }
}

fn direct_spec() -> QuadratureSpec {
    QuadratureSpec {
        abs_tol: 1e-14,
        rel_tol: 1e-13,
        max_subdivisions: 4000,
        truncation_radius: 1.0,
        scheme: Scheme::GaussLegendreAdaptive,
    }
}

/// Above this value of `y · p_max` the real-axis integral is too oscillatory.
const REAL_AXIS_LIMIT: f64 = 400.0;

/// `ξ_β(y)` for the undilated trial charge.
pub(super) fn fbeta_position(beta: f64, y: f64) -> Result<f64> {
    let half = WINDOW_DECAY.acosh() / beta;
    if y * half.exp() <= REAL_AXIS_LIMIT {
        fbeta_position_real_axis(beta, y)
    } else {
        fbeta_position_contour(beta, y)
    }
}

/// `√(2/π) ∫ sinc(y e^t) e^t g(t) dt` along the real `t` axis.
pub(super) fn fbeta_position_real_axis(beta: f64, y: f64) -> Result<f64> {
    let half = WINDOW_DECAY.acosh() / beta;
    let r = try_integrate(
        |t| {
            let p = t.exp();
            Ok(sinc(y * p) * p * (-(beta * t).cosh()).exp())
        },
        -half,
        half,
        &direct_spec(),
    )?;
    Ok((2.0 / PI).sqrt() * r.value)
}

/// Sine transform along the ray `p = e^{u + iφ}`, where `e^{ipy}` decays and
/// the oscillation of the real-axis integrand is damped away.
pub(super) fn fbeta_position_contour(beta: f64, y: f64) -> Result<f64> {
    let phi = FRAC_PI_4.min(FRAC_PI_4 / beta);
    let (cb, sb) = ((beta * phi).cos(), (beta * phi).sin());
    let (cp, sp) = (phi.cos(), phi.sin());
    let reach = (WINDOW_DECAY / cb).acosh() / beta;
    let lo = -reach;
    let hi = reach.min((WINDOW_DECAY / (y * sp)).ln());
    if hi <= lo {
        return Ok(0.0);
    }
    let r = try_integrate(
        |u| {
            let (ch, sh) = ((beta * u).cosh(), (beta * u).sinh());
            let eu = u.exp();
            let re = -ch * cb - y * eu * sp;
            let im = y * eu * cp - sh * sb;
            Ok(re.exp() * im.sin())
        },
        lo,
        hi,
        &direct_spec(),
    )?;
    Ok((2.0 / PI).sqrt() * r.value / y)
}

const NODES: usize = 25;

#[derive(Debug, Clone)]
struct Panel {
    a: f64,
    b: f64,
    coeffs: [f64; NODES],
}

impl Panel {
    fn fit<F: Fn(f64) -> Result<f64>>(f: &F, a: f64, b: f64) -> Result<(Self, f64)> {
        let mut values = [0.0; NODES];
        let mut max_abs = 0.0f64;
        for (j, v) in values.iter_mut().enumerate() {
            let s = (PI * (j as f64 + 0.5) / NODES as f64).cos();
            let y = 0.5 * (a + b) + 0.5 * (b - a) * s;
            *v = f(y)?;
            max_abs = max_abs.max(v.abs());
        }
        let mut coeffs = [0.0; NODES];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let sum: f64 = values
                .iter()
                .enumerate()
                .map(|(j, v)| v * (PI * k as f64 * (j as f64 + 0.5) / NODES as f64).cos())
                .sum();
            *c = 2.0 * sum / NODES as f64;
        }
        coeffs[0] *= 0.5;
        Ok((Self { a, b, coeffs }, max_abs))
    }

    fn eval(&self, y: f64) -> f64 {
        let s = (2.0 * y - self.a - self.b) / (self.b - self.a);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * s * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        s * b1 - b2 + self.coeffs[0]
    }
}

/// Piecewise Chebyshev interpolant of a position profile on `[0, radius]`,
/// with panels refined until off-node checks agree with direct evaluation.
#[derive(Debug, Clone)]
pub(super) struct PositionTable {
    panels: Vec<Panel>,
    radius: f64,
}

const CHECK_POINTS: [f64; 2] = [-0.6180339887, 0.4142135624];
const MAX_RADIUS: f64 = 1e30;
const MAX_DEPTH: u32 = 40;

impl PositionTable {
    pub(super) fn build<F: Fn(f64) -> Result<f64>>(f: F) -> Result<Self> {
        let mut panels = Vec::new();
        let mut peak = 0.0f64;
        let mut weighted_peak = 0.0f64;
        let mut quiet = 0;
        let mut a = 0.0;
        loop {
            let b = a + 0.25f64.max(0.25 * a);
            let (panel_max, weighted) = Self::refine(&f, a, b, peak, 0, &mut panels)?;
            peak = peak.max(panel_max);
            weighted_peak = weighted_peak.max(weighted);
            quiet = if a > 1.0 && weighted < 1e-13 * weighted_peak { quiet + 1 } else { 0 };
            a = b;
            if quiet >= 2 {
                return Ok(Self { panels, radius: a });
            }
            if a > MAX_RADIUS {
                return Err(Error::domain("position table", "profile does not decay within range"));
            }
        }
    }

    /// Fit `[a, b]`, bisecting until the interpolant passes the off-node
    /// checks. Returns the panel maximum of `|ξ|` and of `y^{3/2}|ξ|`.
    fn refine<F: Fn(f64) -> Result<f64>>(
        f: &F,
        a: f64,
        b: f64,
        peak: f64,
        depth: u32,
        out: &mut Vec<Panel>,
    ) -> Result<(f64, f64)> {
        let (panel, max_abs) = Panel::fit(f, a, b)?;
        let tol = 1e-12 * peak.max(max_abs);
        let mut ok = true;
        for s in CHECK_POINTS {
            let y = 0.5 * (a + b) + 0.5 * (b - a) * s;
            if (panel.eval(y) - f(y)?).abs() > tol {
                ok = false;
                break;
            }
        }
        if ok || depth >= MAX_DEPTH {
            out.push(panel);
            return Ok((max_abs, max_abs * b.powf(1.5)));
        }
        let mid = 0.5 * (a + b);
        let (m1, w1) = Self::refine(f, a, mid, peak.max(max_abs), depth + 1, out)?;
        let (m2, w2) = Self::refine(f, mid, b, peak.max(max_abs), depth + 1, out)?;
        Ok((m1.max(m2), w1.max(w2)))
    }

    pub(super) fn radius(&self) -> f64 {
        self.radius
    }

    pub(super) fn eval(&self, y: f64) -> f64 {
        if !(0.0..self.radius).contains(&y) {
            return 0.0;
        }
        let idx = self.panels.partition_point(|p| p.b <= y);
        self.panels[idx.min(self.panels.len() - 1)].eval(y)
    }
}
