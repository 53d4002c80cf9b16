use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cutoff profile `θ` of the three-body repulsion `γ θ(|y|)/|y|`.
///
/// Valid profiles satisfy `θ(0) = 1` and `1 − s/b ≤ θ(s) ≤ 1 + s/b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThetaProfile {
    /// `θ = 1` on `[0, b)` and `0` beyond.
    Indicator { b: f64 },
    /// Piecewise linear through `(s, θ)` samples, zero beyond the last one.
    Sampled { b: f64, points: Vec<(f64, f64)> },
    /// `θ ≡ 1`: the limit `b → ∞`, without compact support.
    Constant,
}

impl Default for ThetaProfile {
    fn default() -> Self {
        ThetaProfile::Indicator { b: 1.0 }
    }
}

impl ThetaProfile {
    pub fn indicator(b: f64) -> Result<Self> {
        let t = ThetaProfile::Indicator { b };
        t.validate()?;
        Ok(t)
    }

    pub fn sampled(b: f64, points: Vec<(f64, f64)>) -> Result<Self> {
        let t = ThetaProfile::Sampled { b, points };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let b = match self {
            ThetaProfile::Constant => return Ok(()),
            ThetaProfile::Indicator { b } | ThetaProfile::Sampled { b, .. } => *b,
        };
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::InvalidTheta(format!("cutoff b must be positive, got {b}")));
        }
        let ThetaProfile::Sampled { points, .. } = self else {
            return Ok(());
        };
        let Some(&(s0, t0)) = points.first() else {
            return Err(Error::InvalidTheta("sampled profile needs at least one point".into()));
        };
        if s0 != 0.0 || t0 != 1.0 {
            return Err(Error::InvalidTheta(format!("profile must start at (0, 1), got ({s0}, {t0})")));
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidTheta("sample positions must be strictly increasing".into()));
            }
        }
        for &(s, t) in points {
            if !(s.is_finite() && t.is_finite()) {
                return Err(Error::InvalidTheta(format!("non-finite sample ({s}, {t})")));
            }
            let slack = 1e-12 * (1.0 + s / b);
            if t < 1.0 - s / b - slack || t > 1.0 + s / b + slack {
                return Err(Error::InvalidTheta(format!(
                    "θ({s}) = {t} violates 1 − s/b ≤ θ(s) ≤ 1 + s/b with b = {b}"
                )));
            }
        }
        let last = points[points.len() - 1];
        if last.1 != 0.0 && last.0 < b {
            return Err(Error::InvalidTheta(format!(
                "profile drops to zero at s = {} < b = {b}, violating the lower bound",
                last.0
            )));
        }
        Ok(())
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            ThetaProfile::Constant => 1.0,
            ThetaProfile::Indicator { b } => {
                if s < *b {
                    1.0
                } else {
                    0.0
                }
            }
            ThetaProfile::Sampled { points, .. } => {
                let idx = points.partition_point(|&(x, _)| x <= s);
                if idx == 0 || idx == points.len() {
                    if idx == points.len() && s == points[idx - 1].0 {
                        return points[idx - 1].1;
                    }
                    return if idx == 0 { 1.0 } else { 0.0 };
                }
                let (s0, t0) = points[idx - 1];
                let (s1, t1) = points[idx];
                t0 + (t1 - t0) * (s - s0) / (s1 - s0)
            }
        }
    }

    /// End of the support, `None` for the constant profile.
    pub fn support(&self) -> Option<f64> {
        match self {
            ThetaProfile::Constant => None,
            ThetaProfile::Indicator { b } => Some(*b),
            ThetaProfile::Sampled { points, .. } => points.last().map(|p| p.0),
        }
    }

    /// Points where `θ` may fail to be smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            ThetaProfile::Constant => Vec::new(),
            ThetaProfile::Indicator { b } => vec![*b],
            ThetaProfile::Sampled { points, .. } => points.iter().map(|p| p.0).collect(),
        }
    }

    /// Cutoff length `b` of the sandwich condition (`∞` for the constant
    /// profile).
    pub fn cutoff(&self) -> f64 {
        match self {
            ThetaProfile::Constant => f64::INFINITY,
            ThetaProfile::Indicator { b } | ThetaProfile::Sampled { b, .. } => *b,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_satisfies_sandwich() {
        let b = 1.5;
        let t = ThetaProfile::indicator(b).unwrap();
        for k in 0..=3000 {
            let s = k as f64 * 0.005;
            let v = t.eval(s);
            assert!(v >= 1.0 - s / b && v <= 1.0 + s / b, "{s}");
        }
        assert_eq!(t.eval(0.0), 1.0);
        assert!(ThetaProfile::indicator(0.0).is_err());
    }

    #[test]
    fn sampled_profiles() {
        let t = ThetaProfile::sampled(1.0, vec![(0.0, 1.0), (0.5, 0.8), (1.0, 0.0)]).unwrap();
        assert!((t.eval(0.25) - 0.9).abs() < 1e-15);
        assert_eq!(t.eval(1.0), 0.0);
        assert_eq!(t.eval(2.0), 0.0);
        assert!(ThetaProfile::sampled(1.0, vec![(0.0, 0.9)]).is_err());
        assert!(ThetaProfile::sampled(1.0, vec![(0.0, 1.0), (0.5, 0.2)]).is_err());
        assert!(ThetaProfile::sampled(1.0, vec![(0.0, 1.0), (0.5, 1.0)]).is_err());
        assert!(ThetaProfile::sampled(1.0, vec![(0.0, 1.0), (0.5, 1.0), (0.4, 1.0)]).is_err());
        assert!(ThetaProfile::sampled(1.0, vec![(0.0, 1.0), (1.2, 1.0)]).is_ok());
    }
}
