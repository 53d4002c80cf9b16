use thiserror::Error;

use crate::quadrature::QuadResult;

/// Errors produced by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {function}: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },

    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),

    #[error("quadrature did not converge after {subdivisions} subdivisions (value {}, error estimate {})", best.value, best.err_estimate)]
    Convergence { best: QuadResult, subdivisions: usize },

    #[error("non-finite integrand value {value} at {at}")]
    NonFiniteIntegrand { at: f64, value: f64 },

    #[error("invalid charge: {0}")]
    InvalidCharge(String),

    #[error("invalid theta profile: {0}")]
    InvalidTheta(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("scaling fit needs at least {needed} successful records, got {got}")]
    InsufficientRecords { needed: usize, got: usize },

    #[error("bisection bracket [{lo}, {hi}] does not change sign (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    BracketFailure { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
}

impl Error {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }

    /// True for quadrature convergence failures, including ones raised by
    /// nested integrals.
    pub fn is_convergence_failure(&self) -> bool {
        matches!(self, Error::Convergence { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
