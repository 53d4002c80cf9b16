//! The subcommands, each rendering its complete output as text so that the
//! binary only has to route it.

use std::fmt::Write as _;

use phiform_core::momentum_forms::{phi_diagonalized, phi_total, phi_zero};
use phiform_core::position_forms::position_breakdown;
use phiform_core::specfun::{symbol_s, SymbolParams};
use phiform_core::stability::{
    collapse_sweep, collapse_verdict, fit_scaling, gamma_critical, gamma_prime_critical, leading_coefficient,
    threshold_from_symbol,
};
use phiform_core::{ChargeFamily, SweepRecord};
use serde_json::{json, Value};

use crate::config::{OutputFormat, Representation, RunConfig};
use crate::error::CliResult;

/// Text for standard output, and optionally for standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub stdout: String,
    pub stderr: Option<String>,
}

impl Rendered {
    fn out(stdout: String) -> Self {
        Self { stdout, stderr: None }
    }
}

/// Round-trip float formatting with 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

pub const THRESHOLD_TOLERANCE: f64 = 1e-10;

pub fn thresholds() -> CliResult<Rendered> {
    let closed = gamma_critical();
    let bisection = threshold_from_symbol(THRESHOLD_TOLERANCE)?;
    Ok(Rendered::out(pretty(&json!({
        "gamma_c": closed,
        "gamma_c_bisection": bisection,
        "gamma_prime_c": gamma_prime_critical(),
        "agreement": (closed - bisection).abs(),
    }))))
}

pub fn symbol(cfg: &RunConfig) -> CliResult<Rendered> {
    let p = SymbolParams::new(cfg.form_params.gamma)?;
    let grid = cfg.symbol;
    let mut rows = Vec::with_capacity(grid.samples);
    for k in 0..grid.samples {
        let x = if k + 1 == grid.samples {
            grid.x_max
        } else {
            grid.x_max * k as f64 / (grid.samples - 1) as f64
        };
        rows.push((x, symbol_s(x, p)?));
    }
    let text = match cfg.format() {
        OutputFormat::Csv => {
            let mut s = String::from("x,S\n");
            for (x, v) in rows {
                let _ = writeln!(s, "{},{}", fmt_float(x), fmt_float(v));
            }
            s
        }
        OutputFormat::Json => pretty(&Value::Array(rows.iter().map(|(x, v)| json!({"x": x, "S": v})).collect())),
    };
    Ok(Rendered::out(text))
}

pub fn form(cfg: &RunConfig) -> CliResult<Rendered> {
    let charge_spec = cfg.charge()?;
    let f = charge_spec.build()?;
    let params = &cfg.form_params;
    let spec = &cfg.quadrature;
    let head = json!({
        "charge": charge_spec.to_string(),
        "representation": cfg.representation.as_str(),
        "gamma": params.gamma,
        "lambda": params.lambda,
        "inv_scattering_length": params.inv_scattering_length,
    });
    let body = match cfg.representation {
        Representation::Momentum => {
            let b = phi_total(&f, params, spec)?;
            json!({
                "diag": b.diag, "off": b.off, "reg": b.reg, "zero": b.zero,
                "total": b.total, "err_estimate": b.err_estimate,
            })
        }
        Representation::Position => {
            let b = position_breakdown(&f, params.lambda, params.gamma, spec)?;
            let zero = phi_zero(&f, params, spec)?;
            json!({
                "diag": b.diag(), "off": b.off(), "reg": b.reg, "zero": zero.value,
                "total": b.diag() + b.off() + b.reg + zero.value,
                "err_estimate": b.err_estimate + zero.err_estimate,
                "pieces": {
                    "diag_l2": b.diag_l2, "diag_gagliardo": b.diag_gagliardo,
                    "off_negative": b.off_negative, "off_positive": b.off_positive,
                },
            })
        }
        Representation::Diagonalized => {
            let d = phi_diagonalized(&f, params.gamma, spec)?;
            let zero = phi_zero(&f, params, spec)?;
            json!({
                "diag": d.diag, "off": d.off, "reg": d.reg, "zero": zero.value,
                "total": d.total() + zero.value,
                "err_estimate": zero.err_estimate,
            })
        }
    };
    let mut out = head;
    if let (Value::Object(o), Value::Object(b)) = (&mut out, body) {
        o.extend(b);
    }
    Ok(Rendered::out(pretty(&out)))
}

/// The sweep rows plus the footer with the fit and verdict.
pub fn collapse(cfg: &RunConfig) -> CliResult<Rendered> {
    let charge = cfg.charge()?.build()?;
    let ChargeFamily::FBeta { beta } = *charge.family() else {
        unreachable!("validated: collapse charges are trial charges")
    };
    let n_list = cfg.collapse.n_list();
    let entries = collapse_sweep(beta, &cfg.form_params, &n_list, &cfg.quadrature)?;
    let mut clean: Vec<SweepRecord> = Vec::new();
    let mut failed = Vec::new();
    for e in &entries {
        match &e.outcome {
            Ok(r) => clean.push(*r),
            Err(err) => failed.push(json!({"n": e.n, "error": err.to_string()})),
        }
    }
    let stdout = match cfg.format() {
        OutputFormat::Csv => {
            let mut s = String::from("n,diag,off,reg,zero,total,total_over_n2\n");
            for e in &entries {
                match &e.outcome {
                    Ok(r) => {
                        let b = r.breakdown;
                        let cells = [b.diag, b.off, b.reg, b.zero, b.total, r.total_over_n2].map(fmt_float);
                        let _ = writeln!(s, "{},{}", e.n, cells.join(","));
                    }
                    Err(_) => {
                        let _ = writeln!(s, "{},,,,,,", e.n);
                    }
                }
            }
            s
        }
        OutputFormat::Json => pretty(&serde_json::to_value(&clean).expect("records serialize")),
    };
    let fit = fit_scaling(&clean)?;
    let oracle = leading_coefficient(beta, cfg.form_params.gamma, &cfg.quadrature)?;
    let footer = json!({
        "fit": fit,
        "verdict": collapse_verdict(&clean),
        "leading_coefficient": oracle,
        "relative_deviation": (fit.c2 - oracle).abs() / oracle.abs(),
        "failed_rows": failed,
    });
    Ok(Rendered {
        stdout,
        stderr: Some(serde_json::to_string(&footer).expect("json values serialize") + "\n"),
    })
}
