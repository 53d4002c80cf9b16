//! Named verification checks run by `phiform verify`.
//!
//! Each check belongs to one acceptance criterion and to a level: `fast`
//! checks are closed-form and symbol identities, `full` adds the
//! cross-representation, Yukawa, collapse and bound batteries.

use std::f64::consts::PI;
use std::time::Instant;

use phiform_core::momentum_forms::{phi_diag, phi_diagonalized, phi_off, phi_reg, phi_total};
use phiform_core::position_forms::{
    coercive_lambda_threshold, hardy_rellich_gap, phi_diag_position, phi_off_position, phi_reg_position,
    sandwich_bounds, yukawa_identity_residual,
};
use phiform_core::specfun::{bessel_k0, bessel_k2, macdonald_imag_order, symbol_s, symbol_s_at_zero, SymbolParams};
use phiform_core::stability::{
    collapse_sweep, collapse_verdict, fit_scaling, gamma_critical, gamma_prime_critical, leading_coefficient,
    min_symbol, threshold_from_symbol, ScalingFit,
};
use phiform_core::{
    gaussian_charge, gaussian_mixture, trial_fbeta, FormParams, MixtureTerm, QuadratureSpec, RadialCharge, SweepRecord,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::VerifyLevel;

/// Deliberate perturbations used to check that failures are reported.
#[derive(Debug, Clone, Copy, Default)]
pub struct Faults {
    /// Added to the closed-form `γ_c` wherever the checks use it.
    pub gamma_c_offset: f64,
}

impl Faults {
    fn gamma_c(&self) -> f64 {
        gamma_critical() + self.gamma_c_offset
    }
}

type Outcome = Result<String, String>;

pub struct CheckDef {
    pub name: &'static str,
    pub criterion: u8,
    pub level: VerifyLevel,
    run: fn(&Faults) -> Outcome,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: &'static str,
    pub criterion: u8,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

const fn check(name: &'static str, criterion: u8, level: VerifyLevel, run: fn(&Faults) -> Outcome) -> CheckDef {
    CheckDef {
        name,
        criterion,
        level,
        run,
    }
}

use VerifyLevel::{Fast, Full};

pub const CHECKS: &[CheckDef] = &[
    check("threshold_constants", 1, Fast, threshold_constants),
    check("threshold_bisection", 1, Fast, threshold_bisection),
    check("special_function_values", 2, Fast, special_function_values),
    check("symbol_origin", 2, Fast, symbol_origin),
    check("symbol_minimum_sign", 2, Fast, symbol_minimum_sign),
    check("symbol_tail", 2, Fast, symbol_tail),
    check("cross_rep_diagonalized", 3, Full, cross_rep_diagonalized),
    check("cross_rep_position", 3, Full, cross_rep_position),
    check("yukawa_identity", 4, Full, yukawa_identity),
    check("collapse_subthreshold_sweep", 5, Full, collapse_subthreshold_sweep),
    check("collapse_superthreshold_sweep", 5, Full, collapse_superthreshold_sweep),
    check("collapse_leading_order", 5, Full, collapse_leading_order),
    check("collapse_lambda_independence", 5, Full, collapse_lambda_independence),
    check("hardy_rellich_battery", 6, Full, hardy_rellich_battery),
    check("sandwich_battery", 6, Full, sandwich_battery),
    check("coercive_positivity", 6, Full, coercive_positivity),
    check("closed_form_momentum", 7, Fast, closed_form_momentum),
    check("closed_form_other_representations", 7, Full, closed_form_other_representations),
];

pub fn selected(level: VerifyLevel) -> impl Iterator<Item = &'static CheckDef> {
    CHECKS.iter().filter(move |c| level == Full || c.level == Fast)
}

pub fn run_check(def: &CheckDef, faults: &Faults) -> CheckReport {
    let start = Instant::now();
    let outcome = (def.run)(faults);
    let seconds = start.elapsed().as_secs_f64();
    let (passed, detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CheckReport {
        name: def.name,
        criterion: def.criterion,
        passed,
        detail,
        seconds,
    }
}

pub fn run(level: VerifyLevel, faults: &Faults) -> Vec<CheckReport> {
    selected(level).map(|c| run_check(c, faults)).collect()
}

pub fn summary(level: VerifyLevel, reports: &[CheckReport]) -> Value {
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.name).collect();
    json!({
        "level": match level { Fast => "fast", Full => "full" },
        "passed": failed.is_empty(),
        "total": reports.len(),
        "failed": failed,
        "checks": reports,
    })
}

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn num<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn threshold_constants(faults: &Faults) -> Outcome {
    let g = faults.gamma_c();
    let gp = gamma_prime_critical();
    ensure(
        (g - 0.782004).abs() <= 5e-7 && (gp - 1.44867).abs() <= 5e-6,
        format!("gamma_c = {g}, gamma_prime_c = {gp}"),
    )
}

fn threshold_bisection(faults: &Faults) -> Outcome {
    let g = faults.gamma_c();
    let b = num(threshold_from_symbol(1e-10))?;
    ensure((g - b).abs() <= 1e-8, format!("bisection {b} vs closed form {g}: {:.3e}", (g - b).abs()))
}

fn special_function_values(_: &Faults) -> Outcome {
    const K0_1: f64 = 0.421_024_438_240_708_33;
    const K2_1: f64 = 1.624_838_898_635_177_5;
    let k0 = num(bessel_k0(1.0))?;
    let k2 = num(bessel_k2(1.0))?;
    let ki0 = num(macdonald_imag_order(0.0))?;
    let small = num(bessel_k2(0.1))?;
    let worst = [rel(k0, K0_1), rel(k2, K2_1), rel(ki0, K0_1)].into_iter().fold(0.0, f64::max);
    ensure(
        worst <= 1e-12 && (small - 199.5).abs() < 0.1,
        format!("worst relative error {worst:.2e}, K2(0.1) = {small}"),
    )
}

fn symbol_origin(faults: &Faults) -> Outcome {
    let gc = faults.gamma_c();
    let mut worst = 0.0f64;
    for g in [0.0, 0.5, gc, 1.0, 2.0] {
        let p = num(SymbolParams::new(g))?;
        let s0 = num(symbol_s(0.0, p))?;
        worst = worst.max((s0 - PI / 2.0 * (g - gc)).abs()).max((symbol_s_at_zero(p) - s0).abs());
    }
    ensure(worst <= 1e-12, format!("max |S(0) − (π/2)(γ − γ_c)| = {worst:.2e}"))
}

fn symbol_minimum_sign(_: &Faults) -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for (g, nonneg) in [(0.8, true), (1.0, true), (1.5, true), (3.0, true)]
        .into_iter()
        .chain([(0.0, false), (0.3, false), (0.6, false), (0.75, false)])
    {
        let m = num(min_symbol(g, 50.0, 2000))?;
        ok &= if nonneg { m.s_min >= 0.0 } else { m.s_min < 0.0 };
        detail.push(format!("γ={g}: {:.6}", m.s_min));
    }
    ensure(ok, detail.join(", "))
}

fn symbol_tail(_: &Faults) -> Outcome {
    let s0 = num(symbol_s(100.0, num(SymbolParams::new(0.0))?))?;
    let s1 = num(symbol_s(1e6, num(SymbolParams::new(1.0))?))?;
    let half = 3f64.sqrt() / 2.0;
    ensure(
        (s0 - half).abs() < 1e-4 && (s1 - half).abs() < 1e-5,
        format!("S(100; γ=0) = {s0}, S(1e6; γ=1) = {s1}"),
    )
}

fn charges() -> Result<Vec<(&'static str, RadialCharge)>, String> {
    Ok(vec![
        ("gaussian(1)", num(gaussian_charge(1.0))?),
        ("fbeta(1)", num(trial_fbeta(1.0))?),
    ])
}

const CROSS_TOL: f64 = 1e-5;

fn cross_rep_diagonalized(_: &Faults) -> Outcome {
    let s = spec();
    let mut worst = 0.0f64;
    let mut detail = Vec::new();
    let mut list = charges()?;
    list.push(("fbeta(0.5)", num(trial_fbeta(0.5))?));
    for (name, f) in list {
        let d = num(phi_diagonalized(&f, 1.0, &s))?;
        let pairs = [
            (num(phi_diag(&f, 0.0, &s))?.value, d.diag),
            (num(phi_off(&f, 0.0, &s))?.value, d.off),
            (num(phi_reg(&f, 1.0, &s))?.value, d.reg),
        ];
        let w = pairs.iter().map(|&(m, d)| rel(d, m)).fold(0.0, f64::max);
        worst = worst.max(w);
        detail.push(format!("{name}: {w:.2e}"));
    }
    ensure(worst <= CROSS_TOL, detail.join(", "))
}

fn cross_rep_position(_: &Faults) -> Outcome {
    let s = spec();
    let mut worst = 0.0f64;
    let mut detail = Vec::new();
    for (name, f) in charges()? {
        let reg = rel(num(phi_reg_position(&f, 1.0, &s))?.value, num(phi_reg(&f, 1.0, &s))?.value);
        let mut w = reg;
        for lambda in [0.5, 1.0, 4.0] {
            let diag = rel(
                num(phi_diag_position(&f, lambda, &s))?.value,
                num(phi_diag(&f, lambda, &s))?.value,
            );
            let off = rel(num(phi_off_position(&f, lambda, &s))?.value, num(phi_off(&f, lambda, &s))?.value);
            w = w.max(diag).max(off);
        }
        worst = worst.max(w);
        detail.push(format!("{name}: {w:.2e}"));
    }
    ensure(worst <= CROSS_TOL, detail.join(", "))
}

fn yukawa_identity(_: &Faults) -> Outcome {
    let s = spec();
    let mut worst = 0.0f64;
    for lambda in [0.25, 1.0, 4.0] {
        for y in [0.5, 1.0, 2.0] {
            worst = worst.max(num(yukawa_identity_residual(lambda, y, &s))?);
        }
    }
    ensure(worst <= 1e-6, format!("max residual {worst:.2e} on the 3×3 grid"))
}

pub const COLLAPSE_BETA: f64 = 0.3;

/// Powers of two up to `2^16`: deep enough for the `λ`-dependent terms of
/// the trial family to fall below the leading order.
pub fn extended_n_list() -> Vec<u32> {
    (0..=16).map(|k| 1u32 << k).collect()
}

pub fn sweep(gamma: f64, lambda: f64, n_list: &[u32]) -> Result<Vec<SweepRecord>, String> {
    let params = num(FormParams::new(gamma, lambda))?;
    num(collapse_sweep(COLLAPSE_BETA, &params, n_list, &spec()))?
        .into_iter()
        .map(|e| e.outcome.map_err(|err| format!("n = {}: {err}", e.n)))
        .collect()
}

pub fn short_n_list() -> Vec<u32> {
    (1..=32).collect()
}

fn last_five_decreasing(records: &[SweepRecord]) -> bool {
    records[records.len() - 5..]
        .windows(2)
        .all(|w| w[1].breakdown.total < w[0].breakdown.total)
}

fn collapse_subthreshold_sweep(_: &Faults) -> Outcome {
    let records = sweep(0.5, 1.0, &short_n_list())?;
    let fit = num(fit_scaling(&records))?;
    let dec = last_five_decreasing(&records);
    ensure(
        fit.c2 < 0.0 && dec,
        format!(
            "n ≤ 32: c2 = {:.4}, last five decreasing: {dec}, verdict {:?}",
            fit.c2,
            collapse_verdict(&records)
        ),
    )
}

fn collapse_superthreshold_sweep(_: &Faults) -> Outcome {
    let fit = num(fit_scaling(&sweep(2.0, 1.0, &short_n_list())?))?;
    ensure(fit.c2 > 0.0, format!("γ = 2, n ≤ 32: c2 = {:.4}", fit.c2))
}

pub fn leading_order_deviation(fit: &ScalingFit, gamma: f64) -> Result<(f64, f64), String> {
    let oracle = num(leading_coefficient(COLLAPSE_BETA, gamma, &spec()))?;
    Ok((oracle, rel(fit.c2, oracle)))
}

fn collapse_leading_order(_: &Faults) -> Outcome {
    let records = sweep(0.5, 1.0, &extended_n_list())?;
    let fit = num(fit_scaling(&records))?;
    let (oracle, dev) = leading_order_deviation(&fit, 0.5)?;
    ensure(
        dev <= 0.01 && fit.c2 < 0.0 && last_five_decreasing(&records),
        format!(
            "n = 2^0..2^16: c2 = {:.6} vs {oracle:.6} ({dev:.2e}), verdict {:?}",
            fit.c2,
            collapse_verdict(&records)
        ),
    )
}

/// Largest pairwise relative spread of the values.
pub fn pairwise_spread(values: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            worst = worst.max((a - b).abs() / a.abs().min(b.abs()));
        }
    }
    worst
}

fn collapse_lambda_independence(_: &Faults) -> Outcome {
    let mut c2 = Vec::new();
    for lambda in [1.0, 5.0, 25.0] {
        c2.push(num(fit_scaling(&sweep(0.5, lambda, &extended_n_list())?))?.c2);
    }
    let spread = pairwise_spread(&c2);
    ensure(spread < 0.02, format!("c2 over λ ∈ {{1, 5, 25}}: {c2:.4?}, spread {spread:.2e}"))
}

pub const BATTERY_SEED: u64 = 0x5eed_f0a5;
pub const BATTERY_SIZE: usize = 20;
pub const BATTERY_GAMMAS: [f64; 4] = [0.5, 1.0, 2.0, 3.0];
pub const BATTERY_LAMBDAS: [f64; 2] = [1.0, 10.0];

/// Deterministic random positive Gaussian mixtures with one to three terms.
pub fn mixture_battery() -> Vec<RadialCharge> {
    let mut rng = ChaCha8Rng::seed_from_u64(BATTERY_SEED);
    (0..BATTERY_SIZE)
        .map(|_| {
            let k = rng.gen_range(1..=3);
            let terms: Vec<MixtureTerm> = (0..k)
                .map(|_| MixtureTerm {
                    weight: rng.gen_range(0.2..2.0),
                    scale: rng.gen_range(0.5..2.0),
                })
                .collect();
            gaussian_mixture(&terms).expect("positive weights and scales")
        })
        .collect()
}

fn hardy_rellich_battery(_: &Faults) -> Outcome {
    let s = spec();
    let mut min_ratio = f64::INFINITY;
    for f in mixture_battery() {
        let hr = num(hardy_rellich_gap(&f, &s))?;
        if hr.gap < 0.0 {
            return Err(format!("negative gap {} for {}", hr.gap, f.label()));
        }
        min_ratio = min_ratio.min(hr.gap / hr.rhs);
    }
    Ok(format!("{BATTERY_SIZE} charges, smallest gap/rhs {min_ratio:.4}"))
}

fn sandwich_battery(_: &Faults) -> Outcome {
    let s = spec();
    let battery = mixture_battery();
    let mut cases = 0;
    for &gamma in &BATTERY_GAMMAS {
        for &lambda in &BATTERY_LAMBDAS {
            let params = num(FormParams::new(gamma, lambda))?;
            for f in &battery {
                let b = num(sandwich_bounds(f, &params, &s))?;
                if !b.holds() {
                    return Err(format!("γ={gamma} λ={lambda} {}: {b:?}", f.label()));
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} cases within bounds"))
}

fn coercive_positivity(_: &Faults) -> Outcome {
    let s = spec();
    let battery = mixture_battery();
    let mut certified = Vec::new();
    let mut min_total = f64::INFINITY;
    for &gamma in BATTERY_GAMMAS.iter().filter(|&&g| g > gamma_prime_critical()) {
        for &lambda in &BATTERY_LAMBDAS {
            let params = num(FormParams::new(gamma, lambda))?;
            if !coercive_lambda_threshold(&params).certifies(lambda) {
                continue;
            }
            certified.push(format!("(γ={gamma}, λ={lambda})"));
            for f in &battery {
                let total = num(phi_total(f, &params, &s))?.total;
                if total <= 0.0 {
                    return Err(format!("γ={gamma} λ={lambda} {}: total {total}", f.label()));
                }
                min_total = min_total.min(total);
            }
        }
    }
    ensure(
        !certified.is_empty(),
        format!("certified {}, smallest total {min_total:.4}", certified.join(" ")),
    )
}

const CLOSED_TOL: f64 = 1e-6;

fn closed_form_momentum(_: &Faults) -> Outcome {
    let s = spec();
    let g = num(gaussian_charge(1.0))?;
    let diag = num(phi_diag(&g, 0.0, &s))?.value;
    let reg = num(phi_reg(&g, 1.0, &s))?.value;
    let (d_ref, r_ref) = (12.0 * 3f64.sqrt() * PI * PI, 24.0 * PI * PI);
    ensure(
        rel(diag, d_ref) <= CLOSED_TOL && rel(reg, r_ref) <= CLOSED_TOL,
        format!("diag {:.2e}, reg {:.2e}", rel(diag, d_ref), rel(reg, r_ref)),
    )
}

fn closed_form_other_representations(_: &Faults) -> Outcome {
    let s = spec();
    let g = num(gaussian_charge(1.0))?;
    let d = num(phi_diagonalized(&g, 1.0, &s))?;
    let reg_pos = num(phi_reg_position(&g, 1.0, &s))?.value;
    let (d_ref, r_ref) = (12.0 * 3f64.sqrt() * PI * PI, 24.0 * PI * PI);
    let errs = [rel(d.diag, d_ref), rel(d.reg, r_ref), rel(reg_pos, r_ref)];
    ensure(
        errs.iter().all(|&e| e <= CLOSED_TOL),
        format!(
            "diagonalized diag {:.2e}, diagonalized reg {:.2e}, position reg {:.2e}",
            errs[0], errs[1], errs[2]
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique_and_full_has_enough() {
        let mut names: Vec<_> = CHECKS.iter().map(|c| c.name).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), CHECKS.len());
        assert!(selected(Full).count() >= 12);
        assert!(selected(Fast).all(|c| c.level == Fast));
    }

    #[test]
    fn battery_is_deterministic() {
        let a: Vec<String> = mixture_battery().iter().map(|f| f.label().to_owned()).collect();
        let b: Vec<String> = mixture_battery().iter().map(|f| f.label().to_owned()).collect();
        assert_eq!(a, b);
        assert_eq!(a.len(), BATTERY_SIZE);
    }

    #[test]
    fn fault_is_detected() {
        let faults = Faults {
            gamma_c_offset: 1e-3,
        };
        let reports = run(Fast, &faults);
        let failed: Vec<_> = reports.iter().filter(|r| !r.passed).map(|r| r.name).collect();
        assert!(failed.contains(&"threshold_bisection"), "{failed:?}");
        assert!(run(Fast, &Faults::default()).iter().all(|r| r.passed));
    }
}
