use phiform_core::momentum_forms::phi_total;
use phiform_core::stability::{
    collapse_sweep, collapse_verdict, find_negative_beta, fit_scaling, gamma_critical, leading_coefficient,
};
use phiform_core::{scale_charge, trial_fbeta, CollapseVerdict, FormParams, QuadratureSpec, SweepRecord};

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn sweep(beta: f64, gamma: f64, lambda: f64, n: &[u32]) -> Vec<SweepRecord> {
    let params = FormParams::new(gamma, lambda).unwrap();
    collapse_sweep(beta, &params, n, &spec())
        .unwrap()
        .into_iter()
        .map(|e| e.outcome.unwrap())
        .collect()
}

fn powers_of_two(max_exp: u32) -> Vec<u32> {
    (0..=max_exp).map(|k| 1 << k).collect()
}

#[test]
fn zero_coupling_crosses_minus_thousand_by_n_64() {
    let n: Vec<u32> = (1..=64).collect();
    let records = sweep(0.3, 0.0, 1.0, &n);
    let first = records.iter().find(|r| r.breakdown.total < -1e3).map(|r| r.n);
    assert!(matches!(first, Some(k) if k <= 64), "{first:?}");
    let tail = &records[records.len() - 5..];
    assert!(tail.windows(2).all(|w| w[1].breakdown.total < w[0].breakdown.total));
    assert_eq!(collapse_verdict(&records), CollapseVerdict::Collapse);
}

#[test]
fn broader_trial_charge_is_negative_at_n_8() {
    let f = scale_charge(&trial_fbeta(0.5).unwrap(), 8).unwrap();
    let total = phi_total(&f, &FormParams::new(0.5, 1.0).unwrap(), &spec()).unwrap().total;
    assert!(total < 0.0, "{total}");
}

#[test]
fn total_over_n2_tends_to_leading_coefficient() {
    let oracle = leading_coefficient(0.3, 0.5, &spec()).unwrap();
    let records = sweep(0.3, 0.5, 1.0, &powers_of_two(16));
    let dev: Vec<f64> = records.iter().map(|r| (r.total_over_n2 - oracle).abs()).collect();
    assert!(dev.windows(2).skip(4).all(|w| w[1] < w[0]), "{dev:?}");
    assert!(dev.last().unwrap() / oracle.abs() < 1e-5);
}

#[test]
fn leading_order_ignores_lambda_on_the_deep_sweep() {
    let n = powers_of_two(16);
    let oracle = leading_coefficient(0.3, 0.5, &spec()).unwrap();
    for lambda in [1.0, 5.0, 25.0] {
        let fit = fit_scaling(&sweep(0.3, 0.5, lambda, &n)).unwrap();
        assert!((fit.c2 - oracle).abs() / oracle.abs() < 1e-3, "λ = {lambda}: {fit:?}");
    }
}

#[test]
fn zero_part_is_order_n() {
    let records = sweep(0.3, 0.5, 1.0, &powers_of_two(31));
    let worst = records
        .iter()
        .map(|r| r.breakdown.zero.abs() / f64::from(r.n))
        .fold(0.0, f64::max);
    assert!(worst < 400.0, "{worst}");
    // once n·b passes the profile radius the cutoff no longer removes anything
    let last = records.last().unwrap();
    assert!(last.breakdown.zero.abs() <= 1e-6 * last.breakdown.reg, "{:?}", last.breakdown);
}

#[test]
fn every_subcritical_coupling_collapses_with_a_suitable_beta() {
    let grid = [1.0, 0.5, 0.3, 0.2, 0.15, 0.1];
    for gamma in [0.0, 0.3, 0.6, 0.75] {
        let beta = find_negative_beta(gamma, &grid, &spec()).unwrap().expect("grid contains a negative β");
        let beta = beta.min(0.3);
        assert!(leading_coefficient(beta, gamma, &spec()).unwrap() < 0.0);
        let records = sweep(beta, gamma, 1.0, &powers_of_two(24));
        assert_eq!(collapse_verdict(&records), CollapseVerdict::Collapse, "γ = {gamma}, β = {beta}");
    }
}

#[test]
fn just_below_threshold_the_integral_is_small_and_negative() {
    let gamma = gamma_critical() - 1e-6;
    let beta = find_negative_beta(gamma, &[0.1, 1e-2, 1e-3, 1e-4, 1e-5], &spec()).unwrap().unwrap();
    let c = leading_coefficient(beta, gamma, &spec()).unwrap();
    assert!(c < 0.0 && c > -10.0, "β = {beta}: {c}");
    assert!(leading_coefficient(0.1, gamma, &spec()).unwrap() > 0.0);
}

#[test]
fn superthreshold_sweep_stays_positive() {
    let records = sweep(0.3, 2.0, 1.0, &powers_of_two(20));
    assert!(records.iter().all(|r| r.breakdown.total > 0.0));
    assert_eq!(collapse_verdict(&records), CollapseVerdict::NoCollapse);
    assert!(fit_scaling(&records).unwrap().c2 > 0.0);
}

#[test]
fn sweep_is_deterministic_and_ordered() {
    let n = [1, 3, 7, 20];
    let a = sweep(0.5, 0.5, 1.0, &n);
    let b = sweep(0.5, 0.5, 1.0, &n);
    assert_eq!(a, b);
    assert_eq!(a.iter().map(|r| r.n).collect::<Vec<_>>(), n);
    let params = FormParams::new(0.5, 1.0).unwrap();
    assert!(collapse_sweep(0.5, &params, &[2, 1], &spec()).is_err());
    assert!(collapse_sweep(0.5, &params, &[], &spec()).is_err());
}
