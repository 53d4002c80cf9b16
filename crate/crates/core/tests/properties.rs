use std::f64::consts::PI;

use phiform_core::charges::radial_fourier_to_position;
use phiform_core::momentum_forms::{phi_diag, phi_reg};
use phiform_core::position_forms::hardy_rellich_gap;
use phiform_core::quadrature::{integrate, try_integrate};
use phiform_core::specfun::{
    bessel_k0, bessel_k2, bessel_k2_minus_k0, macdonald_imag_order, reg_weight, symbol_s, SymbolParams,
};
use phiform_core::stability::{fit_scaling, SweepRecord};
use phiform_core::{gaussian_charge, gaussian_mixture, ChargeSpec, FormBreakdown, MixtureTerm, QuadratureSpec, ThetaProfile};
use proptest::prelude::*;

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

proptest! {
    #[test]
    fn k2_is_bounded_by_its_leading_term(x in 1e-3f64..60.0) {
        let k = bessel_k2(x).unwrap();
        prop_assert!(k > 0.0);
        prop_assert!(k <= 2.0 / (x * x) * (1.0 + 1e-14));
    }

    #[test]
    fn x2_k2_is_decreasing(x in 1e-3f64..40.0, dx in 1e-3f64..5.0) {
        let y = x + dx;
        prop_assert!(x * x * bessel_k2(x).unwrap() >= y * y * bessel_k2(y).unwrap());
    }

    #[test]
    fn k2_minus_k0_is_positive_and_consistent(x in 0.5f64..30.0) {
        let d = bessel_k2_minus_k0(x).unwrap();
        let direct = bessel_k2(x).unwrap() - bessel_k0(x).unwrap();
        prop_assert!(d > 0.0);
        prop_assert!((d - direct).abs() <= 1e-12 * bessel_k2(x).unwrap());
    }

    #[test]
    fn imaginary_order_is_even(nu in 0.0f64..20.0) {
        prop_assert_eq!(macdonald_imag_order(nu).unwrap(), macdonald_imag_order(-nu).unwrap());
    }

    #[test]
    fn symbol_is_even_and_affine_in_gamma(x in -40.0f64..40.0, g1 in 0.0f64..3.0, dg in 0.0f64..3.0) {
        let p1 = SymbolParams::new(g1).unwrap();
        let p2 = SymbolParams::new(g1 + dg).unwrap();
        let s1 = symbol_s(x, p1).unwrap();
        prop_assert!((s1 - symbol_s(-x, p1).unwrap()).abs() <= 1e-15 * (1.0 + s1.abs()));
        let diff = symbol_s(x, p2).unwrap() - s1;
        prop_assert!((diff - dg * reg_weight(x)).abs() <= 1e-13);
        prop_assert!(diff >= -1e-15);
    }

    #[test]
    fn quadrature_is_linear(a in -3.0f64..0.0, len in 0.1f64..5.0, c1 in -2.0f64..2.0, c2 in -2.0f64..2.0) {
        let b = a + len;
        let f = |x: f64| (x * x).cos();
        let g = |x: f64| (-x).exp();
        let s = spec();
        let lhs = integrate(|x| c1 * f(x) + c2 * g(x), a, b, &s).unwrap().value;
        let rhs = c1 * integrate(f, a, b, &s).unwrap().value + c2 * integrate(g, a, b, &s).unwrap().value;
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
        let rev = integrate(f, b, a, &s).unwrap().value;
        prop_assert!((rev + integrate(f, a, b, &s).unwrap().value).abs() <= 1e-12);
    }

    #[test]
    fn tighter_tolerance_does_not_move_the_value(k in 1.0f64..8.0) {
        let f = |x: f64| Ok((k * x).sin() * (-x).exp());
        let exact = k / (1.0 + k * k);
        let loose = try_integrate(f, 0.0, 60.0, &spec()).unwrap();
        let tight = try_integrate(f, 0.0, 60.0, &spec().with_tolerances(1e-14, 1e-13)).unwrap();
        prop_assert!((loose.value - exact).abs() <= 1e-8);
        prop_assert!((tight.value - exact).abs() <= (loose.value - exact).abs().max(1e-13));
    }

    #[test]
    fn sampled_theta_respects_sandwich(b in 0.5f64..3.0, mid in 0.0f64..1.0, s_mid in 0.1f64..0.9) {
        let s1 = s_mid * b;
        let lo = 1.0 - s1 / b;
        let hi = 1.0 + s1 / b;
        let t1 = lo + mid * (hi - lo);
        let end = 1.5 * b;
        let theta = ThetaProfile::sampled(b, vec![(0.0, 1.0), (s1, t1), (end, 0.0)]);
        // the final drop to zero must happen at or beyond b to keep θ ≥ 1 − s/b
        prop_assert!(theta.is_ok());
        let theta = theta.unwrap();
        for k in 0..=100 {
            let s = end * k as f64 / 100.0;
            let v = theta.eval(s);
            prop_assert!(v >= 1.0 - s / b - 1e-12 && v <= 1.0 + s / b + 1e-12, "s = {s}, θ = {v}");
        }
    }

    #[test]
    fn charge_specs_round_trip(v in 1e-3f64..1e3, fam in 0..2) {
        let spec = if fam == 0 { ChargeSpec::Gaussian(v) } else { ChargeSpec::FBeta(v) };
        prop_assert_eq!(spec.to_string().parse::<ChargeSpec>().unwrap(), spec);
    }

    #[test]
    fn exact_scaling_model_is_recovered(c2 in -1e3f64..1e3, c1 in -1e3f64..1e3, len in 4usize..40) {
        let records: Vec<SweepRecord> = (1..=len as u32)
            .map(|n| {
                let nf = f64::from(n);
                let total = c2 * nf * nf + c1 * nf;
                SweepRecord {
                    n,
                    beta: 1.0,
                    gamma: 0.0,
                    lambda: 0.0,
                    breakdown: FormBreakdown { total, ..FormBreakdown::ZERO },
                    total_over_n2: total / (nf * nf),
                }
            })
            .collect();
        let fit = fit_scaling(&records).unwrap();
        prop_assert!((fit.c2 - c2).abs() <= 1e-9 * (1.0 + c2.abs() + c1.abs()));
        prop_assert!((fit.c1 - c1).abs() <= 1e-7 * (1.0 + c2.abs() + c1.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gaussian_forms_follow_dilation_law(s in 0.4f64..2.5, gamma in 0.1f64..3.0) {
        let f = gaussian_charge(s).unwrap();
        let sp = spec();
        let diag = phi_diag(&f, 0.0, &sp).unwrap().value;
        let reg = phi_reg(&f, gamma, &sp).unwrap().value;
        let s4 = s.powi(4);
        prop_assert!((diag * s4 / (12.0 * 3f64.sqrt() * PI * PI) - 1.0).abs() <= 1e-7);
        prop_assert!((reg * s4 / (24.0 * PI * PI * gamma) - 1.0).abs() <= 1e-7);
    }

    #[test]
    fn mixture_position_matches_numerical_transform(
        w1 in 0.2f64..2.0, s1 in 0.5f64..2.0, w2 in 0.2f64..2.0, s2 in 0.5f64..2.0, y in 0.05f64..4.0,
    ) {
        let f = gaussian_mixture(&[MixtureTerm { weight: w1, scale: s1 }, MixtureTerm { weight: w2, scale: s2 }]).unwrap();
        let closed = f.position(y).unwrap();
        let numeric = radial_fourier_to_position(&f, y, &spec()).unwrap();
        prop_assert!((closed - numeric).abs() <= 1e-8 * (1.0 + closed.abs()), "{closed} vs {numeric}");
    }

    #[test]
    fn hardy_rellich_gap_is_nonnegative(w1 in 0.2f64..2.0, s1 in 0.3f64..3.0, w2 in 0.0f64..2.0, s2 in 0.3f64..3.0) {
        let f = gaussian_mixture(&[MixtureTerm { weight: w1, scale: s1 }, MixtureTerm { weight: w2, scale: s2 }]).unwrap();
        let hr = hardy_rellich_gap(&f, &spec()).unwrap();
        prop_assert!(hr.gap >= 0.0, "{hr:?}");
    }
}
