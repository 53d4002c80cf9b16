//! Globally adaptive 21-point Gauss–Kronrod quadrature.
//!
//! The local rule and its error heuristic follow QUADPACK's `qk21`; the
//! driver keeps every panel and always bisects the one with the largest
//! error estimate (ties broken by position), so the summation order is a pure
//! function of the integrand.

use crate::error::{Error, Result};

use super::QuadResult;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_931_987_785,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    splittable: bool,
}

fn eval<F>(f: &F, x: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let v = f(x)?;
    if !v.is_finite() {
        return Err(Error::NonFiniteIntegrand { at: x, value: v });
    }
    Ok(v)
}

/// One application of the 21-point rule on `[a, b]`.
fn qk21<F>(f: &F, a: f64, b: f64) -> Result<Panel>
where
    F: Fn(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = eval(f, center)?;
    let mut resk = fc * WGK[10];
    let mut resg = 0.0;
    let mut resabs = fc.abs() * WGK[10];
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    for j in 0..5 {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let f1 = eval(f, center - dx)?;
        let f2 = eval(f, center + dx)?;
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        resg += WG[j] * (f1 + f2);
        resk += WGK[jtw] * (f1 + f2);
        resabs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let f1 = eval(f, center - dx)?;
        let f2 = eval(f, center + dx)?;
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        resk += WGK[jtwm1] * (f1 + f2);
        resabs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }

    // A panel narrower than a few ulps of its endpoints cannot be bisected.
    let width_floor = 100.0 * f64::EPSILON * (a.abs().max(b.abs()).max(f64::MIN_POSITIVE));
    let splittable = (b - a).abs() > width_floor;

    Ok(Panel {
        a,
        b,
        value,
        error,
        splittable,
    })
}

pub(super) const EVALS_PER_PANEL: usize = 21;

/// Adaptive integration of `f` over `[a, b]`.
pub(super) fn integrate<F>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Result<QuadResult>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut panels = vec![qk21(f, a, b)?];
    let mut evaluations = EVALS_PER_PANEL;

    loop {
        // Sum in panel order (left to right) for a reproducible result.
        let (value, error) = totals(&panels);
        let tol = abs_tol.max(rel_tol * value.abs());
        if error <= tol {
            return Ok(QuadResult {
                value,
                err_estimate: error,
                evaluations,
            });
        }

        let worst = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| p.splittable)
            .max_by(|(i, p), (j, q)| p.error.total_cmp(&q.error).then(j.cmp(i)))
            .map(|(i, _)| i);

        let Some(idx) = worst.filter(|_| panels.len() < max_subdivisions) else {
            return Err(Error::Convergence {
                best: QuadResult {
                    value,
                    err_estimate: error,
                    evaluations,
                },
                subdivisions: panels.len(),
            });
        };

        let p = panels[idx];
        let mid = 0.5 * (p.a + p.b);
        let left = qk21(f, p.a, mid)?;
        let right = qk21(f, mid, p.b)?;
        evaluations += 2 * EVALS_PER_PANEL;
        panels[idx] = left;
        panels.insert(idx + 1, right);
    }
}

fn totals(panels: &[Panel]) -> (f64, f64) {
    panels
        .iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
}
