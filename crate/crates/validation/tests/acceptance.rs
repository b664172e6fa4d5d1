//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::time::Instant;

use dfa_core::detrend::{
    build_weight_matrix, profile, residual_variance_direct, residual_variance_increment,
    residual_variance_quadratic,
};
use dfa_core::estimators::{
    default_scales, dfa, f_hat, f_tilde, gap_weights, Estimator, GappedSeries, WindowPolicy,
};
use dfa_core::expectation::{
    asymptotic_lambda, expected_f2, expected_f2_from_acvf, expected_f2_general_with,
};
use dfa_core::generators::{add_polynomial_trend, block_gap_mask, rng_for, BlockMaskSpec};
use dfa_core::mc::{run_ensemble, EnsembleConfig, EnsembleResult, MASK_STREAM};
use dfa_core::models::{
    fbm_covariance, fbm_variogram, fgn_acvf, fgn_acvf_asymptotic, AcvfModel, CorrelationModel,
    VariogramModel,
};
use dfa_core::numeric::fit_line;
use dfa_core::weights::{
    asymptotic_coefficients, closed_form_g_exact, closed_form_table, weight_function,
};
use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

struct Outcome {
    pass: bool,
    detail: String,
    notes: Vec<String>,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome {
        pass,
        detail,
        notes: Vec::new(),
    }
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn table_of_coefficients() -> Vec<Vec<BigRational>> {
    vec![
        vec![q(1, 15), q(-1, 2), q(1, 1), q(-2, 3), q(0, 1), q(1, 10)],
        vec![
            q(3, 70),
            q(-1, 2),
            q(3, 2),
            q(-3, 2),
            q(0, 1),
            q(3, 5),
            q(0, 1),
            q(-1, 7),
        ],
        vec![
            q(2, 63),
            q(-1, 2),
            q(2, 1),
            q(-8, 3),
            q(0, 1),
            q(2, 1),
            q(0, 1),
            q(-8, 7),
            q(0, 1),
            q(5, 18),
        ],
        vec![
            q(5, 198),
            q(-1, 2),
            q(5, 2),
            q(-25, 6),
            q(0, 1),
            q(5, 1),
            q(0, 1),
            q(-5, 1),
            q(0, 1),
            q(25, 9),
            q(0, 1),
            q(-7, 11),
        ],
        vec![
            q(3, 143),
            q(-1, 2),
            q(3, 1),
            q(-6, 1),
            q(0, 1),
            q(21, 2),
            q(0, 1),
            q(-16, 1),
            q(0, 1),
            q(15, 1),
            q(0, 1),
            q(-84, 11),
            q(0, 1),
            q(21, 13),
        ],
        vec![
            q(7, 390),
            q(-1, 2),
            q(7, 2),
            q(-49, 6),
            q(0, 1),
            q(98, 5),
            q(0, 1),
            q(-42, 1),
            q(0, 1),
            q(175, 3),
            q(0, 1),
            q(-49, 1),
            q(0, 1),
            q(294, 13),
            q(0, 1),
            q(-22, 5),
        ],
    ]
}

fn criterion_1() -> Outcome {
    let want = table_of_coefficients();
    let mut mismatches = Vec::new();
    for (m, row) in (1..=6).zip(&want) {
        match asymptotic_coefficients(m) {
            Ok(c) if &c.d == row => {}
            Ok(c) => mismatches.push(format!("m={m}: {:?}", c.d)),
            Err(e) => mismatches.push(format!("m={m}: {e}")),
        }
    }
    let pass = mismatches.is_empty();
    let mut o = outcome(
        pass,
        "d_q for m = 1..6 equal the tabulated fractions (exact)".into(),
    );
    o.notes = mismatches;
    o
}

/// Tabulated DFA1/DFA2 weight function as an exact fraction `(num, den)`.
fn tabulated_g(m: usize, j: usize, s: usize) -> (i128, i128) {
    let (j, s) = (j as i128, s as i128);
    let cubic = (j - s - 1) * (j - s) * (j - s + 1);
    if m == 1 {
        (
            cubic * (3 * j * j + 9 * j * s - 2 * s * s + 8),
            30 * s * (s * s - 1),
        )
    } else {
        let poly = 10 * j.pow(4)
            + 30 * j.pow(3) * s
            + 2 * j * j * (9 * s * s + 19)
            + 2 * j * s * (67 - 13 * s * s)
            + 3 * (s.pow(4) - 13 * s * s + 36);
        (-cubic * poly, 70 * s * (s.pow(4) - 5 * s * s + 4))
    }
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    for m in 1..=2 {
        for s in m + 2..=512 {
            let g = weight_function(m, s).unwrap();
            let exact: Vec<f64> = (0..s)
                .map(|j| {
                    let (n, d) = tabulated_g(m, j, s);
                    n as f64 / d as f64
                })
                .collect();
            let norm = exact.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            for (a, b) in g.values().iter().zip(&exact) {
                worst = worst.max((a - b).abs() / norm);
            }
        }
    }
    let (n, d) = tabulated_g(1, 0, 10);
    let spot_exact = n * 5 == 32 * d;
    let rational = closed_form_g_exact(1, 0, 10).unwrap() == q(32, 5);
    let spot = weight_function(1, 10).unwrap().get(0);
    let pass = worst < 1e-9 && spot_exact && rational && (spot - 6.4).abs() <= 1e-9 * 6.4;
    outcome(
        pass,
        format!(
            "max |G − G_table| / max|G_table| = {worst:.2e} (< 1e-9) over m∈{{1,2}}, s ≤ 512; G(0,10) = 32/5 exactly, {spot} from the matrix"
        ),
    )
}

fn oracle_f2(x: &[f64], m: usize) -> f64 {
    let s = x.len();
    let y = DVector::from_vec(profile(x));
    let mid = (s as f64 + 1.0) / 2.0;
    let half = (s as f64 - 1.0) / 2.0;
    let b = DMatrix::from_fn(s, m + 1, |i, k| {
        (((i + 1) as f64 - mid) / half).powi(k as i32)
    });
    let coef = b.clone().svd(true, true).solve(&y, 1e-14).unwrap();
    (y - b * coef).norm_squared() / s as f64
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let m = rng.random_range(1..=6);
        let s = rng.random_range(m + 2..=200);
        let x: Vec<f64> = (0..s).map(|_| rng.sample(StandardNormal)).collect();
        let a = build_weight_matrix(m, s).unwrap();
        let want = oracle_f2(&x, m);
        for got in [
            residual_variance_direct(&profile(&x), m).unwrap(),
            residual_variance_quadratic(&x, &a).unwrap(),
            residual_variance_increment(&x, &a).unwrap(),
        ] {
            worst = worst.max((got - want).abs() / want);
        }
    }
    let x = [0.0, 1.0, 0.0];
    let a = build_weight_matrix(1, 3).unwrap();
    let hand = [
        residual_variance_direct(&profile(&x), 1).unwrap(),
        residual_variance_quadratic(&x, &a).unwrap(),
        residual_variance_increment(&x, &a).unwrap(),
    ];
    let hand_ok = hand
        .iter()
        .all(|v| (v - 1.0 / 18.0).abs() <= 8.0 * f64::EPSILON / 18.0);
    outcome(
        worst < 1e-9 && hand_ok,
        format!(
            "three forms vs independent fit on 1000 windows: max rel {worst:.2e} (< 1e-9); X=(0,1,0) → {:?} (1/18)",
            hand
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 4000;
    let mut worst = 0.0f64;
    for m in 1..=4 {
        let scales: Vec<usize> = [m + 2, 10, 37, 100, 400, 1000]
            .into_iter()
            .filter(|&s| s >= m + 2)
            .collect();
        let x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let base = dfa(&x, m, &scales).unwrap();
        for order in 0..m {
            // coefficients sized so that the trend is O(1) across the series
            let coeffs: Vec<f64> = (0..=order)
                .map(|k| rng.random_range(-5.0..5.0) / (n as f64).powi(k as i32))
                .collect();
            let mut y = x.clone();
            add_polynomial_trend(&mut y, &coeffs);
            let with = dfa(&y, m, &scales).unwrap();
            for (a, b) in base.points.iter().zip(&with.points) {
                let (fa, fb) = (a.f().unwrap(), b.f().unwrap());
                worst = worst.max((fa - fb).abs() / fa);
            }
        }
    }
    outcome(
        worst < 1e-8,
        format!("order q ≤ m−1 trends, m = 1..4: max relative change of F {worst:.2e} (< 1e-8)"),
    )
}

fn model_for(h: f64) -> CorrelationModel {
    if h < 1.0 {
        CorrelationModel::fgn(h)
    } else {
        CorrelationModel::fbm(h)
    }
}

fn log_slope(scales: &[usize], values: &[f64]) -> f64 {
    let x: Vec<f64> = scales.iter().map(|&s| (s as f64).ln()).collect();
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    fit_line(&x, &y).unwrap().slope
}

fn criterion_5() -> Outcome {
    let scales: Vec<usize> = (8..=12).map(|k| 1usize << k).collect();
    let mut pass = true;
    let mut notes = Vec::new();
    let (mut worst_slope, mut worst_ratio) = (0.0f64, 0.0f64);
    for h in [0.2, 0.7, 1.1, 1.5] {
        for m in 1..=3 {
            let model = model_for(h);
            let ef2: Vec<f64> = scales
                .iter()
                .map(|&s| expected_f2(&model, m, s).unwrap())
                .collect();
            let slope = log_slope(&scales, &ef2);
            let lambda = asymptotic_lambda(m, h).unwrap();
            let ratio = ef2[4] / lambda.power_law(4096);
            worst_slope = worst_slope.max((slope - 2.0 * h).abs());
            worst_ratio = worst_ratio.max((ratio - 1.0).abs());
            if (slope - 2.0 * h).abs() >= 0.02 || !(0.98..=1.02).contains(&ratio) {
                pass = false;
                notes.push(format!("H={h} m={m}: slope {slope:.4}, ratio {ratio:.4}"));
            }
        }
    }
    let white = CorrelationModel::Stationary(AcvfModel::WhiteNoise { variance: 1.0 });
    let mut worst_white = 0.0f64;
    for s in 3..=1024 {
        let sf = s as f64;
        let want = (sf * sf - 4.0) / (15.0 * sf);
        let got = expected_f2(&white, 1, s).unwrap();
        worst_white = worst_white.max((got - want).abs() / want);
    }
    pass &= worst_white < 1e-12;
    let mut o = outcome(
        pass,
        format!(
            "slopes over [2^8, 2^12]: max |slope − 2H| {worst_slope:.4} (< 0.02); max |E F²(4096)/λs^2H − 1| {worst_ratio:.4} (≤ 0.02); white noise max rel {worst_white:.1e}"
        ),
    );
    o.notes = notes;
    o
}

fn criterion_6() -> Outcome {
    let h = 0.3;
    let scales: Vec<usize> = (8..=12).map(|k| 1usize << k).collect();
    let asym = AcvfModel::Table(
        std::iter::once(1.0)
            .chain((1..4096).map(|k| fgn_acvf_asymptotic(h, 1.0, k).unwrap()))
            .collect(),
    );
    let asym = CorrelationModel::Stationary(asym);
    let exact = CorrelationModel::fgn(h);
    let e_asym: Vec<f64> = scales
        .iter()
        .map(|&s| expected_f2(&asym, 1, s).unwrap())
        .collect();
    let e_exact: Vec<f64> = scales
        .iter()
        .map(|&s| expected_f2(&exact, 1, s).unwrap())
        .collect();
    let slope_asym = log_slope(&scales, &e_asym);
    let slope_exact = log_slope(&scales, &e_exact);
    let pass = (slope_asym - 1.0).abs() <= 0.05 && (slope_exact - 0.6).abs() <= 0.02;

    // the same fit much further out, with the closed-form DFA1 weights
    let far: Vec<usize> = (14..=18).map(|k| 1usize << k).collect();
    let acvf: Vec<f64> = std::iter::once(1.0)
        .chain((1..*far.last().unwrap()).map(|k| fgn_acvf_asymptotic(h, 1.0, k).unwrap()))
        .collect();
    let e_far: Vec<f64> = far
        .iter()
        .map(|&s| expected_f2_from_acvf(&closed_form_table(1, s).unwrap(), &acvf[..s]).unwrap())
        .collect();
    let mut o = outcome(
        pass,
        format!(
            "H=0.3, DFA1, s ∈ [2^8, 2^12]: power-law acvf exponent {slope_asym:.4} (1 ± 0.05); exact acvf exponent {slope_exact:.4} (0.6 ± 0.02)"
        ),
    );
    o.notes.push(format!(
        "power-law acvf exponent over [2^14, 2^18]: {:.4}",
        log_slope(&far, &e_far)
    ));
    o
}

fn criterion_7() -> Outcome {
    let m = 1;
    let k2 = |h: f64, s: usize| {
        let lambda = asymptotic_lambda(m, h).unwrap();
        expected_f2(&model_for(h), m, s).unwrap() / lambda.power_law(s)
    };
    let mut opposite = true;
    let mut first_bad = None;
    for s in m + 2..=50 {
        let (a, b) = (k2(0.9, s) - 1.0, k2(1.1, s) - 1.0);
        if a * b >= 0.0 {
            opposite = false;
            first_bad.get_or_insert(s);
        }
    }
    let white = CorrelationModel::Stationary(AcvfModel::WhiteNoise { variance: 1.0 });
    let lambda_half = asymptotic_lambda(m, 0.5).unwrap();
    let lambda = asymptotic_lambda(m, 1.1).unwrap();
    let (mut raw, mut corrected) = (0.0f64, 0.0f64);
    for s in 16..=256 {
        let ef2 = expected_f2(&model_for(1.1), m, s).unwrap();
        let k2_half = expected_f2(&white, m, s).unwrap() / lambda_half.power_law(s);
        raw = raw.max((ef2 / lambda.power_law(s) - 1.0).abs());
        corrected = corrected.max((ef2 / k2_half / lambda.power_law(s) - 1.0).abs());
    }
    let pass = opposite && corrected > raw;
    let mut o = outcome(
        pass,
        format!(
            "K²−1 signs opposite for H=0.9 vs 1.1 at all s ≤ 50: {opposite}; max rel deviation on [16,256]: raw {raw:.4}, with H=0.5 correction {corrected:.4}"
        ),
    );
    if let Some(s) = first_bad {
        o.notes.push(format!("first scale with equal signs: {s}"));
    }
    o
}

fn criterion_8() -> Outcome {
    let tau = 20.0;
    let m = 1;
    let ou = CorrelationModel::Stationary(AcvfModel::Ou { tau, variance: 1.0 });
    // the random walk with the same one-step variogram S(1) = 2γ(0)(1 − ρ(1))
    let s1 = 2.0 * (1.0 - (-1.0f64 / tau).exp());
    let walk = CorrelationModel::Increments(VariogramModel::Fbm {
        hurst: 1.5,
        variance: s1,
    });
    let small: Vec<usize> = (m + 2..=8).collect();
    let ratios: Vec<f64> = small
        .iter()
        .map(|&s| expected_f2(&ou, m, s).unwrap() / expected_f2(&walk, m, s).unwrap())
        .collect();
    let worst_small = ratios.iter().fold(0.0f64, |a, r| a.max((r - 1.0).abs()));

    let large = [1000usize, 2000, 4000, 8000];
    let f: Vec<f64> = large
        .iter()
        .map(|&s| expected_f2(&ou, m, s).unwrap().sqrt())
        .collect();
    let slopes: Vec<f64> = large
        .windows(2)
        .zip(f.windows(2))
        .map(|(s, f)| (f[1] / f[0]).ln() / (s[1] as f64 / s[0] as f64).ln())
        .collect();
    let worst_slope = slopes.iter().fold(0.0f64, |a, v| a.max((v - 0.5).abs()));
    let pass = worst_small < 0.05 && worst_slope <= 0.05;

    // best single amplitude for the walk on s ≤ 8, for comparison
    let log_mean = ratios.iter().map(|r| r.ln()).sum::<f64>() / ratios.len() as f64;
    let fitted = ratios
        .iter()
        .fold(0.0f64, |a, r| a.max((r / log_mean.exp() - 1.0).abs()));
    let mut o = outcome(
        pass,
        format!(
            "OU τ=20 vs random walk matched at S(1): max rel deviation for s ≤ 8 {worst_small:.4} (< 0.05); local slopes of F for s ≥ 1000 {:?} (0.5 ± 0.05)",
            slopes.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>()
        ),
    );
    o.notes.push(format!(
        "with a fitted walk amplitude instead: max rel deviation for s ≤ 8 {fitted:.4}"
    ));
    o
}

fn ensemble(model: CorrelationModel, mask: &[bool]) -> EnsembleResult {
    let n = 1368;
    let cfg = EnsembleConfig {
        model,
        n,
        order: 2,
        scales: default_scales(n, 2),
        ensemble: 500,
        seed: 1368,
        mask: Some(mask.to_vec()),
        estimators: vec![Estimator::FHat, Estimator::FTilde],
        fit_range: None,
        policy: WindowPolicy::AllWindows,
    };
    run_ensemble(&cfg).unwrap()
}

/// `|mean_e − mean_standard| / sqrt(se_e² + se_standard²)` per scale.
fn z_scores(res: &EnsembleResult, e: Estimator) -> Vec<f64> {
    let full = res.summary(Estimator::Standard).unwrap();
    let gap = res.summary(e).unwrap();
    (0..res.scales.len())
        .map(|i| {
            let se = (full.se_f2[i].powi(2) + gap.se_f2[i].powi(2)).sqrt();
            (gap.mean_f2[i] - full.mean_f2[i]).abs() / se
        })
        .collect()
}

fn worst_z(res: &EnsembleResult, e: Estimator) -> (f64, usize) {
    z_scores(res, e)
        .into_iter()
        .zip(&res.scales)
        .fold((0.0, 0), |w, (z, &s)| if z > w.0 { (z, s) } else { w })
}

/// Pairs never jointly observed at scale `s`, and the exact relative bias of
/// E F̂² they cause: those pairs drop out of the reweighted sum, the rest
/// reproduce E F² term by term.
fn uncovered_bias(mask: &[bool], s: usize, variogram: impl Fn(usize) -> f64) -> (usize, f64) {
    let w = gap_weights(mask, s, WindowPolicy::AllWindows).unwrap();
    let a = build_weight_matrix(2, s).unwrap();
    let (mut all, mut kept, mut uncovered) = (0.0, 0.0, 0);
    for k in 0..s {
        for j in 0..s {
            let term = -a.get(k, j) * variogram(k.abs_diff(j)) / (2.0 * s as f64);
            all += term;
            if w.count(k, j) > 0 {
                kept += term;
            } else {
                uncovered += 1;
            }
        }
    }
    (uncovered, kept / all - 1.0)
}

fn criterion_9() -> Outcome {
    let n = 1368;
    let spec = BlockMaskSpec {
        gap_fraction: 0.2,
        mean_block_length: 12.0,
    };
    let mask = block_gap_mask(n, &spec, &mut rng_for(1368, MASK_STREAM)).unwrap();
    let missing = mask.iter().filter(|&&d| !d).count() as f64 / n as f64;
    let fgn = ensemble(CorrelationModel::fgn(0.7), &mask);
    let fbm = ensemble(CorrelationModel::fbm(1.1), &mask);
    let (z_hat_fgn, _) = worst_z(&fgn, Estimator::FHat);
    let (z_hat_fbm, _) = worst_z(&fbm, Estimator::FHat);
    let (z_tilde_fgn, _) = worst_z(&fgn, Estimator::FTilde);
    let (z_tilde_fbm, s_tilde_fbm) = worst_z(&fbm, Estimator::FTilde);
    let pass = z_hat_fgn <= 3.0 && z_hat_fbm <= 3.0 && z_tilde_fgn <= 3.0 && z_tilde_fbm > 3.0;
    let mut o = outcome(
        pass,
        format!(
            "500 replicates, n=1368, DFA2, {:.1}% block gaps, {} scales: max |Δmean|/SE for F̂: fGn {z_hat_fgn:.2}, fBm {z_hat_fbm:.2} (≤ 3); F̃: fGn {z_tilde_fgn:.2} (≤ 3), fBm {z_tilde_fbm:.2} (> 3 expected)",
            100.0 * missing,
            fgn.scales.len()
        ),
    );
    o.notes
        .push(format!("F̃ on fBm departs most at s = {s_tilde_fbm}"));
    let fgn_s = |l: usize| 2.0 * (1.0 - fgn_acvf(0.7, 1.0, l).unwrap());
    let fbm_s = |l: usize| fbm_variogram(1.1, 1.0, l).unwrap();
    for (name, res) in [("fGn", &fgn), ("fBm", &fbm)] {
        let z = z_scores(res, Estimator::FHat);
        let mut covered_worst = 0.0f64;
        for (i, &s) in res.scales.iter().enumerate() {
            let (uncovered, bias) = if name == "fGn" {
                uncovered_bias(&mask, s, fgn_s)
            } else {
                uncovered_bias(&mask, s, fbm_s)
            };
            if uncovered == 0 {
                covered_worst = covered_worst.max(z[i]);
            }
            if z[i] > 3.0 || uncovered > 0 {
                o.notes.push(format!(
                    "F̂ {name} s = {s}: z = {:.2}, {uncovered} of {} pairs never observed together, exact relative bias of E F̂² {bias:+.4}",
                    z[i],
                    s * s
                ));
            }
        }
        o.notes.push(format!(
            "F̂ {name}: max z over scales with every pair observed = {covered_worst:.2}"
        ));
    }
    for (name, res) in [("fGn", &fgn), ("fBm", &fbm)] {
        let hat = res.summary(Estimator::FHat).unwrap();
        let std = res.summary(Estimator::Standard).unwrap();
        let width = |s: &dfa_core::mc::EstimatorSummary, i: usize| s.q95_f[i] - s.q05_f[i];
        let mid = res.scales.len() / 2;
        o.notes.push(format!(
            "{name}: 90% band of F at s = {}: gap-free {:.3}, F̂ {:.3}",
            res.scales[mid],
            width(std, mid),
            width(hat, mid)
        ));
    }
    o
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut mismatches = 0;
    let mut compared = 0;
    for _ in 0..100 {
        let n = rng.random_range(50..2000);
        let m = rng.random_range(1..=4);
        let scale_x = 10f64.powf(rng.random_range(-3.0..3.0));
        let x: Vec<f64> = (0..n)
            .map(|_| scale_x * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let scales = default_scales(n, m);
        let want = dfa(&x, m, &scales).unwrap();
        let gs = GappedSeries::complete(x).unwrap();
        let hat = f_hat(&gs, m, &scales).unwrap();
        let tilde = f_tilde(&gs, m, &scales).unwrap();
        for ((w, h), t) in want.points.iter().zip(&hat.points).zip(&tilde.points) {
            compared += 1;
            if w.f2.to_bits() != h.f2.to_bits() || w.f2.to_bits() != t.f2.to_bits() {
                mismatches += 1;
            }
        }
    }
    outcome(
        mismatches == 0,
        format!("100 gap-free inputs, {compared} scale points: {mismatches} not bitwise equal"),
    )
}

fn criterion_11() -> Outcome {
    let mut worst = 0.0f64;
    for (m, s, h) in [(1, 32, 1.1), (2, 64, 1.1), (3, 50, 1.5), (2, 128, 1.9)] {
        let a = build_weight_matrix(m, s).unwrap();
        let kernel = |t: usize, u: usize| fbm_covariance(h - 1.0, 1.0, t, u);
        let values: Vec<f64> = [0, 100, 1000]
            .iter()
            .map(|&t| expected_f2_general_with(&a, kernel, t).unwrap())
            .collect();
        for v in &values[1..] {
            worst = worst.max((v - values[0]).abs() / values[0]);
        }
    }
    outcome(
        worst < 1e-9,
        format!("fBm kernel at offsets 0, 100, 1000: max relative spread {worst:.2e} (< 1e-9)"),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("exact asymptotic coefficients", criterion_1),
        ("closed-form weight function", criterion_2),
        ("residual-variance form equivalence", criterion_3),
        ("trend invariance", criterion_4),
        ("scaling law", criterion_5),
        ("anti-persistent power-law acvf", criterion_6),
        ("modified DFA for H > 1", criterion_7),
        ("Ornstein-Uhlenbeck behaviour", criterion_8),
        ("missing-data unbiasedness", criterion_9),
        ("gap-free collapse", criterion_10),
        ("window independence", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "{verdict} {:>2} {name}: {} [{:.1}s]",
            i + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
        for note in &o.notes {
            println!("        {note}");
        }
        if !o.pass {
            failed += 1;
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
