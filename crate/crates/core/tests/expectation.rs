use dfa_core::detrend::build_weight_matrix;
use dfa_core::estimators::{Estimator, GapPlan, WindowPolicy};
use dfa_core::expectation::{
    asymptotic_lambda, expected_f2, expected_f2_from_acvf, expected_f2_general_with,
    expected_f2_increments, expected_f2_stationary,
};
use dfa_core::generators::{block_gap_mask, rng_for, BlockMaskSpec};
use dfa_core::mc::MASK_STREAM;
use dfa_core::models::{
    fbm_covariance, fbm_variogram, fgn_acvf, fgn_acvf_asymptotic, AcvfModel, CorrelationModel,
    VariogramModel,
};
use dfa_core::numeric::compensated_sum;
use dfa_core::weights::{weight_function, WeightFunctionTable};
use nalgebra::DMatrix;

fn model_for(h: f64) -> CorrelationModel {
    if h < 1.0 {
        CorrelationModel::fgn(h)
    } else {
        CorrelationModel::fbm(h)
    }
}

const HURSTS: [f64; 7] = [0.2, 0.3, 0.7, 0.9, 1.1, 1.5, 1.8];

#[test]
fn local_exponent_at_2048() {
    for h in HURSTS {
        for m in 1..=3 {
            let model = model_for(h);
            let a = expected_f2(&model, m, 2048).unwrap();
            let b = expected_f2(&model, m, 4096).unwrap();
            let slope = (b / a).log2();
            assert!((slope - 2.0 * h).abs() < 0.02, "H={h} m={m}: {slope}");
        }
    }
}

#[test]
fn normalized_expectation_near_one_at_4096() {
    for h in HURSTS {
        for m in 1..=3 {
            let lambda = asymptotic_lambda(m, h).unwrap();
            let ratio = expected_f2(&model_for(h), m, 4096).unwrap() / lambda.power_law(4096);
            assert!((0.98..=1.02).contains(&ratio), "H={h} m={m}: {ratio}");
        }
    }
}

#[test]
fn acvf_and_variogram_engines_agree_for_fgn() {
    // fGn seen as an increment process through its variogram
    for m in 1..=3 {
        for s in [m + 2, 17, 64, 256] {
            let acvf = AcvfModel::Fgn {
                hurst: 0.7,
                variance: 1.0,
            };
            let a = expected_f2_stationary(&acvf, m, s).unwrap();
            let vario = VariogramModel::from_stationary(&acvf, s).unwrap();
            let b = expected_f2_increments(&vario, m, s).unwrap();
            assert!((a - b).abs() < 1e-9 * a.abs(), "m={m} s={s}: {a} vs {b}");
        }
    }
}

#[test]
fn general_kernel_agrees_and_ignores_offset() {
    let m = 2;
    let s = 48;
    let a = build_weight_matrix(m, s).unwrap();
    let fgn = |t: usize, u: usize| fgn_acvf(0.3, 1.0, t.abs_diff(u));
    let want = expected_f2_stationary(
        &AcvfModel::Fgn {
            hurst: 0.3,
            variance: 1.0,
        },
        m,
        s,
    )
    .unwrap();
    for offset in [0, 10, 500] {
        let got = expected_f2_general_with(&a, fgn, offset).unwrap();
        assert!((got - want).abs() < 1e-9 * want);
    }
    // the covariance takes the increment exponent H − 1
    let fbm = |t: usize, u: usize| fbm_covariance(1.4 - 1.0, 1.0, t, u);
    let base = expected_f2_general_with(&a, fbm, 0).unwrap();
    let incr = expected_f2(&CorrelationModel::fbm(1.4), m, s).unwrap();
    assert!((base - incr).abs() < 1e-9 * incr);
    for offset in [100, 1000] {
        let got = expected_f2_general_with(&a, fbm, offset).unwrap();
        assert!((got - base).abs() < 1e-9 * base, "offset {offset}");
    }
}

#[test]
fn anti_persistent_zero_sum_of_correlations() {
    // Σ_{|τ|≤L} ρ(τ) for H < 1/2 vanishes like L^{2H−1}
    let h = 0.3;
    let l = 1_000_000usize;
    let total = fgn_acvf(h, 1.0, 0).unwrap()
        + 2.0 * compensated_sum((1..=l).map(|k| fgn_acvf(h, 1.0, k).unwrap()));
    let tail = fgn_acvf(h, 1.0, l).unwrap().abs();
    assert!(total.abs() < 10.0 * tail * l as f64, "{total:e}");
}

#[test]
fn persistent_correlations_are_not_summable() {
    let h = 0.9;
    let l = 1_000_000usize;
    let total = fgn_acvf(h, 1.0, 0).unwrap()
        + 2.0 * compensated_sum((1..=l).map(|k| fgn_acvf(h, 1.0, k).unwrap()));
    assert!(total > 1e3);
}

#[test]
fn fbm_covariance_and_variogram_are_consistent() {
    for h in [1.1, 1.5, 1.9] {
        for (t, u) in [(0, 0), (1, 5), (7, 3), (100, 1000), (4096, 17)] {
            let c = fbm_covariance(h - 1.0, 1.0, t, u).unwrap();
            let vt = fbm_covariance(h - 1.0, 1.0, t, t).unwrap();
            let vu = fbm_covariance(h - 1.0, 1.0, u, u).unwrap();
            let s = fbm_variogram(h, 1.0, t.abs_diff(u)).unwrap();
            assert!((2.0 * c - (vt + vu - s)).abs() <= 1e-12 * (vt + vu).max(1.0));
        }
        let mut prev = 0.0;
        for lag in 0..200 {
            let s = fbm_variogram(h, 1.0, lag).unwrap();
            assert!(s >= prev);
            prev = s;
        }
    }
}

/// DFA1 weights from the closed-form polynomial, in floating point.
fn dfa1_weights(s: usize) -> Vec<f64> {
    let sf = s as f64;
    (0..s)
        .map(|j| {
            let d = j as f64 - sf;
            let cubic = (d - 1.0) * d * (d + 1.0);
            let jf = j as f64;
            cubic * (3.0 * jf * jf + 9.0 * jf * sf - 2.0 * sf * sf + 8.0)
                / (30.0 * sf * (sf * sf - 1.0))
        })
        .collect()
}

#[test]
fn closed_form_weights_match_matrix_weights() {
    for s in [3, 10, 100, 512] {
        let g = weight_function(1, s).unwrap();
        for (a, b) in g.values().iter().zip(dfa1_weights(s)) {
            assert!((a - b).abs() <= 1e-9 * g.values()[0]);
        }
    }
}

#[test]
fn asymptotic_acvf_exponent_creeps_towards_one() {
    // With the power-law acvf at H = 0.3 the correlations no longer sum to
    // zero, so E F² grows like s for large s; the approach is slow.
    let h = 0.3;
    let scales: Vec<usize> = (14..=18).map(|k| 1usize << k).collect();
    let smax = *scales.last().unwrap();
    let acvf: Vec<f64> = (0..smax)
        .map(|k| {
            if k == 0 {
                1.0
            } else {
                fgn_acvf_asymptotic(h, 1.0, k).unwrap()
            }
        })
        .collect();
    let ef2: Vec<f64> = scales
        .iter()
        .map(|&s| {
            let table = WeightFunctionTable::new(1, s, dfa1_weights(s)).unwrap();
            expected_f2_from_acvf(&table, &acvf[..s]).unwrap()
        })
        .collect();
    let lx: Vec<f64> = scales.iter().map(|&s| (s as f64).ln()).collect();
    let ly: Vec<f64> = ef2.iter().map(|v| v.ln()).collect();
    let fit = dfa_core::numeric::fit_line(&lx, &ly).unwrap();
    assert!(fit.slope > 0.95 && fit.slope < 1.05, "slope {}", fit.slope);
}

#[test]
fn white_noise_closed_form() {
    let white = CorrelationModel::Stationary(AcvfModel::WhiteNoise { variance: 1.0 });
    for s in 3..200 {
        let got = expected_f2(&white, 1, s).unwrap();
        let sf = s as f64;
        let want = (sf * sf - 4.0) / (15.0 * sf);
        assert!((got - want).abs() <= 1e-12 * want.max(1.0), "s={s}");
    }
}

/// E Q(X) for a homogeneous quadratic Q and X = L Z is Σ_i Q(L e_i), so the
/// exact expectation of F̂² under a fixed mask can be read off the estimator
/// itself, one Cholesky column at a time.
fn exact_mean_f_hat(cov: &DMatrix<f64>, plan: &GapPlan) -> Vec<f64> {
    let l = cov.clone().cholesky().expect("positive definite").l();
    let n = cov.nrows();
    let mut total = vec![0.0; plan.weights().count()];
    for i in 0..n {
        let col: Vec<f64> = l.column(i).iter().copied().collect();
        let curve = plan.evaluate(&col, Estimator::FHat).unwrap();
        for (t, p) in total.iter_mut().zip(&curve.points) {
            *t += p.f2;
        }
    }
    total
}

#[test]
fn f_hat_is_exactly_unbiased_where_every_pair_is_observed() {
    let n = 160;
    let m = 2;
    let scales = [4, 5, 8, 13, 20, 32];
    let spec = BlockMaskSpec {
        gap_fraction: 0.2,
        mean_block_length: 4.0,
    };
    let mask = block_gap_mask(n, &spec, &mut rng_for(21, MASK_STREAM)).unwrap();
    let plan = GapPlan::new(&mask, m, &scales, WindowPolicy::AllWindows).unwrap();
    let fgn = DMatrix::from_fn(n, n, |t, u| fgn_acvf(0.7, 1.0, t.abs_diff(u)).unwrap());
    let fbm = DMatrix::from_fn(n, n, |t, u| fbm_covariance(0.3, 1.0, t + 1, u + 1).unwrap());
    let mut checked = 0;
    for (model, cov) in [
        (CorrelationModel::fgn(0.7), fgn),
        (CorrelationModel::fbm(1.3), fbm),
    ] {
        let got = exact_mean_f_hat(&cov, &plan);
        for ((w, &s), g) in plan.weights().zip(&scales).zip(got) {
            let covered = (0..s).all(|k| (0..s).all(|j| w.count(k, j) > 0));
            if covered {
                let want = expected_f2(&model, m, s).unwrap();
                assert!(
                    (g - want).abs() < 1e-9 * want,
                    "{model:?} s={s}: {g} vs {want}"
                );
                checked += 1;
            }
        }
    }
    assert!(checked >= 6, "only {checked} covered scales");
}
