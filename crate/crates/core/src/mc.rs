//! Monte Carlo ensembles: many realizations of one model, analysed with the
//! standard estimator on the complete series and with the gap-tolerant
//! estimators under one fixed mask.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::estimators::{dfa, estimate_hurst, Estimator, FluctuationCurve, GapPlan, WindowPolicy};
use crate::generators::{rng_for, ModelSampler};
use crate::models::CorrelationModel;
use crate::numeric::{compensated_sum, quantile_sorted};

/// Stream index reserved for drawing a synthetic mask, disjoint from every
/// replicate stream.
pub const MASK_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub model: CorrelationModel,
    pub n: usize,
    pub order: usize,
    pub scales: Vec<usize>,
    pub ensemble: usize,
    pub seed: u64,
    /// Fixed availability mask for `F̂` / `F̃`; `None` runs the standard
    /// estimator only.
    pub mask: Option<Vec<bool>>,
    pub estimators: Vec<Estimator>,
    pub fit_range: Option<(usize, usize)>,
    pub policy: WindowPolicy,
}

/// Per-scale ensemble statistics for one estimator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorSummary {
    pub estimator: Estimator,
    /// Mean of `F²` over replicates with a finite value (negative values
    /// included).
    pub mean_f2: Vec<f64>,
    /// Standard error of `mean_f2`.
    pub se_f2: Vec<f64>,
    /// 5% and 95% quantiles of `F` over replicates where it is defined.
    pub q05_f: Vec<f64>,
    pub q95_f: Vec<f64>,
    pub n_defined: Vec<usize>,
    /// `F²` per replicate, `replicates × scales`.
    #[serde(skip)]
    pub f2: Vec<Vec<f64>>,
    /// Fitted Hurst exponent per replicate.
    pub hurst: Vec<Option<f64>>,
}

impl EstimatorSummary {
    fn from_curves(
        estimator: Estimator,
        curves: &[FluctuationCurve],
        fit_range: Option<(usize, usize)>,
    ) -> Self {
        let nscales = curves.first().map_or(0, |c| c.points.len());
        let f2: Vec<Vec<f64>> = curves.iter().map(FluctuationCurve::f2).collect();
        let mut mean_f2 = Vec::with_capacity(nscales);
        let mut se_f2 = Vec::with_capacity(nscales);
        let mut q05_f = Vec::with_capacity(nscales);
        let mut q95_f = Vec::with_capacity(nscales);
        let mut n_defined = Vec::with_capacity(nscales);
        for i in 0..nscales {
            let column: Vec<f64> = f2
                .iter()
                .map(|row| row[i])
                .filter(|v| v.is_finite())
                .collect();
            let (mean, se) = mean_and_se(&column);
            mean_f2.push(mean);
            se_f2.push(se);
            let mut fs: Vec<f64> = curves.iter().filter_map(|c| c.points[i].f()).collect();
            fs.sort_by(f64::total_cmp);
            n_defined.push(fs.len());
            q05_f.push(quantile_sorted(&fs, 0.05).unwrap_or(f64::NAN));
            q95_f.push(quantile_sorted(&fs, 0.95).unwrap_or(f64::NAN));
        }
        let hurst = curves
            .iter()
            .map(|c| estimate_hurst(c, fit_range).ok().map(|h| h.hurst))
            .collect();
        Self {
            estimator,
            mean_f2,
            se_f2,
            q05_f,
            q95_f,
            n_defined,
            f2,
            hurst,
        }
    }
}

/// Sample mean and its standard error; `NaN` for an empty sample and an
/// error of 0 for a single value.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = compensated_sum(values.iter().copied()) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss = compensated_sum(values.iter().map(|v| (v - mean).powi(2)));
    (mean, (ss / (n - 1) as f64 / n as f64).sqrt())
}

/// Mean and standard error of the replicate-wise difference `a − b`.
pub fn paired_difference(a: &[f64], b: &[f64]) -> (f64, f64) {
    let d: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|v| v.is_finite())
        .collect();
    mean_and_se(&d)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleResult {
    pub scales: Vec<usize>,
    pub ensemble: usize,
    pub missing_fraction: f64,
    /// The standard estimator on the complete series comes first.
    pub summaries: Vec<EstimatorSummary>,
}

impl EnsembleResult {
    pub fn summary(&self, estimator: Estimator) -> Option<&EstimatorSummary> {
        self.summaries.iter().find(|s| s.estimator == estimator)
    }
}

/// Runs the ensemble. Replicate `r` draws from stream `r` of `seed`, and all
/// reductions run in replicate order, so the output is identical for any
/// thread count.
pub fn run_ensemble(cfg: &EnsembleConfig) -> Result<EnsembleResult> {
    if cfg.ensemble == 0 {
        return Err(domain("ensemble size must be at least 1"));
    }
    let sampler = ModelSampler::new(&cfg.model, cfg.n)?;
    let gapped: Vec<Estimator> = cfg
        .estimators
        .iter()
        .copied()
        .filter(|e| *e != Estimator::Standard)
        .collect();
    let plan = match (&cfg.mask, gapped.is_empty()) {
        (Some(mask), false) => {
            if mask.len() != cfg.n {
                return Err(crate::DfaError::DimensionMismatch {
                    expected: cfg.n,
                    got: mask.len(),
                });
            }
            Some(GapPlan::new(mask, cfg.order, &cfg.scales, cfg.policy)?)
        }
        (None, false) => return Err(domain("gap-tolerant estimators need a mask")),
        _ => None,
    };
    // check the grid once before fanning out
    dfa(&vec![0.0; cfg.n], cfg.order, &cfg.scales)?;

    let per_replicate = (0..cfg.ensemble as u64)
        .into_par_iter()
        .map(|r| {
            let x = sampler.sample(cfg.n, &mut rng_for(cfg.seed, r));
            let mut curves = vec![dfa(&x, cfg.order, &cfg.scales)?];
            if let Some(plan) = &plan {
                for &e in &gapped {
                    curves.push(plan.evaluate(&x, e)?);
                }
            }
            Ok(curves)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut estimators = vec![Estimator::Standard];
    if plan.is_some() {
        estimators.extend(&gapped);
    }
    let summaries = estimators
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let curves: Vec<FluctuationCurve> =
                per_replicate.iter().map(|c| c[i].clone()).collect();
            EstimatorSummary::from_curves(e, &curves, cfg.fit_range)
        })
        .collect();
    let missing_fraction = cfg.mask.as_ref().map_or(0.0, |m| {
        m.iter().filter(|&&d| !d).count() as f64 / m.len() as f64
    });
    Ok(EnsembleResult {
        scales: cfg.scales.clone(),
        ensemble: cfg.ensemble,
        missing_fraction,
        summaries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{block_gap_mask, BlockMaskSpec};

    fn config(ensemble: usize) -> EnsembleConfig {
        let n = 400;
        let mask = block_gap_mask(
            n,
            &BlockMaskSpec {
                gap_fraction: 0.2,
                mean_block_length: 10.0,
            },
            &mut rng_for(1, MASK_STREAM),
        )
        .unwrap();
        EnsembleConfig {
            model: CorrelationModel::fgn(0.7),
            n,
            order: 2,
            scales: vec![8, 16, 32, 64],
            ensemble,
            seed: 123,
            mask: Some(mask),
            estimators: vec![Estimator::FHat, Estimator::FTilde],
            fit_range: Some((8, 64)),
            policy: WindowPolicy::AllWindows,
        }
    }

    #[test]
    fn single_replicate_equals_single_run() {
        let cfg = config(1);
        let res = run_ensemble(&cfg).unwrap();
        let x = ModelSampler::new(&cfg.model, cfg.n)
            .unwrap()
            .sample(cfg.n, &mut rng_for(cfg.seed, 0));
        let d = dfa(&x, 2, &cfg.scales).unwrap();
        let s = res.summary(Estimator::Standard).unwrap();
        assert_eq!(s.mean_f2, d.f2());
        assert_eq!(s.se_f2, vec![0.0; 4]);
        assert_eq!(
            s.hurst[0],
            Some(estimate_hurst(&d, cfg.fit_range).unwrap().hurst)
        );
        assert_eq!(res.summaries.len(), 3);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let cfg = config(24);
        let a = run_ensemble(&cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| run_ensemble(&cfg)).unwrap();
        assert_eq!(a, b);
        for (x, y) in a.summaries.iter().zip(&b.summaries) {
            assert_eq!(x.f2, y.f2);
        }
    }

    #[test]
    fn mean_and_se_values() {
        let (m, se) = mean_and_se(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert!(mean_and_se(&[]).0.is_nan());
        let (d, _) = paired_difference(&[3.0, 5.0], &[1.0, 2.0]);
        assert_eq!(d, 2.5);
    }

    #[test]
    fn rejects_bad_configs() {
        let mut cfg = config(2);
        cfg.ensemble = 0;
        assert!(run_ensemble(&cfg).is_err());
        let mut cfg = config(2);
        cfg.mask = None;
        assert!(run_ensemble(&cfg).is_err());
        let mut cfg = config(2);
        cfg.scales = vec![500];
        assert!(run_ensemble(&cfg).is_err());
    }
}
