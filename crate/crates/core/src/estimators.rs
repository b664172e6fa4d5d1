//! Sample fluctuation functions: standard DFA on complete series and the two
//! gap-tolerant variants `F̂` (increment form) and `F̃` (product form), plus
//! Hurst-exponent regression.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detrend::{PolyBasis, WeightMatrix};
use crate::error::{domain, DfaError, Result};
use crate::numeric::{fit_line, LineFit};

/// A series with an availability mask (`true` = present). Values at missing
/// positions are never read.
#[derive(Debug, Clone, PartialEq)]
pub struct GappedSeries {
    values: Vec<f64>,
    mask: Vec<bool>,
}

impl GappedSeries {
    pub fn new(values: Vec<f64>, mask: Vec<bool>) -> Result<Self> {
        if values.len() != mask.len() {
            return Err(DfaError::DimensionMismatch {
                expected: values.len(),
                got: mask.len(),
            });
        }
        if !mask.iter().any(|&d| d) {
            return Err(DfaError::EmptySeries);
        }
        if let Some(i) = (0..values.len()).find(|&i| mask[i] && !values[i].is_finite()) {
            return Err(domain(format!("present value at index {i} is not finite")));
        }
        Ok(Self { values, mask })
    }

    pub fn complete(values: Vec<f64>) -> Result<Self> {
        let mask = vec![true; values.len()];
        Self::new(values, mask)
    }

    /// `None` entries are missing.
    pub fn from_options(values: &[Option<f64>]) -> Result<Self> {
        let mask = values.iter().map(Option::is_some).collect();
        let values = values.iter().map(|v| v.unwrap_or(0.0)).collect();
        Self::new(values, mask)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn missing_fraction(&self) -> f64 {
        self.mask.iter().filter(|&&d| !d).count() as f64 / self.len() as f64
    }

    pub fn is_complete(&self) -> bool {
        self.mask.iter().all(|&d| d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Standard,
    FHat,
    FTilde,
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Estimator::Standard => "standard",
            Estimator::FHat => "f_hat",
            Estimator::FTilde => "f_tilde",
        })
    }
}

impl FromStr for Estimator {
    type Err = DfaError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "standard" | "dfa" => Ok(Estimator::Standard),
            "f_hat" | "fhat" | "hat" => Ok(Estimator::FHat),
            "f_tilde" | "ftilde" | "tilde" => Ok(Estimator::FTilde),
            other => Err(domain(format!("unknown estimator '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UndefinedReason {
    NegativeSquare,
    NoValidPairs,
}

impl fmt::Display for UndefinedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UndefinedReason::NegativeSquare => "negative_square",
            UndefinedReason::NoValidPairs => "no_valid_pairs",
        })
    }
}

/// One scale of a fluctuation curve. `f2` keeps the raw value even when it
/// is negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalePoint {
    pub scale: usize,
    pub f2: f64,
    pub n_windows: usize,
    pub undefined: Option<UndefinedReason>,
}

impl ScalePoint {
    fn from_f2(scale: usize, f2: f64, n_windows: usize) -> Self {
        let undefined = (f2 < 0.0).then_some(UndefinedReason::NegativeSquare);
        Self {
            scale,
            f2,
            n_windows,
            undefined,
        }
    }

    fn no_pairs(scale: usize, n_windows: usize) -> Self {
        Self {
            scale,
            f2: f64::NAN,
            n_windows,
            undefined: Some(UndefinedReason::NoValidPairs),
        }
    }

    pub fn is_defined(&self) -> bool {
        self.undefined.is_none()
    }

    pub fn f(&self) -> Option<f64> {
        self.is_defined().then(|| self.f2.sqrt())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FluctuationCurve {
    pub estimator: Estimator,
    pub order: usize,
    pub points: Vec<ScalePoint>,
}

impl FluctuationCurve {
    pub fn scales(&self) -> Vec<usize> {
        self.points.iter().map(|p| p.scale).collect()
    }

    pub fn f2(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.f2).collect()
    }

    pub fn f(&self) -> Vec<Option<f64>> {
        self.points.iter().map(ScalePoint::f).collect()
    }

    pub fn undefined_fraction(&self) -> f64 {
        if self.points.is_empty() {
            return 0.0;
        }
        self.points.iter().filter(|p| !p.is_defined()).count() as f64 / self.points.len() as f64
    }
}

fn check_scales(order: usize, scales: &[usize], len: usize, min: usize) -> Result<()> {
    for &s in scales {
        if s < min {
            return Err(DfaError::ScaleTooSmall {
                order,
                scale: s,
                min,
            });
        }
        if s > len {
            return Err(DfaError::ScaleExceedsLength { scale: s, len });
        }
    }
    Ok(())
}

/// Mean of the per-window residual variances over the complete left-anchored
/// windows. Shared by every estimator so that gap-free input gives bitwise
/// identical results.
fn standard_f2(basis: &PolyBasis, values: &[f64]) -> (f64, usize) {
    let s = basis.scale();
    let mut scratch = vec![0.0; s];
    let mut total = 0.0;
    let mut count = 0;
    for w in values.chunks_exact(s) {
        total += basis.window_f2(w, &mut scratch);
        count += 1;
    }
    (total / count as f64, count)
}

/// Standard DFA of order `m` on a complete series.
pub fn dfa(series: &[f64], order: usize, scales: &[usize]) -> Result<FluctuationCurve> {
    if series.is_empty() {
        return Err(DfaError::EmptySeries);
    }
    check_scales(order, scales, series.len(), order + 2)?;
    let points = scales
        .par_iter()
        .map(|&s| {
            let basis = PolyBasis::new(order, s)?;
            let (f2, w) = standard_f2(&basis, series);
            Ok(ScalePoint::from_f2(s, f2, w))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FluctuationCurve {
        estimator: Estimator::Standard,
        order,
        points,
    })
}

/// Which windows enter the numerator of `p_{k,j}` and the window average.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowPolicy {
    /// Every complete window, including ones with no present value.
    #[default]
    AllWindows,
    /// Windows without any present value are dropped.
    SkipEmpty,
}

/// Pair reweighting `p_{k,j} = W / N_{k,j}` for one scale, where `W` counts
/// retained windows and `N_{k,j}` those in which both `X(t+k)` and `X(t+j)`
/// are present.
#[derive(Debug, Clone, PartialEq)]
pub struct GapWeights {
    scale: usize,
    windows: usize,
    // s × s, symmetric
    counts: Vec<u32>,
    retained: Vec<usize>,
}

impl GapWeights {
    pub fn scale(&self) -> usize {
        self.scale
    }

    /// `W`.
    pub fn windows(&self) -> usize {
        self.windows
    }

    /// Start offsets of the retained windows.
    pub fn retained(&self) -> &[usize] {
        &self.retained
    }

    pub fn count(&self, k: usize, j: usize) -> u32 {
        self.counts[k * self.scale + j]
    }

    /// `None` when the pair is present in no window.
    pub fn p(&self, k: usize, j: usize) -> Option<f64> {
        match self.count(k, j) {
            0 => None,
            n => Some(self.windows as f64 / n as f64),
        }
    }

    fn any_off_diagonal(&self) -> bool {
        (0..self.scale).any(|k| (k + 1..self.scale).any(|j| self.count(k, j) > 0))
    }

    fn any_pair(&self) -> bool {
        self.counts.iter().any(|&c| c > 0)
    }

    /// Every window of the layout is retained and has no missing value.
    fn is_complete(&self, len: usize) -> bool {
        self.windows == len / self.scale && self.counts.iter().all(|&c| c as usize == self.windows)
    }
}

/// Pair counts for the left-anchored windows of length `scale`.
///
/// Fails with `AllPairsMissing` when no pair `k < j` is present in any window.
pub fn gap_weights(mask: &[bool], scale: usize, policy: WindowPolicy) -> Result<GapWeights> {
    let gw = gap_weights_unchecked(mask, scale, policy)?;
    if !gw.any_off_diagonal() {
        return Err(DfaError::AllPairsMissing { scale });
    }
    Ok(gw)
}

fn gap_weights_unchecked(mask: &[bool], scale: usize, policy: WindowPolicy) -> Result<GapWeights> {
    if scale == 0 || scale > mask.len() {
        return Err(DfaError::ScaleExceedsLength {
            scale,
            len: mask.len(),
        });
    }
    let s = scale;
    let mut counts = vec![0u32; s * s];
    let mut retained = Vec::new();
    let mut present = Vec::with_capacity(s);
    for (w, win) in mask.chunks_exact(s).enumerate() {
        present.clear();
        present.extend((0..s).filter(|&k| win[k]));
        if present.is_empty() && policy == WindowPolicy::SkipEmpty {
            continue;
        }
        retained.push(w * s);
        for (a, &k) in present.iter().enumerate() {
            for &j in &present[a..] {
                counts[k * s + j] += 1;
            }
        }
    }
    for k in 0..s {
        for j in 0..k {
            counts[k * s + j] = counts[j * s + k];
        }
    }
    Ok(GapWeights {
        scale,
        windows: retained.len(),
        counts,
        retained,
    })
}

struct ScalePlan {
    scale: usize,
    basis: PolyBasis,
    weights: GapWeights,
    // p_{k,j} a_{k,j}, zero where the pair never occurs; empty when complete
    kernel: Vec<f64>,
}

/// Precomputed state for the gap-tolerant estimators under one fixed mask,
/// reusable across many series (e.g. Monte Carlo replicates).
pub struct GapPlan {
    order: usize,
    mask: Vec<bool>,
    plans: Vec<ScalePlan>,
}

impl GapPlan {
    pub fn new(
        mask: &[bool],
        order: usize,
        scales: &[usize],
        policy: WindowPolicy,
    ) -> Result<Self> {
        check_scales(order, scales, mask.len(), order + 2)?;
        if !mask.iter().any(|&d| d) {
            return Err(DfaError::EmptySeries);
        }
        let plans = scales
            .par_iter()
            .map(|&s| {
                let basis = PolyBasis::new(order, s)?;
                let weights = gap_weights_unchecked(mask, s, policy)?;
                let kernel = if weights.is_complete(mask.len()) {
                    Vec::new()
                } else {
                    let a = WeightMatrix::from_basis(&basis);
                    let mut kernel = vec![0.0; s * s];
                    for k in 0..s {
                        for j in 0..s {
                            if let Some(p) = weights.p(k, j) {
                                kernel[k * s + j] = p * a.get(k, j);
                            }
                        }
                    }
                    kernel
                };
                Ok(ScalePlan {
                    scale: s,
                    basis,
                    weights,
                    kernel,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            order,
            mask: mask.to_vec(),
            plans,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn weights(&self) -> impl Iterator<Item = &GapWeights> {
        self.plans.iter().map(|p| &p.weights)
    }

    pub fn evaluate(&self, values: &[f64], estimator: Estimator) -> Result<FluctuationCurve> {
        if values.len() != self.mask.len() {
            return Err(DfaError::DimensionMismatch {
                expected: self.mask.len(),
                got: values.len(),
            });
        }
        let points: Vec<ScalePoint> = match estimator {
            Estimator::Standard => {
                return Err(domain(
                    "the standard estimator takes complete series; use dfa",
                ))
            }
            Estimator::FHat => {
                if self.order == 0 {
                    return Err(DfaError::OrderZeroUnsupported);
                }
                self.plans
                    .par_iter()
                    .map(|p| self.f_hat_scale(p, values))
                    .collect()
            }
            Estimator::FTilde => self
                .plans
                .par_iter()
                .map(|p| self.f_tilde_scale(p, values))
                .collect(),
        };
        if let Some(first) = points.first() {
            if points
                .iter()
                .all(|p| p.undefined == Some(UndefinedReason::NoValidPairs))
            {
                return Err(DfaError::AllPairsMissing { scale: first.scale });
            }
        }
        Ok(FluctuationCurve {
            estimator,
            order: self.order,
            points,
        })
    }

    fn f_hat_scale(&self, plan: &ScalePlan, values: &[f64]) -> ScalePoint {
        let (s, w) = (plan.scale, plan.weights.windows());
        if w == 0 || !plan.weights.any_off_diagonal() {
            return ScalePoint::no_pairs(s, w);
        }
        if plan.kernel.is_empty() {
            let (f2, n) = standard_f2(&plan.basis, values);
            return ScalePoint::from_f2(s, f2, n);
        }
        let mut present = Vec::with_capacity(s);
        let mut total = 0.0;
        for &start in plan.weights.retained() {
            let x = &values[start..start + s];
            let d = &self.mask[start..start + s];
            present.clear();
            present.extend((0..s).filter(|&k| d[k]));
            let mut acc = 0.0;
            for (a, &k) in present.iter().enumerate() {
                let row = &plan.kernel[k * s..(k + 1) * s];
                let xk = x[k];
                for &j in &present[a + 1..] {
                    let diff = xk - x[j];
                    acc += row[j] * diff * diff;
                }
            }
            total += -acc / s as f64;
        }
        ScalePoint::from_f2(s, total / w as f64, w)
    }

    fn f_tilde_scale(&self, plan: &ScalePlan, values: &[f64]) -> ScalePoint {
        let (s, w) = (plan.scale, plan.weights.windows());
        if w == 0 || !plan.weights.any_pair() {
            return ScalePoint::no_pairs(s, w);
        }
        if plan.kernel.is_empty() {
            let (f2, n) = standard_f2(&plan.basis, values);
            return ScalePoint::from_f2(s, f2, n);
        }
        let mut present = Vec::with_capacity(s);
        let mut total = 0.0;
        for &start in plan.weights.retained() {
            let x = &values[start..start + s];
            let d = &self.mask[start..start + s];
            present.clear();
            present.extend((0..s).filter(|&k| d[k]));
            let mut acc = 0.0;
            for (a, &k) in present.iter().enumerate() {
                let row = &plan.kernel[k * s..(k + 1) * s];
                let xk = x[k];
                let mut off = 0.0;
                for &j in &present[a + 1..] {
                    off += row[j] * x[j];
                }
                acc += xk * (row[k] * xk + 2.0 * off);
            }
            total += acc / s as f64;
        }
        ScalePoint::from_f2(s, total / w as f64, w)
    }
}

/// `F̂(s)`: increment-form estimator tolerant to missing values (`m ≥ 1`).
pub fn f_hat(gs: &GappedSeries, order: usize, scales: &[usize]) -> Result<FluctuationCurve> {
    f_hat_with(gs, order, scales, WindowPolicy::default())
}

pub fn f_hat_with(
    gs: &GappedSeries,
    order: usize,
    scales: &[usize],
    policy: WindowPolicy,
) -> Result<FluctuationCurve> {
    if order == 0 {
        return Err(DfaError::OrderZeroUnsupported);
    }
    GapPlan::new(gs.mask(), order, scales, policy)?.evaluate(gs.values(), Estimator::FHat)
}

/// `F̃(s)`: product-form estimator tolerant to missing values. Unbiased for
/// stationary input only.
pub fn f_tilde(gs: &GappedSeries, order: usize, scales: &[usize]) -> Result<FluctuationCurve> {
    f_tilde_with(gs, order, scales, WindowPolicy::default())
}

pub fn f_tilde_with(
    gs: &GappedSeries,
    order: usize,
    scales: &[usize],
    policy: WindowPolicy,
) -> Result<FluctuationCurve> {
    GapPlan::new(gs.mask(), order, scales, policy)?.evaluate(gs.values(), Estimator::FTilde)
}

/// Runs the chosen estimator. `Standard` requires a complete series.
pub fn estimate(
    gs: &GappedSeries,
    estimator: Estimator,
    order: usize,
    scales: &[usize],
    policy: WindowPolicy,
) -> Result<FluctuationCurve> {
    match estimator {
        Estimator::Standard => {
            if !gs.is_complete() {
                return Err(domain(
                    "standard DFA needs a complete series; use f_hat or f_tilde",
                ));
            }
            dfa(gs.values(), order, scales)
        }
        Estimator::FHat => f_hat_with(gs, order, scales, policy),
        Estimator::FTilde => f_tilde_with(gs, order, scales, policy),
    }
}

/// About 30 log-spaced integer scales between `m + 2` and `n / 4`.
pub fn default_scales(len: usize, order: usize) -> Vec<usize> {
    const POINTS: usize = 30;
    let lo = order + 2;
    let hi = len / 4;
    if hi < lo {
        return Vec::new();
    }
    let (llo, lhi) = ((lo as f64).ln(), (hi as f64).ln());
    let mut out: Vec<usize> = (0..POINTS)
        .map(|i| {
            let x = llo + (lhi - llo) * i as f64 / (POINTS - 1) as f64;
            (x.exp().round() as usize).clamp(lo, hi)
        })
        .collect();
    out.dedup();
    out
}

/// The central two octaves of the given scales (all of them when the grid
/// spans less than that).
pub fn default_fit_range(scales: &[usize]) -> Option<(usize, usize)> {
    let lo = *scales.iter().min()?;
    let hi = *scales.iter().max()?;
    if (hi as f64) < 4.0 * lo as f64 {
        return Some((lo, hi));
    }
    let center = ((lo as f64) * (hi as f64)).sqrt();
    Some((
        (center / 2.0).ceil() as usize,
        (center * 2.0).floor() as usize,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HurstFit {
    pub hurst: f64,
    pub intercept: f64,
    pub fit_range: (usize, usize),
    pub n_points: usize,
    pub residual_std: f64,
    pub r_squared: f64,
}

/// OLS slope of `log F` against `log s` over defined scales in `range`
/// (default: [`default_fit_range`]).
pub fn estimate_hurst(curve: &FluctuationCurve, range: Option<(usize, usize)>) -> Result<HurstFit> {
    let range = match range {
        Some(r) => r,
        None => default_fit_range(&curve.scales()).ok_or(DfaError::TooFewPoints {
            needed: 3,
            found: 0,
        })?,
    };
    let (x, y): (Vec<f64>, Vec<f64>) = curve
        .points
        .iter()
        .filter(|p| p.scale >= range.0 && p.scale <= range.1)
        .filter_map(|p| {
            p.f()
                .filter(|f| *f > 0.0)
                .map(|f| ((p.scale as f64).ln(), f.ln()))
        })
        .unzip();
    if x.len() < 3 {
        return Err(DfaError::TooFewPoints {
            needed: 3,
            found: x.len(),
        });
    }
    let LineFit {
        slope,
        intercept,
        residual_std,
        r_squared,
    } = fit_line(&x, &y).ok_or(DfaError::TooFewPoints {
        needed: 3,
        found: x.len(),
    })?;
    Ok(HurstFit {
        hurst: slope,
        intercept,
        fit_range: range,
        n_points: x.len(),
        residual_std,
        r_squared,
    })
}
