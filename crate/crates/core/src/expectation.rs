//! Exact expected squared fluctuation functions `E F²(s)` of DFA-m under a
//! correlation model, the asymptotic prefactor `λ_{m,H}` of
//! `E F²(s) ∼ λ s^{2H}`, and the finite-size correction `K²(s)`.

use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::detrend::{PolyBasis, WeightMatrix};
use crate::error::{domain, DfaError, Result};
use crate::models::{AcvfModel, CorrelationModel, VariogramModel};
use crate::numeric::CompensatedSum;
use crate::weights::{
    asymptotic_coefficients, rational_to_f64, weight_function, WeightFunctionTable,
};

fn check_scale(order: usize, scale: usize) -> Result<()> {
    if scale < order + 1 {
        return Err(DfaError::ScaleTooSmall {
            order,
            scale,
            min: order + 2,
        });
    }
    Ok(())
}

/// `(γ(0) G(0) + 2 Σ_{j≥1} G(j) γ(j)) / s` for a precomputed weight table and
/// autocovariances `γ(0..s)`.
pub fn expected_f2_from_acvf(table: &WeightFunctionTable, acvf: &[f64]) -> Result<f64> {
    let s = table.scale();
    if acvf.len() < s {
        return Err(DfaError::InsufficientTableLags {
            required: s - 1,
            available: acvf.len().saturating_sub(1),
        });
    }
    let g = table.values();
    let mut acc = CompensatedSum::new();
    acc.add(g[0] * acvf[0]);
    for j in 1..s {
        acc.add(2.0 * g[j] * acvf[j]);
    }
    Ok(acc.value() / s as f64)
}

/// `−(1/s) Σ_{j=1}^{s−1} G(j) S(j)` for a precomputed weight table and
/// variogram values `S(0..s)` (`S(0)` is ignored).
pub fn expected_f2_from_variogram(table: &WeightFunctionTable, variogram: &[f64]) -> Result<f64> {
    let s = table.scale();
    if table.order() == 0 {
        return Err(DfaError::OrderZeroUnsupported);
    }
    if variogram.len() < s {
        return Err(DfaError::InsufficientTableLags {
            required: s - 1,
            available: variogram.len().saturating_sub(1),
        });
    }
    let g = table.values();
    let mut acc = CompensatedSum::new();
    for j in 1..s {
        acc.add(g[j] * variogram[j]);
    }
    Ok(-acc.value() / s as f64)
}

/// Exact `E F²(s)` for a stationary process.
///
/// Returns 0 at `s = m + 1`, where the fit is perfect.
pub fn expected_f2_stationary(model: &AcvfModel, order: usize, scale: usize) -> Result<f64> {
    check_scale(order, scale)?;
    let acvf = model.acvf_vec(scale)?;
    if scale == order + 1 {
        return Ok(0.0);
    }
    expected_f2_from_acvf(&weight_function(order, scale)?, &acvf)
}

/// Exact `E F²(s)` for a stationary-increment process, `m ≥ 1`.
pub fn expected_f2_increments(model: &VariogramModel, order: usize, scale: usize) -> Result<f64> {
    if order == 0 {
        return Err(DfaError::OrderZeroUnsupported);
    }
    check_scale(order, scale)?;
    model.validate()?;
    let sv = (0..scale)
        .map(|t| model.variogram(t))
        .collect::<Result<Vec<_>>>()?;
    if scale == order + 1 {
        return Ok(0.0);
    }
    expected_f2_from_variogram(&weight_function(order, scale)?, &sv)
}

/// `E F_t²(s) = (1/s) Σ_k Σ_j a_{k,j} γ(t+k, t+j)` for an arbitrary covariance
/// kernel. Samples of the window are at times `t+1, …, t+s`.
pub fn expected_f2_general<F>(acvf2: F, order: usize, scale: usize, offset: usize) -> Result<f64>
where
    F: Fn(usize, usize) -> Result<f64>,
{
    if scale < order + 2 {
        return Err(DfaError::ScaleTooSmall {
            order,
            scale,
            min: order + 2,
        });
    }
    let a = WeightMatrix::from_basis(&PolyBasis::new(order, scale)?);
    expected_f2_general_with(&a, acvf2, offset)
}

/// As [`expected_f2_general`] with a prebuilt weight matrix.
pub fn expected_f2_general_with<F>(a: &WeightMatrix, acvf2: F, offset: usize) -> Result<f64>
where
    F: Fn(usize, usize) -> Result<f64>,
{
    let s = a.scale();
    let mut acc = CompensatedSum::new();
    for k in 0..s {
        let row = a.row(k);
        let mut inner = CompensatedSum::new();
        for (j, akj) in row.iter().enumerate() {
            inner.add(akj * acvf2(offset + k + 1, offset + j + 1)?);
        }
        acc.add(inner.value());
    }
    Ok(acc.value() / s as f64)
}

/// `E F²(s)` for either kind of model.
pub fn expected_f2(model: &CorrelationModel, order: usize, scale: usize) -> Result<f64> {
    match model {
        CorrelationModel::Stationary(m) => expected_f2_stationary(m, order, scale),
        CorrelationModel::Increments(m) => expected_f2_increments(m, order, scale),
    }
}

/// Asymptotic prefactor in `E F²(s) ∼ λ_{m,H} s^{2H}` for unit variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingConstant {
    pub order: usize,
    pub hurst: f64,
    pub lambda: f64,
}

impl ScalingConstant {
    /// `λ s^{2H}`.
    pub fn power_law(&self, scale: usize) -> f64 {
        self.lambda * (scale as f64).powf(2.0 * self.hurst)
    }
}

/// Exact rational `λ_{m,H}`; `H` is taken at its exact binary value.
pub fn asymptotic_lambda_exact(order: usize, hurst: f64) -> Result<BigRational> {
    if order == 0 {
        return Err(DfaError::OrderZeroUnsupported);
    }
    if !(hurst > 0.0 && hurst < 2.0) || hurst == 1.0 {
        return Err(domain(format!(
            "Hurst exponent must lie in (0,1)∪(1,2) (got {hurst})"
        )));
    }
    let d = asymptotic_coefficients(order)?.d;
    if hurst == 0.5 {
        return Ok(d[0].clone());
    }
    let h = BigRational::from_f64(hurst).ok_or_else(|| domain("Hurst exponent is not finite"))?;
    let two_h = &h + &h;
    let offset = &two_h - BigRational::one();
    let mut sum = BigRational::zero();
    for (q, dq) in d.iter().enumerate() {
        let denom = BigRational::from_integer((q as i64).into()) + &offset;
        sum += dq / denom;
    }
    Ok(if hurst < 1.0 {
        two_h * offset * sum
    } else {
        -sum
    })
}

pub fn asymptotic_lambda(order: usize, hurst: f64) -> Result<ScalingConstant> {
    let lambda = rational_to_f64(&asymptotic_lambda_exact(order, hurst)?);
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(domain(format!(
            "λ evaluated to {lambda} for m = {order}, H = {hurst}"
        )));
    }
    Ok(ScalingConstant {
        order,
        hurst,
        lambda,
    })
}

/// `K²(s) = E F²(s) / (λ_{m,H} s^{2H})`, with `E F²(s)` supplied by `engine`.
pub fn correction_function<F>(order: usize, hurst: f64, scale: usize, engine: F) -> Result<f64>
where
    F: Fn(usize) -> Result<f64>,
{
    if scale < order + 2 {
        return Err(DfaError::ScaleTooSmall {
            order,
            scale,
            min: order + 2,
        });
    }
    let lambda = asymptotic_lambda(order, hurst)?;
    Ok(engine(scale)? / lambda.power_law(scale))
}

/// `K²(s)` for a model with a Hurst exponent, normalized by the model's
/// variance parameter.
pub fn model_correction(model: &CorrelationModel, order: usize, scale: usize) -> Result<f64> {
    let hurst = model
        .hurst()
        .ok_or_else(|| domain("the correction function needs a model with a Hurst exponent"))?;
    let variance = model_variance(model);
    correction_function(order, hurst, scale, |s| {
        Ok(expected_f2(model, order, s)? / variance)
    })
}

/// Variance parameter of a model (1 for tabulated variograms).
pub fn model_variance(model: &CorrelationModel) -> f64 {
    match model {
        CorrelationModel::Stationary(m) => m.variance(),
        CorrelationModel::Increments(VariogramModel::Fbm { variance, .. }) => *variance,
        CorrelationModel::Increments(VariogramModel::Table(_)) => 1.0,
    }
}

/// `F²_mod(s) = F²(s) / K²(s)`.
pub fn modified_f2(f2: f64, k2: f64) -> Result<f64> {
    if !(k2 > 0.0 && k2.is_finite()) {
        return Err(DfaError::NonpositiveCorrection(k2));
    }
    Ok(f2 / k2)
}

/// Powers of two from `m + 2` (rounded up) to 4096.
pub fn default_expected_scales(order: usize) -> Vec<usize> {
    let start = (order + 2).next_power_of_two();
    std::iter::successors(Some(start), |s| Some(s * 2))
        .take_while(|&s| s <= 4096)
        .collect()
}

/// `E F²(s)` over a grid of scales.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectedCurve {
    pub order: usize,
    pub scales: Vec<usize>,
    pub ef2: Vec<f64>,
    pub model: CorrelationModel,
}

impl ExpectedCurve {
    /// Scales are evaluated in parallel; each value depends only on its own
    /// scale, so the result does not depend on the schedule.
    pub fn compute(model: &CorrelationModel, order: usize, scales: &[usize]) -> Result<Self> {
        model.validate()?;
        let ef2 = scales
            .par_iter()
            .map(|&s| expected_f2(model, order, s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            order,
            scales: scales.to_vec(),
            ef2,
            model: model.clone(),
        })
    }

    /// `K²(s)` at every scale, against `λ_{m,H}` of the given Hurst exponent.
    pub fn correction(&self, hurst: f64) -> Result<Vec<f64>> {
        let lambda = asymptotic_lambda(self.order, hurst)?;
        let variance = model_variance(&self.model);
        Ok(self
            .scales
            .iter()
            .zip(&self.ef2)
            .map(|(&s, &e)| e / variance / lambda.power_law(s))
            .collect())
    }
}
