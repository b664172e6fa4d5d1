//! Second-order structure of the processes analysed here: autocovariances of
//! stationary processes and variograms of stationary-increment processes.
//!
//! Lags are integers throughout (discrete time).

use serde::{Deserialize, Serialize};

use crate::error::{domain, DfaError, Result};

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(domain(format!(
            "{name} must be positive and finite (got {v})"
        )))
    }
}

fn check_stationary_hurst(h: f64) -> Result<()> {
    if h > 0.0 && h < 1.0 {
        Ok(())
    } else {
        Err(domain(format!(
            "stationary Hurst exponent must lie in (0, 1) (got {h})"
        )))
    }
}

fn check_motion_hurst(h: f64) -> Result<()> {
    if h > 1.0 && h < 2.0 {
        Ok(())
    } else {
        Err(domain(format!(
            "nonstationary Hurst exponent must lie in (1, 2) (got {h})"
        )))
    }
}

/// A Hurst exponent together with the exponent of its stationary increments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HurstParams {
    pub hurst: f64,
    /// `H − 1` for `H > 1`, otherwise `H`.
    pub increment_exponent: f64,
}

impl HurstParams {
    pub fn new(hurst: f64) -> Result<Self> {
        if !(hurst > 0.0 && hurst < 2.0) || hurst == 1.0 {
            return Err(domain(format!(
                "Hurst exponent must lie in (0,1)∪(1,2) (got {hurst})"
            )));
        }
        let increment_exponent = if hurst > 1.0 { hurst - 1.0 } else { hurst };
        Ok(Self {
            hurst,
            increment_exponent,
        })
    }

    pub fn is_stationary(&self) -> bool {
        self.hurst < 1.0
    }
}

/// Generalized binomial coefficients `C(a, n)` for `n = 0..len`.
fn binomial_series(a: f64, len: usize) -> impl Iterator<Item = f64> {
    (0..len).scan(1.0, move |c, n| {
        let out = *c;
        *c *= (a - n as f64) / (n as f64 + 1.0);
        Some(out)
    })
}

/// Autocovariance of fractional Gaussian noise,
/// `γ(τ) = σ²/2 (|τ+1|^{2H} − 2|τ|^{2H} + |τ−1|^{2H})`.
///
/// For lags of 16 and above the second difference is evaluated from its
/// binomial series `σ² τ^{2H} Σ_{k≥1} C(2H, 2k) τ^{−2k}`, which avoids the
/// catastrophic cancellation of the direct formula.
pub fn fgn_acvf(hurst: f64, variance: f64, lag: usize) -> Result<f64> {
    check_stationary_hurst(hurst)?;
    check_positive("variance", variance)?;
    Ok(fgn_acvf_unchecked(hurst, variance, lag))
}

pub(crate) fn fgn_acvf_unchecked(hurst: f64, variance: f64, lag: usize) -> f64 {
    let a = 2.0 * hurst;
    if lag == 0 {
        return variance;
    }
    let t = lag as f64;
    if lag < 16 {
        return 0.5 * variance * ((t + 1.0).powf(a) - 2.0 * t.powf(a) + (t - 1.0).powf(a));
    }
    let x2 = 1.0 / (t * t);
    let mut sum = 0.0;
    let mut xp = 1.0;
    for (n, c) in binomial_series(a, 64).enumerate().skip(1) {
        if n % 2 == 1 {
            continue;
        }
        xp *= x2;
        let term = c * xp;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    variance * t.powf(a) * sum
}

/// Power-law tail `σ² H (2H − 1) τ^{2H−2}` of the fGn autocovariance.
pub fn fgn_acvf_asymptotic(hurst: f64, variance: f64, lag: usize) -> Result<f64> {
    check_stationary_hurst(hurst)?;
    check_positive("variance", variance)?;
    if hurst == 0.5 {
        return Err(domain("the power-law tail is identically zero at H = 1/2"));
    }
    if lag == 0 {
        return Err(domain("the power-law tail is defined for lags >= 1"));
    }
    Ok(variance * hurst * (2.0 * hurst - 1.0) * (lag as f64).powf(2.0 * hurst - 2.0))
}

/// Table of the power-law tail substituted for the exact fGn autocovariance
/// at every lag `τ ≥ 1`, keeping `γ(0) = σ²`; lags `0..len`.
pub fn fgn_asymptotic_table(hurst: f64, variance: f64, len: usize) -> Result<AcvfModel> {
    let mut g = Vec::with_capacity(len);
    for lag in 0..len {
        g.push(if lag == 0 {
            variance
        } else {
            fgn_acvf_asymptotic(hurst, variance, lag)?
        });
    }
    let model = AcvfModel::Table(g);
    model.validate()?;
    Ok(model)
}

/// Covariance of fractional Brownian motion with increment exponent `h`:
/// `E X(t)X(s) = σ²/2 (|s|^{2h} + |t|^{2h} − |t − s|^{2h})`.
pub fn fbm_covariance(h: f64, variance: f64, t: usize, s: usize) -> Result<f64> {
    check_stationary_hurst(h)?;
    check_positive("variance", variance)?;
    Ok(fbm_covariance_unchecked(h, variance, t, s))
}

pub(crate) fn fbm_covariance_unchecked(h: f64, variance: f64, t: usize, s: usize) -> f64 {
    let a = 2.0 * h;
    let d = t.abs_diff(s) as f64;
    0.5 * variance * ((s as f64).powf(a) + (t as f64).powf(a) - d.powf(a))
}

/// Variogram `S(t) = σ² t^{2(H−1)}` of fBm with Hurst exponent `H ∈ (1, 2)`.
pub fn fbm_variogram(hurst: f64, variance: f64, lag: usize) -> Result<f64> {
    check_motion_hurst(hurst)?;
    check_positive("variance", variance)?;
    if lag == 0 {
        return Ok(0.0);
    }
    Ok(variance * (lag as f64).powf(2.0 * (hurst - 1.0)))
}

/// Ornstein–Uhlenbeck autocovariance `γ0 exp(−lag/τ_c)`.
pub fn ou_acvf(tau: f64, variance: f64, lag: usize) -> Result<f64> {
    check_positive("correlation time", tau)?;
    check_positive("variance", variance)?;
    Ok(variance * (-(lag as f64) / tau).exp())
}

/// AR(1) autocovariance `γ0 φ^lag`.
pub fn ar1_acvf(phi: f64, variance: f64, lag: usize) -> Result<f64> {
    if !(phi > -1.0 && phi < 1.0) {
        return Err(domain(format!(
            "AR(1) coefficient must lie in (-1, 1) (got {phi})"
        )));
    }
    check_positive("variance", variance)?;
    Ok(variance * phi.powi(lag.min(i32::MAX as usize) as i32))
}

/// Autocovariance model of a stationary process.
#[derive(Debug, Clone, PartialEq)]
pub enum AcvfModel {
    WhiteNoise {
        variance: f64,
    },
    Fgn {
        hurst: f64,
        variance: f64,
    },
    Ou {
        tau: f64,
        variance: f64,
    },
    Ar1 {
        phi: f64,
        variance: f64,
    },
    /// Explicit `γ(0), γ(1), …, γ(L)`.
    Table(Vec<f64>),
}

impl AcvfModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            AcvfModel::WhiteNoise { variance } => check_positive("variance", variance),
            AcvfModel::Fgn { hurst, variance } => {
                check_stationary_hurst(hurst)?;
                check_positive("variance", variance)
            }
            AcvfModel::Ou { tau, variance } => ou_acvf(tau, variance, 0).map(drop),
            AcvfModel::Ar1 { phi, variance } => ar1_acvf(phi, variance, 0).map(drop),
            AcvfModel::Table(ref g) => {
                let g0 = *g
                    .first()
                    .ok_or_else(|| domain("empty autocovariance table"))?;
                check_positive("γ(0)", g0)?;
                if let Some((lag, v)) = g
                    .iter()
                    .enumerate()
                    .find(|(_, v)| !v.is_finite() || v.abs() > g0)
                {
                    return Err(domain(format!(
                        "|γ({lag})| = {} exceeds γ(0) = {g0}",
                        v.abs()
                    )));
                }
                Ok(())
            }
        }
    }

    /// Largest lag available, `None` for analytic models.
    pub fn max_lag(&self) -> Option<usize> {
        match self {
            AcvfModel::Table(g) => Some(g.len().saturating_sub(1)),
            _ => None,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            AcvfModel::WhiteNoise { variance }
            | AcvfModel::Fgn { variance, .. }
            | AcvfModel::Ou { variance, .. }
            | AcvfModel::Ar1 { variance, .. } => variance,
            AcvfModel::Table(ref g) => g[0],
        }
    }

    /// Hurst exponent, for models that have one.
    pub fn hurst(&self) -> Option<f64> {
        match *self {
            AcvfModel::WhiteNoise { .. } => Some(0.5),
            AcvfModel::Fgn { hurst, .. } => Some(hurst),
            _ => None,
        }
    }

    pub fn acvf(&self, lag: usize) -> Result<f64> {
        match *self {
            AcvfModel::WhiteNoise { variance } => Ok(if lag == 0 { variance } else { 0.0 }),
            AcvfModel::Fgn { hurst, variance } => fgn_acvf(hurst, variance, lag),
            AcvfModel::Ou { tau, variance } => ou_acvf(tau, variance, lag),
            AcvfModel::Ar1 { phi, variance } => ar1_acvf(phi, variance, lag),
            AcvfModel::Table(ref g) => g.get(lag).copied().ok_or(DfaError::InsufficientTableLags {
                required: lag,
                available: g.len().saturating_sub(1),
            }),
        }
    }

    /// `γ(0), …, γ(len − 1)`.
    pub fn acvf_vec(&self, len: usize) -> Result<Vec<f64>> {
        self.validate()?;
        if let Some(max) = self.max_lag() {
            if len > 0 && len - 1 > max {
                return Err(DfaError::InsufficientTableLags {
                    required: len - 1,
                    available: max,
                });
            }
        }
        (0..len).map(|k| self.acvf(k)).collect()
    }
}

/// Variogram `S(t) = E[X(t+t₀) − X(t₀)]²` of a stationary-increment process.
#[derive(Debug, Clone, PartialEq)]
pub enum VariogramModel {
    Fbm {
        hurst: f64,
        variance: f64,
    },
    /// Explicit `S(1), …, S(L)`; `S(0) = 0` is implied.
    Table(Vec<f64>),
}

impl VariogramModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            VariogramModel::Fbm { hurst, variance } => fbm_variogram(hurst, variance, 0).map(drop),
            VariogramModel::Table(ref v) => {
                if v.is_empty() {
                    return Err(domain("empty variogram table"));
                }
                if let Some((i, x)) = v
                    .iter()
                    .enumerate()
                    .find(|(_, x)| !x.is_finite() || **x < 0.0)
                {
                    return Err(domain(format!(
                        "S({}) = {x} must be finite and nonnegative",
                        i + 1
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn max_lag(&self) -> Option<usize> {
        match self {
            VariogramModel::Table(v) => Some(v.len()),
            _ => None,
        }
    }

    pub fn hurst(&self) -> Option<f64> {
        match *self {
            VariogramModel::Fbm { hurst, .. } => Some(hurst),
            VariogramModel::Table(_) => None,
        }
    }

    pub fn variogram(&self, lag: usize) -> Result<f64> {
        if lag == 0 {
            return Ok(0.0);
        }
        match *self {
            VariogramModel::Fbm { hurst, variance } => fbm_variogram(hurst, variance, lag),
            VariogramModel::Table(ref v) => {
                v.get(lag - 1)
                    .copied()
                    .ok_or(DfaError::InsufficientTableLags {
                        required: lag,
                        available: v.len(),
                    })
            }
        }
    }

    /// Autocovariance of the unit-lag increments,
    /// `γ_Δ(k) = (S(k+1) − 2S(k) + S(|k−1|)) / 2`, for `k = 0..len`.
    pub fn increment_acvf(&self, len: usize) -> Result<Vec<f64>> {
        self.validate()?;
        if let VariogramModel::Fbm { hurst, variance } = *self {
            return Ok((0..len)
                .map(|k| fgn_acvf_unchecked(hurst - 1.0, variance, k))
                .collect());
        }
        (0..len)
            .map(|k| {
                let up = self.variogram(k + 1)?;
                let mid = self.variogram(k)?;
                let down = self.variogram(k.abs_diff(1))?;
                Ok(0.5 * (up - 2.0 * mid + down))
            })
            .collect()
    }

    /// Tabulates `S(t) = 2(γ(0) − γ(t))` for `t = 1..=max_lag`.
    pub fn from_stationary(model: &AcvfModel, max_lag: usize) -> Result<Self> {
        let v = (1..=max_lag)
            .map(|t| stationary_to_variogram(model, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(VariogramModel::Table(v))
    }
}

/// `S(t) = 2γ(0) − 2γ(t)` for a stationary model.
pub fn stationary_to_variogram(model: &AcvfModel, lag: usize) -> Result<f64> {
    if lag == 0 {
        return Ok(0.0);
    }
    Ok(2.0 * (model.acvf(0)? - model.acvf(lag)?))
}

/// Either kind of second-order model.
///
/// Serialized as a tagged object, e.g. `{"kind": "fgn", "hurst": 0.7}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelSpec", into = "ModelSpec")]
pub enum CorrelationModel {
    Stationary(AcvfModel),
    Increments(VariogramModel),
}

impl CorrelationModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            CorrelationModel::Stationary(m) => m.validate(),
            CorrelationModel::Increments(m) => m.validate(),
        }
    }

    pub fn hurst(&self) -> Option<f64> {
        match self {
            CorrelationModel::Stationary(m) => m.hurst(),
            CorrelationModel::Increments(m) => m.hurst(),
        }
    }

    pub fn fgn(hurst: f64) -> Self {
        CorrelationModel::Stationary(AcvfModel::Fgn {
            hurst,
            variance: 1.0,
        })
    }

    pub fn fbm(hurst: f64) -> Self {
        CorrelationModel::Increments(VariogramModel::Fbm {
            hurst,
            variance: 1.0,
        })
    }

    /// Parses either JSON (`{"kind": "fgn", "hurst": 0.7}`) or the compact
    /// form `fgn,hurst=0.7[,variance=1]`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let value: serde_json::Value = if text.starts_with('{') {
            serde_json::from_str(text).map_err(|e| domain(format!("model JSON: {e}")))?
        } else {
            let mut parts = text.split(',');
            let kind = parts.next().unwrap_or_default().trim().to_ascii_lowercase();
            let mut obj = serde_json::Map::new();
            obj.insert("kind".into(), kind.into());
            for p in parts {
                let (k, v) = p.split_once('=').ok_or_else(|| {
                    domain(format!("expected key=value in model spec, got '{p}'"))
                })?;
                let key = match k.trim() {
                    "H" | "h" => "hurst",
                    "tau_c" => "tau",
                    "var" | "sigma2" | "gamma0" => "variance",
                    other => other,
                };
                let num: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| domain(format!("model parameter '{k}' is not a number")))?;
                obj.insert(key.into(), num.into());
            }
            serde_json::Value::Object(obj)
        };
        serde_json::from_value(value).map_err(|e| domain(format!("model spec: {e}")))
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum ModelSpec {
    White {
        #[serde(default = "one")]
        variance: f64,
    },
    Fgn {
        hurst: f64,
        #[serde(default = "one")]
        variance: f64,
    },
    Fbm {
        hurst: f64,
        #[serde(default = "one")]
        variance: f64,
    },
    Ou {
        tau: f64,
        #[serde(default = "one")]
        variance: f64,
    },
    Ar1 {
        phi: f64,
        #[serde(default = "one")]
        variance: f64,
    },
    Table {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        acvf: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        variogram: Option<Vec<f64>>,
    },
}

impl TryFrom<ModelSpec> for CorrelationModel {
    type Error = DfaError;

    fn try_from(spec: ModelSpec) -> Result<Self> {
        use CorrelationModel::{Increments, Stationary};
        let model = match spec {
            ModelSpec::White { variance } => Stationary(AcvfModel::WhiteNoise { variance }),
            ModelSpec::Fgn { hurst, variance } => Stationary(AcvfModel::Fgn { hurst, variance }),
            ModelSpec::Fbm { hurst, variance } => {
                Increments(VariogramModel::Fbm { hurst, variance })
            }
            ModelSpec::Ou { tau, variance } => Stationary(AcvfModel::Ou { tau, variance }),
            ModelSpec::Ar1 { phi, variance } => Stationary(AcvfModel::Ar1 { phi, variance }),
            ModelSpec::Table {
                acvf: Some(g),
                variogram: None,
            } => Stationary(AcvfModel::Table(g)),
            ModelSpec::Table {
                acvf: None,
                variogram: Some(v),
            } => Increments(VariogramModel::Table(v)),
            ModelSpec::Table { .. } => {
                return Err(domain(
                    "a table model needs exactly one of 'acvf' or 'variogram'",
                ))
            }
        };
        model.validate()?;
        Ok(model)
    }
}

impl From<CorrelationModel> for ModelSpec {
    fn from(m: CorrelationModel) -> Self {
        match m {
            CorrelationModel::Stationary(a) => match a {
                AcvfModel::WhiteNoise { variance } => ModelSpec::White { variance },
                AcvfModel::Fgn { hurst, variance } => ModelSpec::Fgn { hurst, variance },
                AcvfModel::Ou { tau, variance } => ModelSpec::Ou { tau, variance },
                AcvfModel::Ar1 { phi, variance } => ModelSpec::Ar1 { phi, variance },
                AcvfModel::Table(g) => ModelSpec::Table {
                    acvf: Some(g),
                    variogram: None,
                },
            },
            CorrelationModel::Increments(v) => match v {
                VariogramModel::Fbm { hurst, variance } => ModelSpec::Fbm { hurst, variance },
                VariogramModel::Table(s) => ModelSpec::Table {
                    acvf: None,
                    variogram: Some(s),
                },
            },
        }
    }
}
