//! Synthetic test signals with exactly known second-order structure, and
//! synthetic gap masks.
//!
//! Every draw comes from a ChaCha8 stream selected by `(seed, replicate)`, so
//! a replicate's output does not depend on which thread produced it.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{domain, DfaError, Result};
use crate::estimators::GappedSeries;
use crate::models::{AcvfModel, CorrelationModel, VariogramModel};

/// Largest length for which the dense Cholesky fallback is attempted.
pub const CHOLESKY_MAX_LEN: usize = 4096;

/// Random stream for one replicate of a seeded experiment.
pub fn rng_for(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

fn normals<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Exact Gaussian sampler for a stationary covariance `γ(0..n)` by embedding
/// its Toeplitz matrix in a circulant of size `2(n − 1)`.
#[derive(Clone)]
pub struct CirculantEmbedding {
    len: usize,
    // √(λ_k / M)
    scaled_roots: Vec<f64>,
    fft: Option<Arc<dyn Fft<f64>>>,
}

impl std::fmt::Debug for CirculantEmbedding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CirculantEmbedding")
            .field("len", &self.len)
            .finish()
    }
}

impl CirculantEmbedding {
    pub fn new(acvf: &[f64]) -> Result<Self> {
        let n = acvf.len();
        if n == 0 {
            return Err(DfaError::EmptySeries);
        }
        if n == 1 {
            return Ok(Self {
                len: 1,
                scaled_roots: vec![acvf[0].sqrt()],
                fft: None,
            });
        }
        let size = 2 * (n - 1);
        let mut buf: Vec<Complex<f64>> = (0..size)
            .map(|k| Complex::new(acvf[if k < n { k } else { size - k }], 0.0))
            .collect();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(size);
        fft.process(&mut buf);
        let max = buf.iter().fold(0.0_f64, |m, c| m.max(c.re.abs()));
        let mut scaled_roots = Vec::with_capacity(size);
        for (k, c) in buf.iter().enumerate() {
            let lam = c.re;
            if lam < -1e-10 * max {
                return Err(DfaError::EmbeddingFailure(format!(
                    "circulant eigenvalue {k} is {lam:.3e} for length {n}"
                )));
            }
            scaled_roots.push((lam.max(0.0) / size as f64).sqrt());
        }
        Ok(Self {
            len: n,
            scaled_roots,
            fft: Some(fft),
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Circulant eigenvalues `λ_k`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let m = self.scaled_roots.len() as f64;
        self.scaled_roots.iter().map(|r| r * r * m).collect()
    }

    /// The covariance the sampler realizes, recovered from the eigenvalues
    /// by an inverse transform; equals the input at lags `0..n`.
    pub fn realized_acvf(&self) -> Vec<f64> {
        let Some(fft) = &self.fft else {
            return vec![self.scaled_roots[0].powi(2)];
        };
        let size = self.scaled_roots.len();
        let mut buf: Vec<Complex<f64>> = self
            .eigenvalues()
            .into_iter()
            .map(|l| Complex::new(l, 0.0))
            .collect();
        // the spectrum is real and even, so a forward transform inverts it
        fft.process(&mut buf);
        buf.iter()
            .take(self.len)
            .map(|c| c.re / size as f64)
            .collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let Some(fft) = &self.fft else {
            return vec![self.scaled_roots[0] * rng.sample::<f64, _>(StandardNormal)];
        };
        let mut buf: Vec<Complex<f64>> = self
            .scaled_roots
            .iter()
            .map(|&r| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex::new(r * re, r * im)
            })
            .collect();
        fft.process(&mut buf);
        buf.iter().take(self.len).map(|c| c.re).collect()
    }
}

/// Dense Cholesky sampler, used when circulant embedding fails.
#[derive(Debug, Clone)]
pub struct CholeskySampler {
    factor: DMatrix<f64>,
}

impl CholeskySampler {
    pub fn new(acvf: &[f64]) -> Result<Self> {
        let n = acvf.len();
        if n == 0 {
            return Err(DfaError::EmptySeries);
        }
        if n > CHOLESKY_MAX_LEN {
            return Err(DfaError::EmbeddingFailure(format!(
                "length {n} exceeds the dense fallback limit {CHOLESKY_MAX_LEN}"
            )));
        }
        let cov = DMatrix::from_fn(n, n, |i, j| acvf[i.abs_diff(j)]);
        let chol = cov.cholesky().ok_or_else(|| {
            DfaError::EmbeddingFailure("covariance is not positive definite".into())
        })?;
        Ok(Self {
            factor: chol.unpack(),
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let z = nalgebra::DVector::from_vec(normals(rng, self.factor.nrows()));
        (&self.factor * z).as_slice().to_vec()
    }
}

/// Sampler for a stationary Gaussian process with a given covariance.
#[derive(Debug, Clone)]
pub enum GaussianSampler {
    Circulant(CirculantEmbedding),
    Cholesky(CholeskySampler),
}

impl GaussianSampler {
    pub fn new(acvf: &[f64]) -> Result<Self> {
        match CirculantEmbedding::new(acvf) {
            Ok(c) => Ok(GaussianSampler::Circulant(c)),
            Err(DfaError::EmbeddingFailure(msg)) => CholeskySampler::new(acvf)
                .map(GaussianSampler::Cholesky)
                .map_err(|e| DfaError::EmbeddingFailure(format!("{msg}; fallback: {e}"))),
            Err(e) => Err(e),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            GaussianSampler::Circulant(c) => c.sample(rng),
            GaussianSampler::Cholesky(c) => c.sample(rng),
        }
    }
}

fn cumsum(x: &[f64]) -> Vec<f64> {
    x.iter()
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect()
}

/// Fractional Gaussian noise, `H ∈ (0, 1)`.
pub fn gen_fgn<R: Rng + ?Sized>(
    hurst: f64,
    variance: f64,
    n: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let acvf = AcvfModel::Fgn { hurst, variance }.acvf_vec(n)?;
    Ok(GaussianSampler::new(&acvf)?.sample(rng))
}

/// Fractional Brownian motion `X(1..n)` with `H ∈ (1, 2)`: the cumulative sum
/// of fGn with exponent `H − 1`.
pub fn gen_fbm<R: Rng + ?Sized>(
    hurst: f64,
    variance: f64,
    n: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    VariogramModel::Fbm { hurst, variance }.validate()?;
    Ok(cumsum(&gen_fgn(hurst - 1.0, variance, n, rng)?))
}

/// Stationary AR(1), started from its stationary distribution.
pub fn gen_ar1<R: Rng + ?Sized>(
    phi: f64,
    variance: f64,
    n: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    AcvfModel::Ar1 { phi, variance }.validate()?;
    let innovation = (variance * (1.0 - phi * phi)).sqrt();
    let mut out = Vec::with_capacity(n);
    let mut x = variance.sqrt() * rng.sample::<f64, _>(StandardNormal);
    for t in 0..n {
        if t > 0 {
            x = phi * x + innovation * rng.sample::<f64, _>(StandardNormal);
        }
        out.push(x);
    }
    Ok(out)
}

/// Ornstein–Uhlenbeck process sampled at unit spacing (an AR(1) with
/// `φ = exp(−1/τ_c)`).
pub fn gen_ou<R: Rng + ?Sized>(tau: f64, variance: f64, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    AcvfModel::Ou { tau, variance }.validate()?;
    gen_ar1((-1.0 / tau).exp(), variance, n, rng)
}

pub fn gen_white<R: Rng + ?Sized>(variance: f64, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    AcvfModel::WhiteNoise { variance }.validate()?;
    let sd = variance.sqrt();
    Ok(normals(rng, n).into_iter().map(|z| sd * z).collect())
}

/// Gaussian random walk `X(1..n)` with unit-variance steps scaled by `σ`.
pub fn gen_random_walk<R: Rng + ?Sized>(variance: f64, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    Ok(cumsum(&gen_white(variance, n, rng)?))
}

/// A reusable sampler for any correlation model at a fixed length.
#[derive(Debug, Clone)]
pub enum ModelSampler {
    White {
        sd: f64,
    },
    Ar1 {
        phi: f64,
        variance: f64,
    },
    Gaussian(GaussianSampler),
    /// Cumulative sum of the inner stationary sampler.
    Integrated(Box<ModelSampler>),
}

impl ModelSampler {
    pub fn new(model: &CorrelationModel, n: usize) -> Result<Self> {
        model.validate()?;
        if n == 0 {
            return Err(DfaError::EmptySeries);
        }
        Ok(match model {
            CorrelationModel::Stationary(m) => Self::stationary(m, n)?,
            CorrelationModel::Increments(VariogramModel::Fbm { hurst, variance })
                if *hurst == 1.5 =>
            {
                ModelSampler::Integrated(Box::new(ModelSampler::White {
                    sd: variance.sqrt(),
                }))
            }
            CorrelationModel::Increments(v) => {
                let inc = v.increment_acvf(n)?;
                ModelSampler::Integrated(Box::new(ModelSampler::Gaussian(GaussianSampler::new(
                    &inc,
                )?)))
            }
        })
    }

    fn stationary(model: &AcvfModel, n: usize) -> Result<Self> {
        Ok(match *model {
            AcvfModel::WhiteNoise { variance } => ModelSampler::White {
                sd: variance.sqrt(),
            },
            AcvfModel::Ar1 { phi, variance } => ModelSampler::Ar1 { phi, variance },
            AcvfModel::Ou { tau, variance } => ModelSampler::Ar1 {
                phi: (-1.0 / tau).exp(),
                variance,
            },
            AcvfModel::Fgn {
                hurst: 0.5,
                variance,
            } => ModelSampler::White {
                sd: variance.sqrt(),
            },
            ref m => ModelSampler::Gaussian(GaussianSampler::new(&m.acvf_vec(n)?)?),
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        match self {
            ModelSampler::White { sd } => normals(rng, n).into_iter().map(|z| sd * z).collect(),
            ModelSampler::Ar1 { phi, variance } => {
                gen_ar1(*phi, *variance, n, rng).expect("parameters validated at construction")
            }
            ModelSampler::Gaussian(g) => g.sample(rng),
            ModelSampler::Integrated(inner) => cumsum(&inner.sample(n, rng)),
        }
    }
}

/// One realization of a model.
pub fn simulate<R: Rng + ?Sized>(
    model: &CorrelationModel,
    n: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    Ok(ModelSampler::new(model, n)?.sample(n, rng))
}

/// Model, length and random stream of one synthetic series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    pub model: CorrelationModel,
    pub n: usize,
    pub seed: u64,
    #[serde(default)]
    pub replicate: u64,
}

impl SimSpec {
    pub fn generate(&self) -> Result<Vec<f64>> {
        if self.n < 2 {
            return Err(domain(format!(
                "series length must be at least 2 (got {})",
                self.n
            )));
        }
        simulate(&self.model, self.n, &mut rng_for(self.seed, self.replicate))
    }
}

/// Adds `Σ_q c_q t^q` at times `t = 1..=n`.
pub fn add_polynomial_trend(series: &mut [f64], coeffs: &[f64]) {
    for (i, x) in series.iter_mut().enumerate() {
        let t = (i + 1) as f64;
        *x += coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c);
    }
}

/// Random block gaps covering a fixed fraction of the series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockMaskSpec {
    pub gap_fraction: f64,
    pub mean_block_length: f64,
}

/// Splits `total` into `parts` nonnegative integers uniformly over all
/// compositions.
fn weak_composition<R: Rng + ?Sized>(total: usize, parts: usize, rng: &mut R) -> Vec<usize> {
    if parts == 0 {
        return Vec::new();
    }
    // stars and bars: choose the bar positions among total + parts − 1 slots
    let slots = total + parts - 1;
    let mut bars = index::sample(rng, slots, parts - 1).into_vec();
    bars.sort_unstable();
    let mut out = Vec::with_capacity(parts);
    let mut next = 0;
    for b in bars {
        out.push(b - next);
        next = b + 1;
    }
    out.push(slots - next);
    out
}

/// Block-gap mask (`true` = present) with exactly `round(f·n)` missing
/// points in about `missing / mean_block_length` separated blocks.
pub fn block_gap_mask<R: Rng + ?Sized>(
    n: usize,
    spec: &BlockMaskSpec,
    rng: &mut R,
) -> Result<Vec<bool>> {
    let BlockMaskSpec {
        gap_fraction: f,
        mean_block_length: len,
    } = *spec;
    if !(0.0..1.0).contains(&f) {
        return Err(domain(format!("gap fraction must lie in [0, 1) (got {f})")));
    }
    if !(len >= 1.0 && len.is_finite()) {
        return Err(domain(format!(
            "mean block length must be at least 1 (got {len})"
        )));
    }
    let missing = (f * n as f64).round() as usize;
    if missing == 0 {
        return Ok(vec![true; n]);
    }
    let present = n - missing;
    let blocks = ((missing as f64 / len).round() as usize)
        .clamp(1, missing)
        .min(present + 1);
    // each block length ≥ 1
    let block_lens: Vec<usize> = weak_composition(missing - blocks, blocks, rng)
        .into_iter()
        .map(|b| b + 1)
        .collect();
    // runs of present values: blocks+1 of them, interior runs ≥ 1
    let interior = blocks - 1;
    let mut runs = weak_composition(present - interior, blocks + 1, rng);
    for r in &mut runs[1..blocks] {
        *r += 1;
    }
    let mut mask = Vec::with_capacity(n);
    for (b, &gap) in block_lens.iter().enumerate() {
        mask.extend(std::iter::repeat_n(true, runs[b]));
        mask.extend(std::iter::repeat_n(false, gap));
    }
    mask.extend(std::iter::repeat_n(true, runs[blocks]));
    debug_assert_eq!(mask.len(), n);
    Ok(mask)
}

pub fn apply_gap_mask(values: Vec<f64>, mask: Vec<bool>) -> Result<GappedSeries> {
    GappedSeries::new(values, mask)
}
