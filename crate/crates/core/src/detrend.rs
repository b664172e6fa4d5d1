//! Polynomial detrending in a single window.
//!
//! For a window of length `s` and detrending order `m`, the design matrix `B`
//! is `(m+1) × s` with row `k` equal to `(1^k, 2^k, …, s^k)`. The hat matrix
//! `Q = Bᵀ(BBᵀ)⁻¹B` projects onto polynomials of degree at most `m`, and the
//! weight matrix `A = Dᵀ(I−Q)D` (with `D` the lower-triangular matrix of ones,
//! i.e. the cumulative-sum operator) expresses the residual variance directly
//! in the input values:
//!
//! ```text
//! F²_t(s) = (1/s) Yᵀ(I−Q)Y = (1/s) XᵀAX = −(1/2s) Σ_{k,j} a_{k,j} (X_k − X_j)²
//! ```
//!
//! All hot paths project with an orthonormal basis of the polynomial space
//! ([`PolyBasis`]) instead of inverting the Gram matrix `BBᵀ`, which is a
//! Hilbert-like matrix and becomes ill-conditioned quickly as `m` grows.

use nalgebra::DMatrix;

use crate::error::{DfaError, Result};

fn check_scale(order: usize, scale: usize, min: usize) -> Result<()> {
    if scale < min {
        Err(DfaError::ScaleTooSmall { order, scale, min })
    } else {
        Ok(())
    }
}

/// The `(m+1) × s` regression design matrix with entry `(k, t) = t^k` for
/// `t = 1..=s`.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    order: usize,
    scale: usize,
    entries: DMatrix<f64>,
}

impl DesignMatrix {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn scale(&self) -> usize {
        self.scale
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Row `k` (0-based, power `k`) as a vector of length `s`.
    pub fn row(&self, k: usize) -> Vec<f64> {
        self.entries.row(k).iter().copied().collect()
    }
}

pub fn build_design_matrix(order: usize, scale: usize) -> Result<DesignMatrix> {
    check_scale(order, scale, order + 2)?;
    let entries = DMatrix::from_fn(order + 1, scale, |k, t| ((t + 1) as f64).powi(k as i32));
    Ok(DesignMatrix {
        order,
        scale,
        entries,
    })
}

/// Explicit `s × s` projection `Q = Bᵀ(BBᵀ)⁻¹B`.
///
/// Built from a Householder QR of `Bᵀ` (with unit-norm columns), never from
/// an explicit inverse. Intended for validation and small scales; the
/// estimators use [`PolyBasis`] directly.
#[derive(Debug, Clone, PartialEq)]
pub struct HatMatrix {
    entries: DMatrix<f64>,
}

impl HatMatrix {
    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn scale(&self) -> usize {
        self.entries.nrows()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let x = nalgebra::DVector::from_column_slice(v);
        (&self.entries * x).iter().copied().collect()
    }

    /// `max |Q² − Q|`.
    pub fn idempotency_error(&self) -> f64 {
        let q2 = &self.entries * &self.entries;
        (q2 - &self.entries).amax()
    }

    /// `max |Q − Qᵀ|`.
    pub fn symmetry_error(&self) -> f64 {
        (&self.entries - self.entries.transpose()).amax()
    }
}

const RANK_TOL: f64 = 1e-12;

pub fn build_hat_matrix(b: &DesignMatrix) -> Result<HatMatrix> {
    let mut bt = b.entries.transpose();
    for mut col in bt.column_iter_mut() {
        let norm = col.norm();
        col /= norm;
    }
    let qr = bt.qr();
    let r = qr.r();
    let diag_max = r.diagonal().amax();
    if r.diagonal()
        .iter()
        .any(|d| d.abs() < RANK_TOL * diag_max.max(1.0))
    {
        return Err(DfaError::SingularGram {
            order: b.order,
            scale: b.scale,
        });
    }
    let u = qr.q();
    Ok(HatMatrix {
        entries: &u * u.transpose(),
    })
}

/// Orthonormal basis (columns of an `s × (m+1)` matrix) of the polynomials of
/// degree at most `m` sampled at `t = 1..=s`.
///
/// The basis is obtained by a Householder QR of Chebyshev polynomials in the
/// affinely mapped abscissa. That spans exactly the column space of `Bᵀ`, so
/// the projection `U Uᵀ` equals the hat matrix `Q`, but the factorization is
/// well-conditioned for every practical `(m, s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyBasis {
    order: usize,
    scale: usize,
    // column-major s × (m+1)
    columns: Vec<f64>,
}

impl PolyBasis {
    /// Requires `s ≥ m + 1` (the fit is then interpolating at `s = m + 1`).
    pub fn new(order: usize, scale: usize) -> Result<Self> {
        check_scale(order, scale, order + 1)?;
        let ncol = order + 1;
        if scale == 1 {
            return Ok(Self {
                order,
                scale,
                columns: vec![1.0],
            });
        }
        let half = (scale as f64 - 1.0) / 2.0;
        let mid = (scale as f64 + 1.0) / 2.0;
        let cheb = DMatrix::from_fn(scale, ncol, |i, k| {
            let x = ((i + 1) as f64 - mid) / half;
            chebyshev(k, x)
        });
        let qr = cheb.qr();
        let r = qr.r();
        let diag_max = r.diagonal().amax();
        if r.diagonal().iter().any(|d| d.abs() < RANK_TOL * diag_max) {
            return Err(DfaError::SingularGram { order, scale });
        }
        let q = qr.q();
        Ok(Self {
            order,
            scale,
            columns: q.as_slice().to_vec(),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn scale(&self) -> usize {
        self.scale
    }

    pub fn column(&self, c: usize) -> &[f64] {
        &self.columns[c * self.scale..(c + 1) * self.scale]
    }

    /// Replaces `buf` by `(I − Q) buf`. Projects twice so that the residual
    /// is orthogonal to the basis to working precision.
    pub fn project_out(&self, buf: &mut [f64]) {
        debug_assert_eq!(buf.len(), self.scale);
        for _ in 0..2 {
            for c in 0..=self.order {
                let col = self.column(c);
                let coef: f64 = col.iter().zip(buf.iter()).map(|(u, v)| u * v).sum();
                for (o, u) in buf.iter_mut().zip(col) {
                    *o -= coef * u;
                }
            }
        }
    }

    /// `(1/s) ‖(I − Q) y‖²`.
    pub fn residual_variance(&self, y: &[f64], scratch: &mut [f64]) -> f64 {
        if self.scale == self.order + 1 {
            return 0.0;
        }
        scratch.copy_from_slice(y);
        self.mean_square_residual(scratch)
    }

    /// Per-window residual variance of the raw values `x`: the profile is
    /// built inside the window, which gives the same value as windowing a
    /// global profile.
    pub fn window_f2(&self, x: &[f64], scratch: &mut [f64]) -> f64 {
        if self.scale == self.order + 1 {
            return 0.0;
        }
        let mut acc = 0.0;
        for (p, v) in scratch.iter_mut().zip(x) {
            acc += v;
            *p = acc;
        }
        self.mean_square_residual(scratch)
    }

    fn mean_square_residual(&self, buf: &mut [f64]) -> f64 {
        self.project_out(buf);
        buf.iter().map(|r| r * r).sum::<f64>() / self.scale as f64
    }

    /// `V = DᵀU`: reverse cumulative sums of each basis column.
    pub(crate) fn cumulated_columns(&self) -> Vec<Vec<f64>> {
        (0..=self.order)
            .map(|c| {
                let col = self.column(c);
                let mut v = vec![0.0; self.scale];
                let mut acc = 0.0;
                for i in (0..self.scale).rev() {
                    acc += col[i];
                    v[i] = acc;
                }
                v
            })
            .collect()
    }
}

fn chebyshev(k: usize, x: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut t0, mut t1) = (1.0, x);
            for _ in 2..=k {
                let t2 = 2.0 * x * t1 - t0;
                t0 = t1;
                t1 = t2;
            }
            t1
        }
    }
}

/// `A = Dᵀ(I−Q)D` for one `(m, s)` pair. Symmetric, positive semidefinite,
/// and for `m ≥ 1` every row sums to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    order: usize,
    scale: usize,
    // symmetric, stored column-major
    entries: Vec<f64>,
}

/// Largest scale for which [`WeightMatrix::from_basis`] forms `RᵀR`.
pub const PRODUCT_FORM_MAX_SCALE: usize = 512;

impl WeightMatrix {
    /// For `s ≤ PRODUCT_FORM_MAX_SCALE` built as `RᵀR` with `R = (I−Q)D`;
    /// entry errors then scale with `‖R‖`, which matters when `s` is close
    /// to `m + 1` and `A` is tiny. Larger scales use the `O(s²m)` form
    /// `DᵀD − VVᵀ` with `V = DᵀU`, where `U` is an orthonormal polynomial
    /// basis.
    pub fn from_basis(basis: &PolyBasis) -> Self {
        let s = basis.scale;
        let entries = if s <= PRODUCT_FORM_MAX_SCALE {
            let mut r = DMatrix::from_fn(s, s, |i, j| if i >= j { 1.0 } else { 0.0 });
            for mut col in r.column_iter_mut() {
                basis.project_out(col.as_mut_slice());
            }
            let a = r.tr_mul(&r);
            // exact symmetry
            let mut e = a.as_slice().to_vec();
            for j in 0..s {
                for i in j + 1..s {
                    e[i * s + j] = e[j * s + i];
                }
            }
            e
        } else {
            let v = basis.cumulated_columns();
            let mut e = vec![0.0; s * s];
            for j in 0..s {
                for i in j..s {
                    let dd = (s - i) as f64;
                    let vv: f64 = v.iter().map(|col| col[i] * col[j]).sum();
                    let a = dd - vv;
                    e[j * s + i] = a;
                    e[i * s + j] = a;
                }
            }
            e
        };
        Self {
            order: basis.order,
            scale: s,
            entries,
        }
    }

    /// Literal `Dᵀ(I−Q)D` from an explicit hat matrix. `O(s³)`; validation only.
    pub fn from_hat_matrix(order: usize, q: &HatMatrix) -> Self {
        let s = q.scale();
        let d = DMatrix::from_fn(s, s, |i, j| if i >= j { 1.0 } else { 0.0 });
        let a = d.transpose() * (DMatrix::identity(s, s) - q.entries()) * d;
        Self {
            order,
            scale: s,
            entries: a.as_slice().to_vec(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn scale(&self) -> usize {
        self.scale
    }

    #[inline]
    pub fn get(&self, k: usize, j: usize) -> f64 {
        self.entries[j * self.scale + k]
    }

    /// Row `k` (equal to column `k` by symmetry).
    #[inline]
    pub fn row(&self, k: usize) -> &[f64] {
        &self.entries[k * self.scale..(k + 1) * self.scale]
    }

    pub fn trace(&self) -> f64 {
        (0..self.scale).map(|k| self.get(k, k)).sum()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.scale).map(|k| self.row(k).iter().sum()).collect()
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_column_slice(self.scale, self.scale, &self.entries)
    }
}

pub fn build_weight_matrix(order: usize, scale: usize) -> Result<WeightMatrix> {
    check_scale(order, scale, order + 2)?;
    Ok(WeightMatrix::from_basis(&PolyBasis::new(order, scale)?))
}

/// A contiguous block `X(t+1..t+s)` of a series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window<'a> {
    pub offset: usize,
    pub values: &'a [f64],
}

impl<'a> Window<'a> {
    pub fn new(series: &'a [f64], offset: usize, len: usize) -> Result<Self> {
        let end = offset
            .checked_add(len)
            .filter(|&e| e <= series.len())
            .ok_or(DfaError::ScaleExceedsLength {
                scale: offset.saturating_add(len),
                len: series.len(),
            })?;
        Ok(Self {
            offset,
            values: &series[offset..end],
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Non-overlapping windows of length `scale` from the left; the tail of length
/// `n mod scale` is dropped.
pub fn windows(series: &[f64], scale: usize) -> impl Iterator<Item = Window<'_>> {
    series
        .chunks_exact(scale.max(1))
        .enumerate()
        .map(move |(i, values)| Window {
            offset: i * scale,
            values,
        })
}

/// Cumulative sum `Y(t) = Σ_{k≤t} X(k)`.
pub fn profile(series: &[f64]) -> Vec<f64> {
    series
        .iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

/// Mean squared residual of an order-`m` polynomial fit to a window of the
/// profile. Returns exactly 0 when `s = m + 1`.
pub fn residual_variance_direct(window_profile: &[f64], order: usize) -> Result<f64> {
    let s = window_profile.len();
    check_scale(order, s, order + 1)?;
    if s == order + 1 {
        return Ok(0.0);
    }
    let basis = PolyBasis::new(order, s)?;
    let mut scratch = vec![0.0; s];
    Ok(basis.residual_variance(window_profile, &mut scratch))
}

/// `(1/s) XᵀAX`.
pub fn residual_variance_quadratic(window: &[f64], a: &WeightMatrix) -> Result<f64> {
    let s = a.scale();
    if window.len() != s {
        return Err(DfaError::DimensionMismatch {
            expected: s,
            got: window.len(),
        });
    }
    let mut total = 0.0;
    for (k, xk) in window.iter().enumerate() {
        let ax: f64 = a.row(k).iter().zip(window).map(|(akj, xj)| akj * xj).sum();
        total += xk * ax;
    }
    Ok(total / s as f64)
}

/// `−(1/2s) Σ_{k,j} a_{k,j} (X_k − X_j)²`, summed over `k < j` and doubled.
/// Valid only for `m ≥ 1`, where `A𝟙 = 0`.
pub fn residual_variance_increment(window: &[f64], a: &WeightMatrix) -> Result<f64> {
    if a.order() == 0 {
        return Err(DfaError::OrderZeroUnsupported);
    }
    let s = a.scale();
    if window.len() != s {
        return Err(DfaError::DimensionMismatch {
            expected: s,
            got: window.len(),
        });
    }
    let mut total = 0.0;
    for k in 0..s {
        let row = a.row(k);
        let xk = window[k];
        let mut acc = 0.0;
        for j in k + 1..s {
            let d = xk - window[j];
            acc += row[j] * d * d;
        }
        total += acc;
    }
    Ok(-total / s as f64)
}
