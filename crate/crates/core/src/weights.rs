//! The weight function `G(j, s) = Σ_k a_{k,k+j}` (sums along the diagonals of
//! the weight matrix) and its large-`s` asymptotics.
//!
//! Three routes to `G` are provided:
//!
//! - [`weight_function`]: numerically, for any order, from an orthonormal
//!   polynomial basis in `O(s² m)` without forming `A`;
//! - [`closed_form_g`] / [`closed_form_table`]: exact rational polynomials for
//!   DFA1 and DFA2;
//! - [`asymptotic_weight`]: the piecewise polynomial
//!   `Σ_q s^{2−q} j^q d_q` with exact coefficients from
//!   [`asymptotic_coefficients`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::detrend::{PolyBasis, WeightMatrix};
use crate::error::{domain, DfaError, Result};

/// `G(j, s)` for `j = 0..s`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightFunctionTable {
    order: usize,
    scale: usize,
    values: Vec<f64>,
}

impl WeightFunctionTable {
    pub fn new(order: usize, scale: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != scale {
            return Err(DfaError::DimensionMismatch {
                expected: scale,
                got: values.len(),
            });
        }
        Ok(Self {
            order,
            scale,
            values,
        })
    }

    /// Diagonal sums of an explicit weight matrix.
    pub fn from_weight_matrix(a: &WeightMatrix) -> Self {
        let s = a.scale();
        let values = (0..s)
            .map(|j| (0..s - j).map(|k| a.get(k, k + j)).sum())
            .collect();
        Self {
            order: a.order(),
            scale: s,
            values,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn scale(&self) -> usize {
        self.scale
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, j: usize) -> f64 {
        self.values[j]
    }

    /// `G(0,s) + 2 Σ_{j≥1} G(j,s)`, which vanishes for `m ≥ 1`.
    pub fn zero_sum_residual(&self) -> f64 {
        self.values[0] + 2.0 * self.values[1..].iter().sum::<f64>()
    }
}

/// Matrix-derived `G(j, s)` for any order.
pub fn weight_function(order: usize, scale: usize) -> Result<WeightFunctionTable> {
    if scale < order + 2 {
        return Err(DfaError::ScaleTooSmall {
            order,
            scale,
            min: order + 2,
        });
    }
    let basis = PolyBasis::new(order, scale)?;
    let v = basis.cumulated_columns();
    let s = scale;
    let values = (0..s)
        .map(|j| {
            // diagonal sum of DᵀD: Σ_{k=1}^{s−j} (s + 1 − k − j)
            let n = (s - j) as f64;
            let dd = n * (n + 1.0) / 2.0;
            let vv: f64 = v
                .iter()
                .map(|col| {
                    col[..s - j]
                        .iter()
                        .zip(&col[j..])
                        .map(|(a, b)| a * b)
                        .sum::<f64>()
                })
                .sum();
            dd - vv
        })
        .collect();
    Ok(WeightFunctionTable {
        order,
        scale,
        values,
    })
}

fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

fn closed_form_check(order: usize, j: usize, s: usize) -> Result<()> {
    if !(1..=2).contains(&order) {
        return Err(DfaError::UnsupportedOrder(order));
    }
    if s < order + 2 {
        return Err(DfaError::ScaleTooSmall {
            order,
            scale: s,
            min: order + 2,
        });
    }
    if j >= s {
        return Err(domain(format!("lag {j} outside 0..{s}")));
    }
    Ok(())
}

/// Closed-form `G(j, s)` for DFA1 and DFA2 as an exact rational.
pub fn closed_form_g_exact(order: usize, j: usize, s: usize) -> Result<BigRational> {
    closed_form_check(order, j, s)?;
    let (jj, ss) = (int(j as i64), int(s as i64));
    let cubic: BigInt = (&jj - &ss - 1) * (&jj - &ss) * (&jj - &ss + 1);
    let (num, den) = if order == 1 {
        let poly = int(3) * &jj * &jj + int(9) * &jj * &ss - int(2) * &ss * &ss + 8;
        (cubic * poly, int(30) * &ss * (&ss * &ss - 1))
    } else {
        let s2 = &ss * &ss;
        let j2 = &jj * &jj;
        let poly: BigInt = int(10) * &j2 * &j2
            + int(30) * &j2 * &jj * &ss
            + int(2) * &j2 * (int(9) * &s2 + 19)
            + int(2) * &jj * &ss * (int(67) - int(13) * &s2)
            + int(3) * (&s2 * &s2 - int(13) * &s2 + 36);
        (
            -(cubic * poly),
            int(70) * &ss * (&s2 * &s2 - int(5) * &s2 + 4),
        )
    };
    Ok(BigRational::new(num, den))
}

pub fn closed_form_g(order: usize, j: usize, s: usize) -> Result<f64> {
    Ok(rational_to_f64(&closed_form_g_exact(order, j, s)?))
}

/// Closed-form table for all lags, each entry rounded from its exact value.
pub fn closed_form_table(order: usize, scale: usize) -> Result<WeightFunctionTable> {
    let values = (0..scale)
        .map(|j| closed_form_g(order, j, scale))
        .collect::<Result<Vec<_>>>()?;
    Ok(WeightFunctionTable {
        order,
        scale,
        values,
    })
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `"p/q"` rendering used in JSON output.
pub fn rational_to_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(int(n), int(d))
}

/// Exact inverse of a square rational matrix by Gauss–Jordan elimination.
pub(crate) fn invert_rational(mat: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = mat.len();
    let mut aug: Vec<Vec<BigRational>> = mat
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !aug[r][c].is_zero())?;
        aug.swap(c, p);
        let pivot = aug[c][c].clone();
        for x in aug[c].iter_mut() {
            *x = &*x / &pivot;
        }
        for r in 0..n {
            if r != c && !aug[r][c].is_zero() {
                let f = aug[r][c].clone();
                let (top, bottom) = if r < c {
                    let (a, b) = aug.split_at_mut(c);
                    (&mut a[r], &b[0])
                } else {
                    let (a, b) = aug.split_at_mut(r);
                    (&mut b[0], &a[c])
                };
                for (x, y) in top.iter_mut().zip(bottom.iter()) {
                    *x = &*x - &f * y;
                }
            }
        }
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Leading-order inverse Gram matrix: `(BBᵀ)⁻¹_{d,l} ~ c̃_{d,l} / s^{d+l−1}`,
/// where `c̃` inverts the Hilbert matrix `1/(i+j−1)`. All entries are integers.
pub fn asymptotic_inverse_gram(order: usize) -> Vec<Vec<BigRational>> {
    let n = order + 1;
    let hilbert: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| frac(1, (i + j + 1) as i64)).collect())
        .collect();
    // the Hilbert matrix is nonsingular for every size
    invert_rational(&hilbert).expect("Hilbert matrix is invertible")
}

/// Exact coefficients of the asymptotic weight function for one order.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticCoefficients {
    pub order: usize,
    /// `d_0 ..= d_{2m+3}`.
    pub d: Vec<BigRational>,
    /// `c̃`, `(m+1) × (m+1)`.
    pub inverse_gram: Vec<Vec<BigRational>>,
    /// The three parts of `b_q = b_q⁽¹⁾ + b_q⁽²⁾ + b_q⁽³⁾`.
    pub b1: Vec<BigRational>,
    pub b2: Vec<BigRational>,
    pub b3: Vec<BigRational>,
}

impl AsymptoticCoefficients {
    pub fn d_f64(&self) -> Vec<f64> {
        self.d.iter().map(rational_to_f64).collect()
    }

    pub fn b(&self) -> Vec<BigRational> {
        self.b1
            .iter()
            .zip(&self.b2)
            .zip(&self.b3)
            .map(|((a, b), c)| a + b + c)
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let strs = |v: &[BigRational]| v.iter().map(rational_to_string).collect::<Vec<_>>();
        serde_json::json!({
            "order": self.order,
            "d": strs(&self.d),
            "b": strs(&self.b()),
            "inverse_gram": self.inverse_gram.iter().map(|r| strs(r)).collect::<Vec<_>>(),
        })
    }
}

/// `a_q^{(d,l)} = Σ_{r=0}^{min(l,q)} C(l,r) (−1)^{q−r} / (d+l+1−r) · C(d+l+1−r, d+l+1−q)`.
fn a_coefficient(q: usize, d: usize, l: usize) -> BigRational {
    let mut acc = BigRational::zero();
    if d + l + 1 < q {
        return acc;
    }
    for r in 0..=l.min(q) {
        let top = d + l + 1 - r;
        let sign = if (q - r).is_multiple_of(2) { 1 } else { -1 };
        let term = BigRational::new(
            binomial(l, r) * binomial(top, d + l + 1 - q) * sign,
            int(top as i64),
        );
        acc += term;
    }
    acc
}

pub fn asymptotic_coefficients(order: usize) -> Result<AsymptoticCoefficients> {
    if order == 0 {
        return Err(domain("asymptotic coefficients need order >= 1"));
    }
    let m = order;
    let n = m + 1;
    let inverse_gram = asymptotic_inverse_gram(m);
    // c[d][l] with 1-based d, l stored at [d-1][l-1]
    let c: Vec<Vec<BigRational>> = (1..=n)
        .map(|d| {
            (1..=n)
                .map(|l| {
                    &inverse_gram[d - 1][l - 1] / BigRational::from_integer(int((d * l) as i64))
                })
                .collect()
        })
        .collect();
    let cdl = |d: usize, l: usize| &c[d - 1][l - 1];
    let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|d| (1..=n).map(move |l| (d, l))).collect();
    let qmax = 2 * m + 3;

    let mut b1 = Vec::with_capacity(qmax + 1);
    let mut b2 = Vec::with_capacity(qmax + 1);
    let mut b3 = Vec::with_capacity(qmax + 1);
    for q in 0..=qmax {
        let v1 = match q {
            0 => pairs.iter().fold(BigRational::zero(), |acc, &(d, l)| {
                acc + cdl(d, l) - cdl(d, l) / BigRational::from_integer(int(l as i64 + 1))
            }),
            1 => -pairs
                .iter()
                .fold(BigRational::zero(), |acc, &(d, l)| acc + cdl(d, l)),
            q if q <= m + 2 => {
                (1..=n).fold(BigRational::zero(), |acc, d| acc + cdl(d, q - 1))
                    / BigRational::from_integer(int(q as i64))
            }
            _ => BigRational::zero(),
        };
        let v2 = match q {
            0 => -pairs.iter().fold(BigRational::zero(), |acc, &(d, l)| {
                acc + cdl(d, l) / BigRational::from_integer(int(d as i64 + 1))
            }),
            1 => pairs.iter().fold(BigRational::zero(), |acc, &(d, l)| {
                acc + cdl(d, l) * BigRational::from_integer(binomial(d + 1, d))
                    / BigRational::from_integer(int(d as i64 + 1))
            }),
            q if q <= m + 2 => {
                let sum = pairs.iter().filter(|&&(d, _)| d + 1 >= q).fold(
                    BigRational::zero(),
                    |acc, &(d, l)| {
                        acc + cdl(d, l) * BigRational::from_integer(binomial(d + 1, d + 1 - q))
                            / BigRational::from_integer(int(d as i64 + 1))
                    },
                );
                if q % 2 == 1 {
                    sum
                } else {
                    -sum
                }
            }
            _ => BigRational::zero(),
        };
        // constrained double sum: d + l ≥ q − 1, d, l ≥ 1
        let mut v3 = BigRational::zero();
        for &(d, l) in &pairs {
            if d + l + 1 >= q {
                v3 += a_coefficient(q, d, l) * cdl(d, l);
            }
        }
        b1.push(v1);
        b2.push(v2);
        b3.push(v3);
    }

    let half = frac(1, 2);
    let d = (0..=qmax)
        .map(|q| {
            let b = &b1[q] + &b2[q] + &b3[q];
            match q {
                0 => &half - b,
                1 => -BigRational::one() - b,
                2 => &half - b,
                _ => -b,
            }
        })
        .collect();
    Ok(AsymptoticCoefficients {
        order,
        d,
        inverse_gram,
        b1,
        b2,
        b3,
    })
}

/// `G_asym(j, s) = Σ_q s^{2−q} j^q d_q` for `j > 0`, `d_0 s²` at `j = 0`.
pub fn asymptotic_weight(coeffs: &AsymptoticCoefficients, j: usize, s: usize) -> f64 {
    let d = coeffs.d_f64();
    asymptotic_weight_f64(&d, j, s)
}

pub fn asymptotic_weight_f64(d: &[f64], j: usize, s: usize) -> f64 {
    let s_f = s as f64;
    if j == 0 {
        return d[0] * s_f * s_f;
    }
    let x = j as f64 / s_f;
    let poly = d.iter().rev().fold(0.0, |acc, dq| acc * x + dq);
    poly * s_f * s_f
}

/// True when every entry of a rational matrix is an integer.
pub fn is_integral(mat: &[Vec<BigRational>]) -> bool {
    mat.iter().flatten().all(|x| x.is_integer())
}

/// Largest absolute entry of a table, used as the normalization for
/// table-wide relative errors.
pub fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}
