//! C ABI over `dfa-core`.
//!
//! Every function returns a [`DfaStatus`]; on failure a message is available
//! from [`dfa_last_error_message`] on the same thread. Objects are opaque
//! handles released with their `_free` function. Panics never cross the
//! boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use dfa_core::estimators::{
    estimate, estimate_hurst, Estimator, FluctuationCurve, GappedSeries, UndefinedReason,
    WindowPolicy,
};
use dfa_core::expectation::{asymptotic_lambda, expected_f2};
use dfa_core::generators::{rng_for, simulate};
use dfa_core::models::CorrelationModel;
use dfa_core::weights::{asymptotic_coefficients, weight_function, WeightFunctionTable};
use dfa_core::DfaError;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DfaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    ScaleTooSmall = 4,
    ScaleExceedsLength = 5,
    InsufficientLags = 6,
    AllPairsMissing = 7,
    TooFewPoints = 8,
    Numeric = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DfaEstimator {
    Standard = 0,
    FHat = 1,
    FTilde = 2,
}

/// Why a scale has no fluctuation value.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DfaUndefined {
    Defined = 0,
    NegativeSquare = 1,
    NoValidPairs = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DfaScalePoint {
    pub scale: usize,
    /// Raw squared fluctuation (may be negative or NaN when undefined).
    pub f2: f64,
    /// `sqrt(f2)`, NaN when undefined.
    pub f: f64,
    pub n_windows: usize,
    pub undefined: DfaUndefined,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DfaHurstFit {
    pub hurst: f64,
    pub intercept: f64,
    pub s_min: usize,
    pub s_max: usize,
    pub n_points: usize,
    pub r_squared: f64,
}

/// Opaque fluctuation curve.
pub struct DfaCurve(FluctuationCurve);

/// Opaque weight-function table `G(j, s)`, `j = 0..s`.
pub struct DfaWeights(WeightFunctionTable);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &DfaError) -> DfaStatus {
    match e {
        DfaError::ScaleTooSmall { .. } => DfaStatus::ScaleTooSmall,
        DfaError::ScaleExceedsLength { .. } => DfaStatus::ScaleExceedsLength,
        DfaError::InsufficientTableLags { .. } => DfaStatus::InsufficientLags,
        DfaError::AllPairsMissing { .. } => DfaStatus::AllPairsMissing,
        DfaError::TooFewPoints { .. } => DfaStatus::TooFewPoints,
        DfaError::DimensionMismatch { .. } | DfaError::EmptySeries => DfaStatus::InvalidArgument,
        DfaError::SingularGram { .. }
        | DfaError::EmbeddingFailure(_)
        | DfaError::NonpositiveCorrection(_) => DfaStatus::Numeric,
        _ => DfaStatus::Domain,
    }
}

struct Failure(DfaStatus, String);

impl From<DfaError> for Failure {
    fn from(e: DfaError) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(DfaStatus::NullPointer, format!("{what} is null"))
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> DfaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DfaStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            DfaStatus::Panic
        }
    }
}

unsafe fn slice_in<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn model_in(json: *const c_char) -> Result<CorrelationModel, Failure> {
    if json.is_null() {
        return Err(null("model"));
    }
    let text = CStr::from_ptr(json)
        .to_str()
        .map_err(|_| Failure(DfaStatus::InvalidArgument, "model is not UTF-8".into()))?;
    Ok(CorrelationModel::parse(text)?)
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dfa_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Computes a fluctuation curve.
///
/// `mask` may be NULL (all present); otherwise nonzero bytes mark present
/// values. `DFA_ESTIMATOR_STANDARD` needs a complete series.
///
/// # Safety
/// `values` and (if non-NULL) `mask` must point to `len` elements, `scales`
/// to `n_scales` elements, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dfa_curve_compute(
    values: *const f64,
    mask: *const u8,
    len: usize,
    order: usize,
    scales: *const usize,
    n_scales: usize,
    estimator: DfaEstimator,
    out: *mut *mut DfaCurve,
) -> DfaStatus {
    guard(|| {
        let x = slice_in(values, len, "values")?.to_vec();
        let mask = if mask.is_null() {
            vec![true; len]
        } else {
            slice_in(mask, len, "mask")?
                .iter()
                .map(|&b| b != 0)
                .collect()
        };
        let scales = slice_in(scales, n_scales, "scales")?;
        let gs = GappedSeries::new(x, mask)?;
        let est = match estimator {
            DfaEstimator::Standard => Estimator::Standard,
            DfaEstimator::FHat => Estimator::FHat,
            DfaEstimator::FTilde => Estimator::FTilde,
        };
        let curve = estimate(&gs, est, order, scales, WindowPolicy::AllWindows)?;
        write_out(out, Box::into_raw(Box::new(DfaCurve(curve))))
    })
}

/// Number of scales in a curve (0 for NULL).
///
/// # Safety
/// `curve` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dfa_curve_len(curve: *const DfaCurve) -> usize {
    curve.as_ref().map_or(0, |c| c.0.points.len())
}

/// # Safety
/// `curve` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dfa_curve_point(
    curve: *const DfaCurve,
    index: usize,
    out: *mut DfaScalePoint,
) -> DfaStatus {
    guard(|| {
        let c = curve.as_ref().ok_or_else(|| null("curve"))?;
        let p = c.0.points.get(index).ok_or_else(|| {
            Failure(
                DfaStatus::InvalidArgument,
                format!("index {index} out of range"),
            )
        })?;
        let undefined = match p.undefined {
            None => DfaUndefined::Defined,
            Some(UndefinedReason::NegativeSquare) => DfaUndefined::NegativeSquare,
            Some(UndefinedReason::NoValidPairs) => DfaUndefined::NoValidPairs,
        };
        write_out(
            out,
            DfaScalePoint {
                scale: p.scale,
                f2: p.f2,
                f: p.f().unwrap_or(f64::NAN),
                n_windows: p.n_windows,
                undefined,
            },
        )
    })
}

/// Hurst exponent by log-log regression over `[s_min, s_max]`; pass
/// `s_min = s_max = 0` for the default range.
///
/// # Safety
/// `curve` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dfa_curve_hurst(
    curve: *const DfaCurve,
    s_min: usize,
    s_max: usize,
    out: *mut DfaHurstFit,
) -> DfaStatus {
    guard(|| {
        let c = curve.as_ref().ok_or_else(|| null("curve"))?;
        let range = (s_min != 0 || s_max != 0).then_some((s_min, s_max));
        let fit = estimate_hurst(&c.0, range)?;
        write_out(
            out,
            DfaHurstFit {
                hurst: fit.hurst,
                intercept: fit.intercept,
                s_min: fit.fit_range.0,
                s_max: fit.fit_range.1,
                n_points: fit.n_points,
                r_squared: fit.r_squared,
            },
        )
    })
}

/// # Safety
/// `curve` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dfa_curve_free(curve: *mut DfaCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Weight function `G(j, s)` for one order and scale.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dfa_weights_new(
    order: usize,
    scale: usize,
    out: *mut *mut DfaWeights,
) -> DfaStatus {
    guard(|| {
        let g = weight_function(order, scale)?;
        write_out(out, Box::into_raw(Box::new(DfaWeights(g))))
    })
}

/// # Safety
/// `w` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dfa_weights_len(w: *const DfaWeights) -> usize {
    w.as_ref().map_or(0, |w| w.0.values().len())
}

/// Pointer to `dfa_weights_len(w)` values, owned by the handle.
///
/// # Safety
/// `w` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dfa_weights_values(w: *const DfaWeights) -> *const f64 {
    w.as_ref().map_or(ptr::null(), |w| w.0.values().as_ptr())
}

/// # Safety
/// `w` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dfa_weights_free(w: *mut DfaWeights) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Exact asymptotic coefficients as a JSON string of rationals; release with
/// [`dfa_string_free`].
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dfa_asymptotic_coefficients_json(
    order: usize,
    out: *mut *mut c_char,
) -> DfaStatus {
    guard(|| {
        let json = asymptotic_coefficients(order)?.to_json().to_string();
        let c = CString::new(json).map_err(|e| Failure(DfaStatus::Numeric, e.to_string()))?;
        write_out(out, c.into_raw())
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dfa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Asymptotic prefactor `λ` in `E F²(s) ~ λ s^{2H}`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dfa_lambda(order: usize, hurst: f64, out: *mut f64) -> DfaStatus {
    guard(|| write_out(out, asymptotic_lambda(order, hurst)?.lambda))
}

/// Exact `E F²(s)` for a model given as JSON or compact text
/// (e.g. `"fgn,hurst=0.7"`).
///
/// # Safety
/// `model` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dfa_expected_f2(
    model: *const c_char,
    order: usize,
    scale: usize,
    out: *mut f64,
) -> DfaStatus {
    guard(|| {
        let m = model_in(model)?;
        write_out(out, expected_f2(&m, order, scale)?)
    })
}

/// Fills `out[0..n]` with one realization of a model; `(seed, replicate)`
/// select the random stream.
///
/// # Safety
/// `model` must be a NUL-terminated string and `out` must have room for `n`
/// values.
#[no_mangle]
pub unsafe extern "C" fn dfa_simulate(
    model: *const c_char,
    n: usize,
    seed: u64,
    replicate: u64,
    out: *mut f64,
) -> DfaStatus {
    guard(|| {
        let m = model_in(model)?;
        if out.is_null() {
            return Err(null("output buffer"));
        }
        let x = simulate(&m, n, &mut rng_for(seed, replicate))?;
        slice::from_raw_parts_mut(out, n).copy_from_slice(&x);
        Ok(())
    })
}
