#ifndef DFA_H
#define DFA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DfaStatus {
  DFA_STATUS_OK = 0,
  DFA_STATUS_NULL_POINTER = 1,
  DFA_STATUS_INVALID_ARGUMENT = 2,
  DFA_STATUS_DOMAIN = 3,
  DFA_STATUS_SCALE_TOO_SMALL = 4,
  DFA_STATUS_SCALE_EXCEEDS_LENGTH = 5,
  DFA_STATUS_INSUFFICIENT_LAGS = 6,
  DFA_STATUS_ALL_PAIRS_MISSING = 7,
  DFA_STATUS_TOO_FEW_POINTS = 8,
  DFA_STATUS_NUMERIC = 9,
  DFA_STATUS_PANIC = 10,
} DfaStatus;

typedef enum DfaEstimator {
  DFA_ESTIMATOR_STANDARD = 0,
  DFA_ESTIMATOR_F_HAT = 1,
  DFA_ESTIMATOR_F_TILDE = 2,
} DfaEstimator;

// Why a scale has no fluctuation value.
typedef enum DfaUndefined {
  DFA_UNDEFINED_DEFINED = 0,
  DFA_UNDEFINED_NEGATIVE_SQUARE = 1,
  DFA_UNDEFINED_NO_VALID_PAIRS = 2,
} DfaUndefined;

// Opaque fluctuation curve.
typedef struct DfaCurve DfaCurve;

// Opaque weight-function table `G(j, s)`, `j = 0..s`.
typedef struct DfaWeights DfaWeights;

typedef struct DfaScalePoint {
  size_t scale;
  // Raw squared fluctuation (may be negative or NaN when undefined).
  double f2;
  // `sqrt(f2)`, NaN when undefined.
  double f;
  size_t n_windows;
  enum DfaUndefined undefined;
} DfaScalePoint;

typedef struct DfaHurstFit {
  double hurst;
  double intercept;
  size_t s_min;
  size_t s_max;
  size_t n_points;
  double r_squared;
} DfaHurstFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. Valid until the
// next failing call on the same thread.
const char *dfa_last_error_message(void);

// Computes a fluctuation curve.
//
// `mask` may be NULL (all present); otherwise nonzero bytes mark present
// values. `DFA_ESTIMATOR_STANDARD` needs a complete series.
//
// # Safety
// `values` and (if non-NULL) `mask` must point to `len` elements, `scales`
// to `n_scales` elements, and `out` must be writable.
enum DfaStatus dfa_curve_compute(const double *values,
                                 const uint8_t *mask,
                                 size_t len,
                                 size_t order,
                                 const size_t *scales,
                                 size_t n_scales,
                                 enum DfaEstimator estimator,
                                 struct DfaCurve **out);

// Number of scales in a curve (0 for NULL).
//
// # Safety
// `curve` must be NULL or a live handle.
size_t dfa_curve_len(const struct DfaCurve *curve);

// # Safety
// `curve` must be a live handle and `out` writable.
enum DfaStatus dfa_curve_point(const struct DfaCurve *curve,
                               size_t index,
                               struct DfaScalePoint *out);

// Hurst exponent by log-log regression over `[s_min, s_max]`; pass
// `s_min = s_max = 0` for the default range.
//
// # Safety
// `curve` must be a live handle and `out` writable.
enum DfaStatus dfa_curve_hurst(const struct DfaCurve *curve,
                               size_t s_min,
                               size_t s_max,
                               struct DfaHurstFit *out);

// # Safety
// `curve` must be NULL or a handle not yet freed.
void dfa_curve_free(struct DfaCurve *curve);

// Weight function `G(j, s)` for one order and scale.
//
// # Safety
// `out` must be writable.
enum DfaStatus dfa_weights_new(size_t order, size_t scale, struct DfaWeights **out);

// # Safety
// `w` must be NULL or a live handle.
size_t dfa_weights_len(const struct DfaWeights *w);

// Pointer to `dfa_weights_len(w)` values, owned by the handle.
//
// # Safety
// `w` must be NULL or a live handle.
const double *dfa_weights_values(const struct DfaWeights *w);

// # Safety
// `w` must be NULL or a handle not yet freed.
void dfa_weights_free(struct DfaWeights *w);

// Exact asymptotic coefficients as a JSON string of rationals; release with
// [`dfa_string_free`].
//
// # Safety
// `out` must be writable.
enum DfaStatus dfa_asymptotic_coefficients_json(size_t order, char **out);

// # Safety
// `s` must be NULL or a string returned by this library and not yet freed.
void dfa_string_free(char *s);

// Asymptotic prefactor `λ` in `E F²(s) ~ λ s^{2H}`.
//
// # Safety
// `out` must be writable.
enum DfaStatus dfa_lambda(size_t order, double hurst, double *out);

// Exact `E F²(s)` for a model given as JSON or compact text
// (e.g. `"fgn,hurst=0.7"`).
//
// # Safety
// `model` must be a NUL-terminated string and `out` writable.
enum DfaStatus dfa_expected_f2(const char *model, size_t order, size_t scale, double *out);

// Fills `out[0..n]` with one realization of a model; `(seed, replicate)`
// select the random stream.
//
// # Safety
// `model` must be a NUL-terminated string and `out` must have room for `n`
// values.
enum DfaStatus dfa_simulate(const char *model,
                            size_t n,
                            uint64_t seed,
                            uint64_t replicate,
                            double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DFA_H */
