#ifndef URNLAB_H
#define URNLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

/**
 * Small/large class as reported by [`urnlab_classify`].
 */
enum UrnlabKind
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  URNLAB_KIND_STRICTLY_SMALL = 0,
  URNLAB_KIND_CRITICALLY_SMALL = 1,
  URNLAB_KIND_LARGE = 2,
};
#ifndef __cplusplus
typedef int32_t UrnlabKind;
#endif // __cplusplus

/**
 * Result codes. Zero is success.
 */
enum UrnlabStatus
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  URNLAB_STATUS_OK = 0,
  URNLAB_STATUS_NULL_ARGUMENT = 1,
  URNLAB_STATUS_INVALID_UTF8 = 2,
  URNLAB_STATUS_SCHEMA = 3,
  URNLAB_STATUS_INVALID_URN = 4,
  URNLAB_STATUS_NOT_SMALL = 5,
  URNLAB_STATUS_BUDGET_EXCEEDED = 6,
  URNLAB_STATUS_NUMERICAL = 7,
  URNLAB_STATUS_DEGENERATE_DIRECTION = 8,
  URNLAB_STATUS_LEFT_ORTHANT = 9,
  URNLAB_STATUS_BUFFER_TOO_SMALL = 10,
  URNLAB_STATUS_CHECK_FAILED = 11,
  URNLAB_STATUS_PANIC = 12,
};
#ifndef __cplusplus
typedef int32_t UrnlabStatus;
#endif // __cplusplus

/**
 * Opaque urn handle.
 */
typedef struct UrnlabUrn UrnlabUrn;

typedef struct UrnlabClass {
  UrnlabKind kind;
  /**
   * Size of the largest critical Jordan block minus one.
   */
  uint32_t d;
  /**
   * Power of the logarithm in the variance: 0 or `2d + 1`.
   */
  uint32_t nu;
  /**
   * Largest real part among non-Perron eigenvalues, with `m = 1`.
   */
  double sigma2;
  /**
   * 1 when the decomposition is exact (rational).
   */
  int32_t exact;
} UrnlabClass;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or an empty string.
 * Valid until the next call into this library on the same thread.
 */
const char *urnlab_last_error(void);

/**
 * Parses an urn spec `{"R": [[...]], "X0": [...], "name": "..."}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
UrnlabStatus urnlab_urn_from_json(const char *json, struct UrnlabUrn **out);

/**
 * Builds an urn from an integer replacement matrix (`colors * colors`,
 * row-major) and initial composition (`colors`).
 *
 * # Safety
 * `r` and `x0` must point to that many readable values; `out` must be valid.
 */
UrnlabStatus urnlab_urn_new(uintptr_t colors,
                            const int64_t *r,
                            const int64_t *x0,
                            struct UrnlabUrn **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `urn` must be null or a handle not yet freed.
 */
void urnlab_urn_free(struct UrnlabUrn *urn);

/**
 * Number of colors, or 0 for a null handle.
 *
 * # Safety
 * `urn` must be null or a live handle.
 */
uintptr_t urnlab_urn_colors(const struct UrnlabUrn *urn);

/**
 * # Safety
 * `urn` must be a live handle and `out` a valid pointer.
 */
UrnlabStatus urnlab_classify(const struct UrnlabUrn *urn, struct UrnlabClass *out);

/**
 * Eigenvalues of the normalized replacement matrix, Perron root first, one
 * entry per Jordan index. `re` and `im` must hold `len >= colors` values.
 *
 * # Safety
 * `urn` must be a live handle; `re` and `im` must hold `len` doubles.
 */
UrnlabStatus urnlab_eigenvalues(const struct UrnlabUrn *urn, double *re, double *im, uintptr_t len);

/**
 * Simulates `n` steps; writes the `(n + 1) * colors` compositions row by row.
 *
 * # Safety
 * `urn` must be a live handle; `out` must hold `len` doubles.
 */
UrnlabStatus urnlab_simulate(const struct UrnlabUrn *urn,
                             uintptr_t n,
                             uint64_t seed,
                             double *out,
                             uintptr_t len);

/**
 * `E u^alpha(X_k)` for `k = 0..=n_max` on the normalized urn, where `u` are
 * the Jordan coordinates. `re` and `im` must hold `n_max + 1` values.
 *
 * # Safety
 * `urn` must be a live handle; `alpha` must hold `colors` values; `re` and
 * `im` must hold `len` doubles.
 */
UrnlabStatus urnlab_exact_moments(const struct UrnlabUrn *urn,
                                  const uint32_t *alpha,
                                  uintptr_t n_max,
                                  double *re,
                                  double *im,
                                  uintptr_t len);

/**
 * Simulated standardized moments `k = 1..=k_max` of `<w, X_n>`, with
 * bootstrap standard errors from 200 resamples.
 *
 * # Safety
 * `urn` must be a live handle; `w` must hold `colors` doubles; `values`
 * and `stderrs` must hold `k_max` doubles.
 */
UrnlabStatus urnlab_mc_moments(const struct UrnlabUrn *urn,
                               const double *w,
                               uintptr_t n,
                               uintptr_t samples,
                               uint64_t seed,
                               uint32_t k_max,
                               double *values,
                               double *stderrs);

/**
 * Runs the acceptance checks and returns the JSON report through `out`.
 * Returns `CheckFailed` (with the report still written) when a check fails.
 *
 * # Safety
 * `urn` must be a live handle and `out` a valid pointer.
 */
UrnlabStatus urnlab_verify_json(const struct UrnlabUrn *urn,
                                uintptr_t mc_samples,
                                uint64_t seed,
                                char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void urnlab_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* URNLAB_H */
