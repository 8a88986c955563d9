#ifndef COURNOT_H
#define COURNOT_H

/* Generated by cbindgen from the cournot-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every fallible call.
typedef enum CournotStatus {
  COURNOT_STATUS_OK = 0,
  // A pointer argument was null or a scalar argument was out of range.
  COURNOT_STATUS_INVALID_ARGUMENT = 1,
  // JSON or parameter validation failed.
  COURNOT_STATUS_CONFIG_PARSE = 2,
  // The market violates the mean-exceeds-cost assumption.
  COURNOT_STATUS_ASSUMPTION_VIOLATED = 3,
  // Numerical integration failed to converge.
  COURNOT_STATUS_QUADRATURE_FAILURE = 4,
  // A numeric evaluation was undefined (outside support, zero survival,
  // missing density, empty region).
  COURNOT_STATUS_NUMERIC_ERROR = 5,
  // Shape verdicts contradicted a proven implication.
  COURNOT_STATUS_INCONSISTENT_VERDICT = 6,
  // Filesystem access failed.
  COURNOT_STATUS_IO_ERROR = 7,
  // The argument was not valid UTF-8.
  COURNOT_STATUS_UTF8_ERROR = 8,
  // An internal invariant was violated; the library caught a panic.
  COURNOT_STATUS_PANIC = 9,
} CournotStatus;

// Opaque demand-distribution handle.
typedef struct CournotDist CournotDist;

// Opaque market handle (demand distribution, firm count, marginal cost).
typedef struct CournotMarket CournotMarket;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parse a demand distribution from its JSON spec, e.g.
// `{"family":"uniform","params":{"lo":0.0,"hi":1.0}}`.
//
// # Safety
// `json` must be a valid NUL-terminated C string; `out` must be a valid
// pointer. On `Ok` the caller owns the handle and must release it with
// [`cournot_dist_free`].
enum CournotStatus cournot_dist_from_json(const char *json, struct CournotDist **out);

// Create a new handle for the distribution scaled by `factor` (> 0).
//
// # Safety
// `dist` must be a live handle from this library; `out` must be valid. The
// new handle is owned by the caller.
enum CournotStatus cournot_dist_scale(const struct CournotDist *dist,
                                      double factor,
                                      struct CournotDist **out);

// Survival function `P(D > x)`.
//
// # Safety
// `dist` must be a live handle from this library; `out` must be a valid
// pointer.
enum CournotStatus cournot_dist_survival(const struct CournotDist *dist, double x, double *out);

// Probability density at `x`; fails with `NumericError` when the
// distribution carries no density.
//
// # Safety
// `dist` must be a live handle from this library; `out` must be a valid
// pointer.
enum CournotStatus cournot_dist_density(const struct CournotDist *dist, double x, double *out);

// Integrated survival `E[(D - x)+]`.
//
// # Safety
// `dist` must be a live handle from this library; `out` must be a valid
// pointer.
enum CournotStatus cournot_dist_integrated_survival(const struct CournotDist *dist,
                                                    double x,
                                                    double *out);

// Quantile at level `u` in [0, 1].
//
// # Safety
// `dist` must be a live handle from this library; `out` must be a valid
// pointer.
enum CournotStatus cournot_dist_quantile(const struct CournotDist *dist, double u, double *out);

// Hazard rate `f / S` at `x` (0 inside support gaps).
//
// # Safety
// `dist` must be a live handle from this library; `out` must be a valid
// pointer.
enum CournotStatus cournot_dist_hazard(const struct CournotDist *dist, double x, double *out);

// Generalized failure rate `x f / S` at `x`.
//
// # Safety
// `dist` must be a live handle from this library; `out` must be a valid
// pointer.
enum CournotStatus cournot_dist_gfr(const struct CournotDist *dist, double x, double *out);

// Mean residual demand `E[D - x | D > x]` at `x >= 0`.
//
// # Safety
// `dist` must be a live handle from this library; `out` must be a valid
// pointer.
enum CournotStatus cournot_dist_mrd(const struct CournotDist *dist, double x, double *out);

// Generalized mean residual demand `m(x) / x` at `x > 0`.
//
// # Safety
// `dist` must be a live handle from this library; `out` must be a valid
// pointer.
enum CournotStatus cournot_dist_gmrd(const struct CournotDist *dist, double x, double *out);

// Raw moment `E[D^k]`; writes `+inf` when the moment diverges.
//
// # Safety
// `dist` must be a live handle from this library; `out` must be valid.
enum CournotStatus cournot_dist_moment(const struct CournotDist *dist, uint32_t k, double *out);

// Mean of the distribution.
//
// # Safety
// `dist` must be a live handle from this library; `out` must be valid.
enum CournotStatus cournot_dist_mean(const struct CournotDist *dist, double *out);

// Release a distribution handle. Passing null is a no-op.
//
// # Safety
// `dist` must be null or a handle produced by this library that has not
// already been freed.
void cournot_dist_free(struct CournotDist *dist);

// Build a market from a demand handle (cloned into the market), a firm
// count `n >= 1`, and a marginal cost `c >= 0` below the mean.
//
// # Safety
// `dist` must be a live handle; `out` must be valid. The caller owns the
// returned handle and must release it with [`cournot_market_free`].
enum CournotStatus cournot_market_new(const struct CournotDist *dist,
                                      uint32_t n,
                                      double c,
                                      struct CournotMarket **out);

// The equilibrium indicator `L(X) = m(X) - c/S(X) - X/n`; equilibria are
// its zeros in total output.
//
// # Safety
// `market` must be a live handle; `out` must be valid.
enum CournotStatus cournot_market_l_value(const struct CournotMarket *market,
                                          double x_total,
                                          double *out);

// Expected market price `E[(D - X)+]` at total output `X`.
//
// # Safety
// `market` must be a live handle; `out` must be valid.
enum CournotStatus cournot_market_expected_price(const struct CournotMarket *market,
                                                 double x_total,
                                                 double *out);

// Release a market handle. Passing null is a no-op.
//
// # Safety
// `market` must be null or a handle produced by this library that has not
// already been freed.
void cournot_market_free(struct CournotMarket *market);

// Run the full analysis pipeline on a JSON configuration (same format as the
// CLI) and return the JSON report. Output paths in the config are ignored;
// no files are written.
//
// # Safety
// `config_json` must be a valid NUL-terminated C string; `out_report` must be
// valid. On `Ok` the caller owns the returned string and must release it with
// [`cournot_string_free`].
enum CournotStatus cournot_analyze_json(const char *config_json, char **out_report);

// Release a string returned by this library. Passing null is a no-op.
//
// # Safety
// `s` must be null or a string produced by this library that has not already
// been freed.
void cournot_string_free(char *s);

// Library version as a static NUL-terminated string; do not free.
const char *cournot_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COURNOT_H */
