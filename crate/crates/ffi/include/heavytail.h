/* C interface to the heavytail analysis library. */

#ifndef HEAVYTAIL_H
#define HEAVYTAIL_H

/* Generated by cbindgen from heavytail-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Entropy functional selector.
typedef enum HtEntropy {
  HT_ENTROPY_SHANNON = 0,
  HT_ENTROPY_TSALLIS = 1,
} HtEntropy;

// Distribution family of a fit or generator.
typedef enum HtFamily {
  HT_FAMILY_EXPONENTIAL = 0,
  HT_FAMILY_PARETO = 1,
  HT_FAMILY_Q_EXPONENTIAL = 2,
} HtFamily;

// Estimation method of a fit.
typedef enum HtMethod {
  HT_METHOD_REGRESSION = 0,
  HT_METHOD_MLE = 1,
} HtMethod;

// Status code returned by every fallible call.
typedef enum HtStatus {
  HT_OK = 0,
  HT_NULL_POINTER = 1,
  HT_INVALID_ARGUMENT = 2,
  HT_INSUFFICIENT_TAIL = 3,
  HT_ZERO_VARIANCE = 4,
  HT_INFEASIBLE = 5,
  HT_SOLVER_FAILURE = 6,
  HT_DOMAIN_ERROR = 7,
  HT_CONFIG_ERROR = 8,
} HtStatus;

// Opaque sample handle.
typedef struct HtSample HtSample;

// A fitted tail model. `r_squared` is NaN for maximum-likelihood fits.
typedef struct HtTailFit {
  enum HtFamily family;
  enum HtMethod method;
  double exponent;
  double cutoff;
  double r_squared;
  double std_error;
} HtTailFit;

// Rank-size regression result.
typedef struct HtZipfFit {
  double gamma;
  size_t top_k;
  double intercept;
  double r_squared;
} HtZipfFit;

// Parametric-bootstrap KS report. Critical values are the replicate KS
// quantiles at the 10%, 5%, and 1% significance levels.
typedef struct HtBootstrapReport {
  double observed_ks;
  size_t n_replicates;
  double p_value;
  double critical_10;
  double critical_05;
  double critical_01;
} HtBootstrapReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *ht_version(void);

// Message for the most recent failure on this thread, or NULL. The pointer
// stays valid until the next failing call on the same thread.
const char *ht_last_error_message(void);

// Create a sample from `len` positive values.
//
// # Safety
// `values` must point to `len` readable doubles and `out` to a writable
// pointer slot. Free the handle with [`ht_sample_free`].
enum HtStatus ht_sample_new(const double *values, size_t len, struct HtSample **out);

// Release a sample handle. NULL is ignored.
//
// # Safety
// `sample` must be a handle from this library that has not been freed.
void ht_sample_free(struct HtSample *sample);

// Number of values in a sample.
//
// # Safety
// `sample` must be a live handle from this library.
size_t ht_sample_len(const struct HtSample *sample);

// Divide every value by the sample standard deviation (n−1 denominator),
// producing a new handle and reporting the scale divided out.
//
// # Safety
// Pointer arguments as in [`ht_sample_new`].
enum HtStatus ht_sample_standardize(const struct HtSample *sample,
                                    struct HtSample **out,
                                    double *out_scale);

// Hill/MLE power-law fit on the values at or above `cutoff`.
//
// # Safety
// `sample` must be a live handle; `out` must be writable.
enum HtStatus ht_fit_power_mle(const struct HtSample *sample, double cutoff, struct HtTailFit *out);

// Log-log tail regression on the values at or above `cutoff`.
//
// # Safety
// As [`ht_fit_power_mle`].
enum HtStatus ht_fit_power_regression(const struct HtSample *sample,
                                      double cutoff,
                                      struct HtTailFit *out);

// Exponential fit: fixed-intercept regression when `has_fixed_intercept`,
// otherwise the shifted-exponential MLE.
//
// # Safety
// As [`ht_fit_power_mle`].
enum HtStatus ht_fit_exponential(const struct HtSample *sample,
                                 bool has_fixed_intercept,
                                 double fixed_intercept_at,
                                 struct HtTailFit *out);

// Rank-size regression over the `top_k` largest values.
//
// # Safety
// As [`ht_fit_power_mle`].
enum HtStatus ht_fit_zipf(const struct HtSample *sample, size_t top_k, struct HtZipfFit *out);

// Two-sided KS statistic of the tail at or above `cutoff` against a fitted
// family with the given exponent anchored at the cutoff.
//
// # Safety
// As [`ht_fit_power_mle`].
enum HtStatus ht_ks_statistic(const struct HtSample *sample,
                              double cutoff,
                              enum HtFamily family,
                              double exponent,
                              double *out);

// Parametric-bootstrap KS test of the tail at or above `fit.cutoff`.
//
// # Safety
// `fit` must point to a readable fit struct; other pointers as in
// [`ht_fit_power_mle`].
enum HtStatus ht_bootstrap_test(const struct HtSample *sample,
                                const struct HtTailFit *fit,
                                size_t n_replicates,
                                uint64_t seed,
                                bool refit,
                                struct HtBootstrapReport *out);

// Gini coefficient of the sample.
//
// # Safety
// As [`ht_fit_power_mle`].
enum HtStatus ht_gini(const struct HtSample *sample, double *out);

// Share of the total held by the top `fraction` of the population.
//
// # Safety
// As [`ht_fit_power_mle`].
enum HtStatus ht_top_share(const struct HtSample *sample, double fraction, double *out);

// Smallest population fraction holding at least 80% of the total.
//
// # Safety
// As [`ht_fit_power_mle`].
enum HtStatus ht_pareto_rule(const struct HtSample *sample, double *out);

// Draw `n` values by seeded inverse transform into a caller buffer.
// For the q-exponential, `param` is the entropic index and the scale is 1.
//
// # Safety
// `out_values` must point to `n` writable doubles.
enum HtStatus ht_distribution_sample(enum HtFamily family,
                                     double param,
                                     double x_min,
                                     size_t n,
                                     uint64_t seed,
                                     double *out_values);

// Solve a constrained maximum-entropy problem over `n_levels` strictly
// increasing positive levels. Probabilities land in `out_probabilities`
// (length `n_levels`); the Lagrange multipliers land in `out_kappa` and
// `out_lambda`. For Shannon entropy `q` is ignored.
//
// # Safety
// `levels` must point to `n_levels` readable doubles and `out_probabilities`
// to as many writable ones; the multiplier pointers must be writable.
enum HtStatus ht_maxent_solve(const double *levels,
                              size_t n_levels,
                              double target_mean,
                              enum HtEntropy entropy,
                              double q,
                              double *out_probabilities,
                              double *out_kappa,
                              double *out_lambda);

// Derive the deterministic seed for stream `index` from `base`; matches the
// scheme the bootstrap uses for its replicate streams.
uint64_t ht_derive_seed(uint64_t base, uint64_t index);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HEAVYTAIL_H */
