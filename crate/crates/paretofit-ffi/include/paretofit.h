#ifndef PARETOFIT_H
#define PARETOFIT_H

/* Generated by cbindgen from paretofit-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum PfStatus {
  PF_STATUS_OK = 0,
  PF_STATUS_NULL_POINTER = 1,
  PF_STATUS_INVALID_ARGUMENT = 2,
  PF_STATUS_DIMENSION_MISMATCH = 3,
  PF_STATUS_SINGULAR = 4,
  PF_STATUS_NOT_CONVERGED = 5,
} PfStatus;

/**
 * Opaque builder for a tuple of quadratic objectives.
 */
typedef struct PfTuple PfTuple;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Allocate a tuple of `num_objectives` objectives over dimension `dim`.
 * Free with [`pf_tuple_free`]. Returns null on zero sizes.
 */
struct PfTuple *pf_tuple_new(uintptr_t dim, uintptr_t num_objectives);

/**
 * # Safety
 * `tuple` must come from [`pf_tuple_new`] and not have been freed.
 */
void pf_tuple_free(struct PfTuple *tuple);

/**
 * Set objective `index` to `(theta - center)' quad (theta - center) + offset`.
 * `quad` is row-major `dim x dim` and must be symmetric; `center` has
 * length `dim`.
 *
 * # Safety
 * `tuple` must be a live handle; `quad` and `center` must point to
 * `dim*dim` and `dim` readable doubles.
 */
enum PfStatus pf_tuple_set_objective(struct PfTuple *tuple,
                                     uintptr_t index,
                                     const double *quad,
                                     const double *center,
                                     double offset);

/**
 * Closed-form minimizer of the linearly scalarized tuple. Writes `dim`
 * doubles to `out`.
 *
 * # Safety
 * `tuple` live; `weights` holds `num_weights` doubles; `out` has space for
 * `dim` doubles.
 */
enum PfStatus pf_mixture_minimizer(const struct PfTuple *tuple,
                                   const double *weights,
                                   uintptr_t num_weights,
                                   double *out);

/**
 * Scalarized objective value at `theta`; `chebyshev` nonzero selects the
 * weighted maximum, zero the weighted sum.
 *
 * # Safety
 * `tuple` live; `theta` holds `dim` doubles; `weights` holds `num_weights`
 * doubles; `out` is a valid double pointer.
 */
enum PfStatus pf_eval_scalarized(const struct PfTuple *tuple,
                                 const double *theta,
                                 const double *weights,
                                 uintptr_t num_weights,
                                 int32_t chebyshev,
                                 double *out);

/**
 * Lasso `(1/n)||X theta - y||^2 + alpha ||theta||_1` by coordinate
 * descent. `x` is row-major `n x d`. Writes `d` doubles to `out`; returns
 * `NotConverged` (with `out` still filled) when the iteration cap is hit.
 *
 * # Safety
 * `x` holds `n*d` doubles, `y` holds `n`, `out` has space for `d`.
 */
enum PfStatus pf_lasso(const double *x,
                       uintptr_t n_rows,
                       uintptr_t dim,
                       const double *y,
                       double alpha,
                       double tol,
                       uintptr_t max_iter,
                       double *out);

/**
 * Closed-form two-stage fairness-risk estimate for weights
 * `(w_risk, w_fair)`. Writes `dim` doubles to `out`.
 *
 * # Safety
 * `beta` and `mu` hold `dim` doubles; `out` has space for `dim`.
 */
enum PfStatus pf_two_stage_fairness(const double *beta,
                                    const double *mu,
                                    uintptr_t dim,
                                    double w_risk,
                                    double w_fair,
                                    double *out);

/**
 * Exact two-objective hypervolume of `n_points` front points inside
 * `[0, r]^2`. `values` is row-major `n_points x 2`.
 *
 * # Safety
 * `values` holds `2 * n_points` doubles; `out` is a valid double pointer.
 */
enum PfStatus pf_hypervolume_exact_2d(const double *values,
                                      uintptr_t n_points,
                                      double reference,
                                      double *out);

/**
 * Monte-Carlo hypervolume of `n_points` front points with `num_objectives`
 * coordinates each, inside `[0, r]^K`.
 *
 * # Safety
 * `values` holds `n_points * num_objectives` doubles; `out` is valid.
 */
enum PfStatus pf_hypervolume_mc(const double *values,
                                uintptr_t n_points,
                                uintptr_t num_objectives,
                                double reference,
                                uintptr_t samples,
                                uint64_t seed,
                                double *out);

/**
 * Library version as a static NUL-terminated string.
 */
const char *pf_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PARETOFIT_H */
