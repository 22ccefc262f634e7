#ifndef TFDW_H
#define TFDW_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TfdwStatus {
  TFDW_STATUS_OK = 0,
  TFDW_STATUS_NULL_POINTER = 1,
  /**
   * Bad grid, model parameters, solver options or charge description.
   */
  TFDW_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Buffer length does not match the grid.
   */
  TFDW_STATUS_LENGTH_MISMATCH = 3,
  /**
   * Domain or overflow error in a special function, or a failed root solve.
   */
  TFDW_STATUS_DOMAIN = 4,
  /**
   * The energy left its a priori bounds during a solve.
   */
  TFDW_STATUS_DIVERGED = 5,
  TFDW_STATUS_INTERNAL = 6,
} TfdwStatus;

typedef enum TfdwStopReason {
  TFDW_STOP_REASON_RESIDUAL_TOL = 0,
  TFDW_STOP_REASON_ENERGY_STALL = 1,
  TFDW_STOP_REASON_MAX_ITERS = 2,
  TFDW_STOP_REASON_STEP_UNDERFLOW = 3,
} TfdwStopReason;

/**
 * Grid, model parameters and sampled external potential.
 */
typedef struct TfdwProblem TfdwProblem;

typedef struct TfdwSolution TfdwSolution;

typedef struct TfdwSolveOptions {
  double step_size;
  double max_step;
  double sigma;
  double residual_tol;
  size_t max_iters;
  size_t coarse_levels;
} TfdwSolveOptions;

typedef struct TfdwEnergy {
  double kinetic;
  double phi_term;
  double potential_term;
  double coulomb_term;
  double total;
} TfdwEnergy;

typedef struct TfdwSummary {
  struct TfdwEnergy energy;
  double l1_charge;
  double residual_l2;
  size_t iterations;
  bool converged;
  enum TfdwStopReason stop_reason;
} TfdwSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *tfdw_version(void);

/**
 * Copies the last error message of the calling thread into `buf`,
 * truncated and NUL-terminated. Returns the full message length in bytes.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t tfdw_last_error_message(char *buf, size_t len);

struct TfdwSolveOptions tfdw_default_solve_options(void);

/**
 * Creates a problem on an `n × n` grid of side `box_length` with the
 * potential of a unit point charge one unit above the origin.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for a handle.
 */
enum TfdwStatus tfdw_problem_new(size_t n,
                                 double box_length,
                                 double a,
                                 double b,
                                 double rho_bar,
                                 struct TfdwProblem **out);

/**
 * Replaces the external potential by that of the charges in `json`, in the
 * form `{"charges": [{"c": 1.0, "y": [0, 0], "z": 0.0}]}` where `z` is the
 * height above the unit reference distance.
 *
 * # Safety
 * `problem` must be a live handle and `json` a NUL-terminated string.
 */
enum TfdwStatus tfdw_problem_set_charges_json(struct TfdwProblem *problem, const char *json);

/**
 * Number of grid values (`n²`) in fields of this problem, 0 for null.
 *
 * # Safety
 * `problem` must be null or a live handle.
 */
size_t tfdw_problem_field_len(const struct TfdwProblem *problem);

/**
 * Energy of the field `u` (row-major, `n²` values).
 *
 * # Safety
 * `problem` must be a live handle, `u` must point to `len` readable values
 * and `out` to writable storage.
 */
enum TfdwStatus tfdw_problem_energy(const struct TfdwProblem *problem,
                                    const double *u,
                                    size_t len,
                                    struct TfdwEnergy *out);

/**
 * Releases a problem. Null is ignored.
 *
 * # Safety
 * `problem` must be null or a handle not yet freed.
 */
void tfdw_problem_free(struct TfdwProblem *problem);

/**
 * Minimizes the energy. `options` may be null for defaults. A solution is
 * returned even when the solver stops without converging; check the summary.
 *
 * # Safety
 * `problem` must be a live handle, `options` null or valid, and `out` a
 * valid pointer to writable storage for a handle.
 */
enum TfdwStatus tfdw_solve(const struct TfdwProblem *problem,
                           const struct TfdwSolveOptions *options,
                           struct TfdwSolution **out);

/**
 * # Safety
 * `solution` must be a live handle and `out` valid writable storage.
 */
enum TfdwStatus tfdw_solution_summary(const struct TfdwSolution *solution, struct TfdwSummary *out);

/**
 * Copies the minimizer `u` (row-major, `n²` values) into `buf`.
 *
 * # Safety
 * `solution` must be a live handle and `buf` must point to `len` writable values.
 */
enum TfdwStatus tfdw_solution_copy_u(const struct TfdwSolution *solution, double *buf, size_t len);

/**
 * Copies the density `ρ = (u + ū)²` into `buf`.
 *
 * # Safety
 * As for [`tfdw_solution_copy_u`].
 */
enum TfdwStatus tfdw_solution_copy_rho(const struct TfdwSolution *solution,
                                       double *buf,
                                       size_t len);

/**
 * Releases a solution. Null is ignored.
 *
 * # Safety
 * `solution` must be null or a handle not yet freed.
 */
void tfdw_solution_free(struct TfdwSolution *solution);

/**
 * Critical von Weizsäcker coefficient above which the response is trivial.
 */
double tfdw_hardy_constant(void);

/**
 * Linear-response Green's function `G_{a,c}(r)`.
 *
 * # Safety
 * `out` must be valid writable storage.
 */
enum TfdwStatus tfdw_green_function(double a, double c, double r, double *out);

/**
 * Predicted density decay exponent for total induced charge `l1_charge`.
 *
 * # Safety
 * `out` must be valid writable storage.
 */
enum TfdwStatus tfdw_decay_exponent(double a, double b, double l1_charge, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TFDW_H */
