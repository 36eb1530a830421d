#ifndef HOLO_EIKONAL_H
#define HOLO_EIKONAL_H

/* Generated by cbindgen from holo-eikonal-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum HekStatus {
  HEK_OK = 0,
  HEK_ERR_NULL_ARGUMENT = 1,
  HEK_ERR_UTF8 = 2,
  HEK_ERR_PARSE = 3,
  HEK_ERR_NO_SOLUTION = 4,
  HEK_ERR_SINGULAR = 5,
  HEK_ERR_VERIFY_FAILED = 6,
  HEK_ERR_INVALID = 7,
  HEK_ERR_PANIC = 8,
} HekStatus;

/**
 * Opaque polynomial handle.
 */
typedef struct HekPoly HekPoly;

/**
 * Opaque solution handle.
 */
typedef struct HekSolution HekSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Most recent error message for this thread; valid until the next call.
 */
const char *hek_last_error_message(void);

/**
 * Parse a polynomial in the engine grammar into an opaque handle.
 * # Safety
 *
 * `text` must be a valid NUL-terminated string; `out` must be a valid pointer.
 */
enum HekStatus hek_poly_parse(const char *text, size_t nvars, struct HekPoly **out);

/**
 * # Safety
 *
 * `poly` must be null or a pointer returned by `hek_poly_parse`, not yet freed.
 */
void hek_poly_free(struct HekPoly *poly);

/**
 * Canonical text rendering of a polynomial.
 * # Safety
 *
 * `poly` must be a live handle; `out` must be a valid pointer.
 */
enum HekStatus hek_poly_render(const struct HekPoly *poly, char **out);

/**
 * Classify g; writes a schema `holo-eikonal/1` JSON report.
 * # Safety
 *
 * `poly` must be a live handle; `out` must be a valid pointer.
 */
enum HekStatus hek_classify_json(const struct HekPoly *poly, char **out);

/**
 * Construct the canonical solution of `u_{z1}...u_{zn} = e^g`.
 * # Safety
 *
 * `poly` must be a live handle; `out` must be a valid pointer.
 */
enum HekStatus hek_solve(const struct HekPoly *poly, struct HekSolution **out);

/**
 * Run the matrix pipeline for `prod_i (row_i A . grad u) = e^g`.
 * `matrix_json` is a JSON array of arrays of scalar strings.
 * # Safety
 *
 * `matrix_json` must be NUL-terminated; `poly` live; `out` valid.
 */
enum HekStatus hek_reduce_solve(const char *matrix_json,
                                const struct HekPoly *poly,
                                struct HekSolution **out);

/**
 * # Safety
 *
 * `sol` must be null or a pointer returned by a solve call, not yet freed.
 */
void hek_solution_free(struct HekSolution *sol);

/**
 * Human-readable rendering of a solution.
 * # Safety
 *
 * `sol` must be a live handle; `out` must be a valid pointer.
 */
enum HekStatus hek_solution_render(const struct HekSolution *sol, char **out);

/**
 * Structured solution JSON (round-trips through `hek_*` and the CLI).
 * # Safety
 *
 * `sol` must be a live handle; `out` must be a valid pointer.
 */
enum HekStatus hek_solution_json(const struct HekSolution *sol, char **out);

/**
 * Exact symbolic verification (plain product mode; canonical solutions).
 * # Safety
 *
 * `sol` and `g` must be live handles.
 */
enum HekStatus hek_verify_symbolic(const struct HekSolution *sol, const struct HekPoly *g);

/**
 * Seeded numeric residual verification; writes the max relative residual.
 * # Safety
 *
 * `sol` and `g` must be live handles; `max_residual_out` may be null.
 */
enum HekStatus hek_verify_numeric(const struct HekSolution *sol,
                                  const struct HekPoly *g,
                                  uint32_t samples,
                                  double radius,
                                  double tol,
                                  uint64_t seed,
                                  uint32_t precision_bits,
                                  double *max_residual_out);

/**
 * Release a string returned by any `hek_*` function.
 * # Safety
 *
 * `s` must be null or a string returned by this library, not yet freed.
 */
void hek_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HOLO_EIKONAL_H */
