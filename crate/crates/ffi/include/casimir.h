#ifndef CASIMIR_H
#define CASIMIR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define CASIMIR_BC_DIRICHLET 0

#define CASIMIR_BC_NEUMANN 1

typedef enum CasimirStatus {
  CASIMIR_STATUS_OK = 0,
  CASIMIR_STATUS_INVALID_ARGUMENT = 1,
  CASIMIR_STATUS_INSUFFICIENT_PRECISION = 2,
  CASIMIR_STATUS_ILL_CONDITIONED = 3,
  CASIMIR_STATUS_NUMERICAL = 4,
  CASIMIR_STATUS_NULL_POINTER = 5,
  CASIMIR_STATUS_PANIC = 6,
} CasimirStatus;

/**
 * Precision settings (opaque).
 */
typedef struct CasimirContext CasimirContext;

/**
 * One evaluated energy (opaque).
 */
typedef struct CasimirResult CasimirResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a context; `target_digits` must be at least 10.
 *
 * # Safety
 * `out` must be null or valid for writing one pointer.
 */
enum CasimirStatus casimir_context_new(uint32_t target_digits,
                                       uint32_t guard_digits,
                                       struct CasimirContext **out);

/**
 * # Safety
 * `ctx` must be null or a pointer from [`casimir_context_new`] not yet freed.
 */
void casimir_context_free(struct CasimirContext *ctx);

/**
 * Evaluates the energy for boundary condition `bc` (`CASIMIR_BC_*`).
 *
 * # Safety
 * `ctx` must be a live context; `out` must be valid for writing one pointer.
 */
enum CasimirStatus casimir_energy(const struct CasimirContext *ctx,
                                  uint32_t bc,
                                  uint32_t dimension,
                                  struct CasimirResult **out);

/**
 * # Safety
 * See [`casimir_energy`].
 */
enum CasimirStatus casimir_dirichlet_energy(const struct CasimirContext *ctx,
                                            uint32_t dimension,
                                            struct CasimirResult **out);

/**
 * # Safety
 * See [`casimir_energy`].
 */
enum CasimirStatus casimir_neumann_energy(const struct CasimirContext *ctx,
                                          uint32_t dimension,
                                          struct CasimirResult **out);

/**
 * # Safety
 * `res` must be null or a pointer from an energy call not yet freed.
 */
void casimir_result_free(struct CasimirResult *res);

/**
 * Dimension of the result, or 0 for a null handle.
 *
 * # Safety
 * `res` must be null or a live result.
 */
uint32_t casimir_result_dimension(const struct CasimirResult *res);

/**
 * +1 or -1, or 0 for a null handle.
 *
 * # Safety
 * `res` must be null or a live result.
 */
int32_t casimir_result_sign(const struct CasimirResult *res);

/**
 * Nearest binary64 value; NaN for a null handle.
 *
 * # Safety
 * `res` must be null or a live result.
 */
double casimir_result_value_f64(const struct CasimirResult *res);

/**
 * Decimal digits cancelled in the alternating sum; NaN for a null handle.
 *
 * # Safety
 * `res` must be null or a live result.
 */
double casimir_result_digits_lost(const struct CasimirResult *res);

/**
 * The value with `significant_digits` digits (0 = the context target), as
 * a newly allocated string; null on failure.
 *
 * # Safety
 * `res` must be null or a live result.
 */
char *casimir_result_value_string(const struct CasimirResult *res, uint32_t significant_digits);

/**
 * Exact check that the Neumann energy is negative for all D <= max_dim;
 * writes the number of violations found.
 *
 * # Safety
 * `violations` must be valid for writing one `u64`.
 */
enum CasimirStatus casimir_verify_neumann_negativity(uint32_t max_dim, uint64_t *violations);

/**
 * Fits the brute-force mode sum on the default cutoff grid (D <= 3) and
 * writes the extracted constant and the worst relative residual.
 *
 * # Safety
 * `ctx` must be a live context; the out pointers valid for one `double`.
 */
enum CasimirStatus casimir_oracle_extract(const struct CasimirContext *ctx,
                                          uint32_t bc,
                                          uint32_t dimension,
                                          double *constant,
                                          double *max_relative_residual);

/**
 * Message for the last failure on this thread as a newly allocated string,
 * or null if nothing has failed.
 */
char *casimir_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void casimir_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CASIMIR_H */
