#ifndef ZKCYL_H
#define ZKCYL_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define ZK_SCHEME_STRANG 0

#define ZK_SCHEME_ETDRK4 1

#define ZK_OK 0

/**
 * A required pointer argument was null.
 */
#define ZK_ERR_NULL -1

/**
 * An argument or grid was rejected.
 */
#define ZK_ERR_INVALID -2

/**
 * The computation blew up or did not converge.
 */
#define ZK_ERR_NUMERICAL -3

/**
 * The requested regularity lies outside the feasible range.
 */
#define ZK_ERR_INFEASIBLE -4

/**
 * A Rust panic was caught at the boundary.
 */
#define ZK_ERR_PANIC -5

/**
 * A real field stored by its Fourier coefficients.
 */
typedef struct ZkField ZkField;

/**
 * Periodic grid of the cylinder.
 */
typedef struct ZkGrid ZkGrid;

/**
 * Exponents of the global iteration as fractions.
 */
typedef struct ZkGwpExponents {
  int64_t lambda_num;
  int64_t lambda_den;
  int64_t n_num;
  int64_t n_den;
  int64_t growth_num;
  int64_t growth_den;
} ZkGwpExponents;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *zk_version(void);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
int32_t zk_grid_new(double x_scale,
                    double y_scale,
                    size_t mx,
                    size_t my,
                    double dt,
                    struct ZkGrid **out);

/**
 * # Safety
 * `grid` must be null or a handle from [`zk_grid_new`] not yet freed.
 */
void zk_grid_free(struct ZkGrid *grid);

/**
 * # Safety
 * `grid` must be a live grid handle; `mx`, `my` writable.
 */
int32_t zk_grid_shape(const struct ZkGrid *grid, size_t *mx, size_t *my);

/**
 * Builds a field from `Mx·My` samples, row-major with x outer.
 *
 * # Safety
 * `grid` must be a live grid handle, `values` must point to `len` readable
 * doubles and `out` to writable storage for one handle.
 */
int32_t zk_field_from_samples(const struct ZkGrid *grid,
                              const double *values,
                              size_t len,
                              struct ZkField **out);

/**
 * Writes the `Mx·My` grid samples, row-major with x outer.
 *
 * # Safety
 * `field` must be a live field handle and `out` must point to `len`
 * writable doubles.
 */
int32_t zk_field_to_samples(const struct ZkField *field, double *out, size_t len);

/**
 * # Safety
 * `field` must be null or a handle not yet freed.
 */
void zk_field_free(struct ZkField *field);

/**
 * `∫u²`.
 *
 * # Safety
 * `field` must be a live field handle and `out` writable.
 */
int32_t zk_field_mass(const struct ZkField *field, double *out);

/**
 * `½∫|∇u|² − ⅙∫u³`.
 *
 * # Safety
 * `field` must be a live field handle and `out` writable.
 */
int32_t zk_field_energy(const struct ZkField *field, double *out);

/**
 * # Safety
 * `field` must be a live field handle and `out` writable.
 */
int32_t zk_field_hs_norm(const struct ZkField *field, double s, double *out);

/**
 * `E[Iu]` for the multiplier with parameters `n`, `s`.
 *
 * # Safety
 * `field` must be a live field handle and `out` writable.
 */
int32_t zk_field_modified_energy(const struct ZkField *field, double n, double s, double *out);

/**
 * Evolves `field` to time `tend` and returns the final state as a new
 * handle; `field` is not modified.
 *
 * # Safety
 * `field` must be a live field handle and `out` writable.
 */
int32_t zk_evolve(const struct ZkField *field,
                  int32_t scheme,
                  double dt,
                  double tend,
                  struct ZkField **out);

/**
 * Exponents for `s = s_num/s_den`; `ZK_ERR_INFEASIBLE` unless
 * `29/31 < s < 1`.
 *
 * # Safety
 * `out` must be writable.
 */
int32_t zk_gwp_exponents(int64_t s_num, int64_t s_den, struct ZkGwpExponents *out);

/**
 * Counts `q ∈ ℤ/λ`, `|q| ≤ qmax`, with `aq² + bq + c ∈ [lo, hi]`, and the
 * bound `4λ(|I|^{1/2}/|a|^{1/2} + 1)`.
 *
 * # Safety
 * `count` and `bound` must be writable.
 */
int32_t zk_count_parabola(double a,
                          double b,
                          double c,
                          double lo,
                          double hi,
                          double lambda,
                          double qmax,
                          uint64_t *count,
                          double *bound);

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *zk_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ZKCYL_H */
