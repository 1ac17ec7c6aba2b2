#ifndef GEFP_LAB_H
#define GEFP_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call; zero is success.
 */
typedef enum GefpStatus {
  GEFP_STATUS_OK = 0,
  GEFP_STATUS_NULL_POINTER = 1,
  GEFP_STATUS_INVALID_UTF8 = 2,
  GEFP_STATUS_PARSE = 3,
  GEFP_STATUS_INVALID_PROFILE = 4,
  GEFP_STATUS_NONPHYSICAL_WEIGHTS = 5,
  GEFP_STATUS_UNSUPPORTED = 6,
  GEFP_STATUS_TOO_LARGE = 7,
  GEFP_STATUS_BAD_INDEX = 8,
  GEFP_STATUS_DIVISION_BY_ZERO = 9,
  GEFP_STATUS_DUPLICATE_RAPIDITY = 10,
  GEFP_STATUS_SINGULAR_HANKEL = 11,
  GEFP_STATUS_NOT_INVERTIBLE = 12,
  GEFP_STATUS_NOT_DIVISIBLE = 13,
  GEFP_STATUS_BRANCH_POLE = 14,
  GEFP_STATUS_INCONSISTENT = 15,
  GEFP_STATUS_PANIC = 16,
} GefpStatus;

/**
 * Opaque parameter point plus cached residue engines.
 */
typedef struct GefpModel GefpModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Exact model at rational `(Δ, t)`, e.g. `"1/2"`, `"1"`.
 *
 * # Safety
 * `delta` and `t` must be nul-terminated strings, `out` a valid pointer.
 */
enum GefpStatus gefp_model_new_exact(const char *delta,
                                     const char *t,
                                     bool allow_nonphysical,
                                     struct GefpModel **out);

/**
 * Float model at `(Δ, t)` (`trig == false`) or `(λ, η)` (`trig == true`).
 * Decimal or `"p/q"` input, `precision` bits.
 *
 * # Safety
 * `x` and `y` must be nul-terminated strings, `out` a valid pointer.
 */
enum GefpStatus gefp_model_new_float(const char *x,
                                     const char *y,
                                     bool trig,
                                     uint32_t precision,
                                     bool allow_nonphysical,
                                     struct GefpModel **out);

/**
 * # Safety
 * `model` must come from a `gefp_model_new_*` call and not be used again.
 */
void gefp_model_free(struct GefpModel *model);

/**
 * GEFP of the profile `r[0..s]` on the `n×n` lattice. `engine` may be NULL
 * (residue); exact models accept `"residue"` and `"oracle"`, float models
 * also `"jets"` and `"homlim"` (a float `(Δ, t)` point needs `|Δ| < 1` for
 * these). `out_approx` may be NULL.
 *
 * # Safety
 * `model` must be live, `r` must point to `s` values (or be NULL when
 * `s == 0`), `out` must be a valid pointer.
 */
enum GefpStatus gefp_model_gefp(struct GefpModel *model,
                                size_t n,
                                const size_t *r,
                                size_t s,
                                const char *engine,
                                char **out,
                                double *out_approx);

/**
 * `Z_N` by transfer matrix, or `Z_N / c^N` when `reduced`. Exact `(Δ, t)`
 * models are normalised to `a = 1` and know only `c²`, so odd `n` needs
 * `reduced`.
 *
 * # Safety
 * `model` must be live, `out` a valid pointer.
 */
enum GefpStatus gefp_model_partition(struct GefpModel *model,
                                     size_t n,
                                     bool reduced,
                                     char **out,
                                     double *out_approx);

/**
 * `H_N^(r)`, the probability that the single c-vertex of the first row
 * sits in column `r` (from the right).
 *
 * # Safety
 * `model` must be live, `out` a valid pointer.
 */
enum GefpStatus gefp_model_boundary_h(struct GefpModel *model,
                                      size_t n,
                                      size_t r,
                                      char **out,
                                      double *out_approx);

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next call on the same thread.
 */
const char *gefp_last_error(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, freed once.
 */
void gefp_string_free(char *s);

/**
 * Library version, static storage.
 */
const char *gefp_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GEFP_LAB_H */
