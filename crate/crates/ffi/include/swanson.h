#ifndef SWANSON_H
#define SWANSON_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SwansonStatus {
  SWANSON_STATUS_OK = 0,
  SWANSON_STATUS_NULL_POINTER = 1,
  SWANSON_STATUS_INVALID_ARGUMENT = 2,
  SWANSON_STATUS_NUMERIC = 3,
  SWANSON_STATUS_BUFFER_TOO_SMALL = 4,
  SWANSON_STATUS_PANIC = 5,
} SwansonStatus;

/**
 * Opaque ladder-operator profile.
 */
typedef struct SwansonProfile SwansonProfile;

typedef struct SwansonParams {
  double omega;
  double alpha;
  double beta;
} SwansonParams;

/**
 * Pointwise coefficients at one `x`.
 */
typedef struct SwansonCoefficients {
  double a;
  double b;
  double c1;
  double c2;
  double veff;
  double rho_tilde;
  double zeta_plus;
  double commutator;
} SwansonCoefficients;

typedef struct SwansonGrid {
  double x_min;
  double x_max;
  size_t n;
} SwansonGrid;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Harmonic profile `a = 1/√2`, `b = x/√2`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum SwansonStatus swanson_profile_harmonic(struct SwansonProfile **out);

/**
 * Solitonic profile `a = cosh qx`, `b = κ q sinh qx`; requires `q > 0` (closed forms need `κ > ½`).
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum SwansonStatus swanson_profile_solitonic(double q,
                                             double kappa,
                                             struct SwansonProfile **out);

/**
 * Morse-like profile `a = e^(px)` with the canonical `b` and shift `μ`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum SwansonStatus swanson_profile_morse(double p, double mu, struct SwansonProfile **out);

/**
 * Canonical profile: `a` from an expression, `b` restoring `[η, η†] = 1`.
 *
 * # Safety
 * `expr_a` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum SwansonStatus swanson_profile_canonical(const char *expr_a,
                                             double mu,
                                             struct SwansonProfile **out);

/**
 * Custom profile from two expressions in `x`.
 *
 * # Safety
 * `expr_a` and `expr_b` must be NUL-terminated strings; `out` must be valid for writes.
 */
enum SwansonStatus swanson_profile_custom(const char *expr_a,
                                          const char *expr_b,
                                          struct SwansonProfile **out);

/**
 * Releases a profile; null is ignored.
 *
 * # Safety
 * `profile` must come from a `swanson_profile_*` constructor and not be freed twice.
 */
void swanson_profile_free(struct SwansonProfile *profile);

/**
 * Coefficients, effective potential and metric at `x`.
 *
 * # Safety
 * `profile` must be a live handle; `out` must be valid for writes.
 */
enum SwansonStatus swanson_coefficients(const struct SwansonProfile *profile,
                                        struct SwansonParams p,
                                        double x,
                                        struct SwansonCoefficients *out);

/**
 * Lowest `k` eigenvalues of the discretized Hermitian equivalent, ascending.
 *
 * # Safety
 * `profile` must be a live handle; `out` must hold `capacity` doubles.
 */
enum SwansonStatus swanson_lowest_eigenvalues(const struct SwansonProfile *profile,
                                              struct SwansonParams p,
                                              struct SwansonGrid g,
                                              size_t k,
                                              double *out,
                                              size_t capacity);

/**
 * Dense nonsymmetric solve of the discretized non-Hermitian operator:
 * `max |Im E|` and `‖H̃‖_∞`. The grid is limited to 400 nodes.
 *
 * # Safety
 * `profile` must be a live handle; `max_imag` and `norm_inf` must be valid for writes.
 */
enum SwansonStatus swanson_oracle_max_imag(const struct SwansonProfile *profile,
                                           struct SwansonParams p,
                                           struct SwansonGrid g,
                                           double *max_imag,
                                           double *norm_inf);

/**
 * Closed-form level `n` of the solitonic family.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum SwansonStatus swanson_solitonic_energy(double q,
                                            double kappa,
                                            struct SwansonParams p,
                                            size_t n,
                                            double *out);

/**
 * Closed-form level `n` of the harmonic family, `(n + ½)√(ω² − 4αβ)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum SwansonStatus swanson_harmonic_energy(struct SwansonParams p, size_t n, double *out);

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length, 0 when there is none.
 *
 * # Safety
 * `buf` must be valid for `len` bytes or null with `len = 0`.
 */
size_t swanson_last_error(char *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SWANSON_H */
