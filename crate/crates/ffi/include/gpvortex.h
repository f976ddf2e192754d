#ifndef GPVORTEX_H
#define GPVORTEX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum GpvStatus {
  GPV_STATUS_OK = 0,
  // A parameter is out of range or a text argument is malformed.
  GPV_STATUS_INVALID_ARGUMENT = 1,
  // A required pointer was null.
  GPV_STATUS_NULL_POINTER = 2,
  // The computation failed (no convergence, blow-up, ...).
  GPV_STATUS_NUMERICAL = 3,
  // An internal panic was caught.
  GPV_STATUS_INTERNAL = 4,
  // The output buffer is too small; the required size was reported.
  GPV_STATUS_BUFFER_TOO_SMALL = 5,
} GpvStatus;

// Padé density `ρ_q`.
typedef struct GpvPade GpvPade;

// Boundary-value density profile.
typedef struct GpvProfile GpvProfile;

// Completed steady-vortex run.
typedef struct GpvRun GpvRun;

// Incremental Strang stepper seeded with the steady vortex.
typedef struct GpvStepper GpvStepper;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread as a NUL-terminated string,
// truncating to `cap` bytes. Returns the full message length in bytes.
//
// # Safety
// `buf` must be null or point to `cap` writable bytes.
size_t gpv_last_error(char *buf, size_t cap);

// Library version as a static NUL-terminated string.
const char *gpv_version(void);

// Builds `ρ_q` for q ∈ {2, 3, 4}.
//
// # Safety
// `out` must be a valid pointer to a handle slot.
enum GpvStatus gpv_pade_new(size_t q, struct GpvPade **out);

// # Safety
// `p` must be null or a handle from [`gpv_pade_new`] not yet freed.
void gpv_pade_free(struct GpvPade *p);

// `ρ_q(r)` and `ρ_q'(r)`; either output may be null.
//
// # Safety
// `p` must be a live handle; outputs must be null or writable.
enum GpvStatus gpv_pade_eval(const struct GpvPade *p, double r, double *rho, double *rho_prime);

// Numerator coefficients `a_1..a_q` followed by denominator coefficients
// `b_1..b_{q-1}`: `2q - 1` values in total.
//
// # Safety
// `buf` must point to `cap` writable doubles; `len` may be null.
enum GpvStatus gpv_pade_coefficients(const struct GpvPade *p, double *buf, size_t cap, size_t *len);

// Solves the profile boundary-value problem on `n` subdivisions.
//
// # Safety
// `out` must be a valid pointer to a handle slot.
enum GpvStatus gpv_profile_new(size_t n, struct GpvProfile **out);

// # Safety
// `p` must be null or a handle from [`gpv_profile_new`] not yet freed.
void gpv_profile_free(struct GpvProfile *p);

// Interpolated numerical density at `r`.
//
// # Safety
// `p` must be a live handle and `rho` writable.
enum GpvStatus gpv_profile_rho(const struct GpvProfile *p, double r, double *rho);

// Parses a `key = value` configuration and runs it to completion.
//
// # Safety
// `config` must be a NUL-terminated string and `out` a valid handle slot.
enum GpvStatus gpv_run_new(const char *config, struct GpvRun **out);

// # Safety
// `r` must be null or a handle from [`gpv_run_new`] not yet freed.
void gpv_run_free(struct GpvRun *r);

// Number of records, disks and evaluation sets of a run.
//
// # Safety
// `r` must be a live handle; outputs must be null or writable.
enum GpvStatus gpv_run_shape(const struct GpvRun *r, size_t *records, size_t *disks, size_t *evals);

// Recorded times.
//
// # Safety
// `buf` must point to `cap` writable doubles; `len` may be null.
enum GpvStatus gpv_run_times(const struct GpvRun *r, double *buf, size_t cap, size_t *len);

// Relative-error series of evaluation set `eval` on disk `disk`.
//
// # Safety
// `buf` must point to `cap` writable doubles; `len` may be null.
enum GpvStatus gpv_run_errors(const struct GpvRun *r,
                              size_t eval,
                              size_t disk,
                              double *buf,
                              size_t cap,
                              size_t *len);

// Discrete mass series.
//
// # Safety
// `buf` must point to `cap` writable doubles; `len` may be null.
enum GpvStatus gpv_run_mass(const struct GpvRun *r, double *buf, size_t cap, size_t *len);

// `max_n |m_n - m_0| / m_0`.
//
// # Safety
// `r` must be a live handle and `out` writable.
enum GpvStatus gpv_run_mass_drift(const struct GpvRun *r, double *out);

// Creates a stepper from a configuration; `tau` from the configuration is
// the default step and the evaluation settings are ignored.
//
// # Safety
// `config` must be a NUL-terminated string and `out` a valid handle slot.
enum GpvStatus gpv_stepper_new(const char *config, struct GpvStepper **out);

// # Safety
// `s` must be null or a handle from [`gpv_stepper_new`] not yet freed.
void gpv_stepper_free(struct GpvStepper *s);

// Advances by `steps` Strang steps of size `tau` (`tau = 0` uses the
// configured step; negative `tau` steps backwards).
//
// # Safety
// `s` must be a live handle.
enum GpvStatus gpv_stepper_advance(struct GpvStepper *s, size_t steps, double tau);

// Current time and discrete mass.
//
// # Safety
// `s` must be a live handle; outputs must be null or writable.
enum GpvStatus gpv_stepper_state(const struct GpvStepper *s, double *time, double *mass);

// Field samples as interleaved `(re, im)` pairs, `x` fastest; `nx`, `ny`
// receive the grid shape (spectral fields include the mirrored copies).
//
// # Safety
// `buf` must point to `cap` writable doubles; other outputs may be null.
enum GpvStatus gpv_stepper_values(const struct GpvStepper *s,
                                  double *buf,
                                  size_t cap,
                                  size_t *nx,
                                  size_t *ny);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GPVORTEX_H */
