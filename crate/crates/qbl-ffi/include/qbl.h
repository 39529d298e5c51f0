#ifndef QBL_H
#define QBL_H

/* Generated by cbindgen from qbl-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Outcome of an FFI call.
typedef enum QblStatus {
  QBL_STATUS_OK = 0,
  // A required pointer argument was null.
  QBL_STATUS_NULL_ARGUMENT = 1,
  // Arguments violate a documented precondition.
  QBL_STATUS_INVALID_ARGUMENT = 2,
  // Internal failure; see the last error message.
  QBL_STATUS_FAILURE = 3,
} QblStatus;

// Opaque sweep outcome: samples plus their confinement report.
typedef struct QblSweep QblSweep;

// One point of the analytic boundary curve.
typedef struct QblBoundaryPoint {
  // Shared eigenphase parameter of the extremal configuration.
  double phi;
  // Largest reachable overlap modulus at this overlap phase.
  double r_max;
  // Overlap phase.
  double overlap_phase;
  // Sector angle of the extremal configuration.
  double theta;
  // Lagrange multiplier of the stationarity condition.
  double lambda;
} QblBoundaryPoint;

// One recorded overlap sample.
typedef struct QblSample {
  uint64_t index;
  double re;
  double im;
  // Modulus of the overlap.
  double r;
  // Phase of the overlap in (-pi, pi].
  double phi;
} QblSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Crate version as a static NUL-terminated string.
const char *qbl_version(void);

// Message describing the most recent non-Ok status on this thread.
//
// The pointer stays valid until the next failing call on the same thread.
const char *qbl_last_error_message(void);

// Evaluates the analytic boundary at eigenphase parameter `phi`.
//
// # Safety
// `out` must be valid for writing one `QblBoundaryPoint`.
enum QblStatus qbl_boundary_point(uint32_t d, double phi, struct QblBoundaryPoint *out);

// Boundary of a qubit pair with concurrence `c`, parametrized by `phi`.
//
// # Safety
// `out_r_max` and `out_phase` must each be valid for writing one `f64`.
enum QblStatus qbl_qubit_boundary_point(double c, double phi, double *out_r_max, double *out_phase);

// Fills `out` with the `d` overlap phases where the boundary touches the
// unit circle; `len` must be at least `d`.
//
// # Safety
// `out` must be valid for writing `len` values.
enum QblStatus qbl_topological_phases(uint32_t d, double *out, uintptr_t len);

// Tests whether the complex overlap re + i im lies inside the reachable
// region for maximally entangled qudit pairs of dimension `d`.
//
// # Safety
// `out` must be valid for writing one `bool`.
enum QblStatus qbl_contains(uint32_t d, double re, double im, double tol, bool *out);

// Checks the stationarity identity of the extremal eigenphase configuration
// at parameter `phi`.
//
// # Safety
// `out` must be valid for writing one `bool`.
enum QblStatus qbl_verify_stationarity(uint32_t d, double phi, double tol, bool *out);

// Runs a sweep of `n` random local evolutions and checks confinement.
//
// `strategy` is one of "haar-two-sided", "haar-one-sided", "rxrz".
// `concurrence` selects the initial qubit entanglement; pass a negative
// value for the maximally entangled default. On success `out` receives a
// handle that must be freed with [`qbl_sweep_free`].
//
// # Safety
// `strategy` must point to a NUL-terminated string and `out` must be valid
// for writing one pointer.
enum QblStatus qbl_sweep_run(uint32_t d,
                             const char *strategy,
                             uint64_t n,
                             uint64_t seed,
                             double tol,
                             double concurrence,
                             struct QblSweep **out);

// Number of samples held by the handle; 0 for null.
//
// # Safety
// `handle` must be null or a live handle from [`qbl_sweep_run`].
uint64_t qbl_sweep_len(const struct QblSweep *handle);

// Copies sample `index` out of the handle.
//
// # Safety
// `handle` must be null or a live handle from [`qbl_sweep_run`]; `out`
// must be valid for writing one `QblSample`.
enum QblStatus qbl_sweep_sample(const struct QblSweep *handle,
                                uint64_t index,
                                struct QblSample *out);

// Number of boundary violations found by the confinement check.
//
// # Safety
// `handle` must be null or a live handle from [`qbl_sweep_run`].
uint64_t qbl_sweep_violations(const struct QblSweep *handle);

// Largest boundary excess over all samples; 0 when confined.
//
// # Safety
// `handle` must be null or a live handle from [`qbl_sweep_run`].
double qbl_sweep_max_excess(const struct QblSweep *handle);

// Releases a sweep handle; null is a no-op.
//
// # Safety
// `handle` must be null or a handle from [`qbl_sweep_run`] that has not
// been freed yet; it is dead afterwards.
void qbl_sweep_free(struct QblSweep *handle);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QBL_H */
