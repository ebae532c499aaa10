#ifndef SPINDIR_H
#define SPINDIR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SpindirStatus {
  SPINDIR_STATUS_OK = 0,
  SPINDIR_STATUS_NULL_POINTER = 1,
  SPINDIR_STATUS_DOMAIN = 2,
  SPINDIR_STATUS_UNSUPPORTED = 3,
  SPINDIR_STATUS_NUMERIC = 4,
  SPINDIR_STATUS_PRECONDITION = 5,
  SPINDIR_STATUS_PARSE = 6,
  SPINDIR_STATUS_BUFFER_TOO_SMALL = 7,
  SPINDIR_STATUS_PANIC = 8,
} SpindirStatus;

// Fidelity, optimal state and effective dimension for one `(N, m_A, m_B)`.
typedef struct SpindirFidelityResult SpindirFidelityResult;

// A decoding measurement.
typedef struct SpindirPovm SpindirPovm;

// Monte Carlo summary. `target` is the analytic fidelity for the simulated state.
typedef struct SpindirSimReport {
  uint64_t trials;
  uint64_t seed;
  double mean;
  double std_error;
  double target;
} SpindirSimReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *spindir_last_error_message(void);

// Optimal fidelity `F_N`.
//
// # Safety
// `out` must be null or valid for writes.
enum SpindirStatus spindir_optimal_fidelity(uint32_t n_spins, double *out);

// Best fidelity for `N` spins with projections `ma2 / 2` and `mb2 / 2`.
//
// # Safety
// `out` must be null or valid for writes.
enum SpindirStatus spindir_fidelity(uint32_t n_spins, int32_t ma2, int32_t mb2, double *out);

// Largest zero of `P_n^{a,b}`.
//
// # Safety
// `out` must be null or valid for writes.
enum SpindirStatus spindir_jacobi_largest_zero(uint32_t n, uint32_t a, uint32_t b, double *out);

// # Safety
// `out` must be null or valid for writes.
enum SpindirStatus spindir_fidelity_result_new(uint32_t n_spins,
                                               int32_t ma2,
                                               int32_t mb2,
                                               struct SpindirFidelityResult **out);

// `F`, or NaN for a null handle.
//
// # Safety
// `h` must be null or a live handle from this library.
double spindir_fidelity_result_fidelity(const struct SpindirFidelityResult *h);

// # Safety
// `h` must be null or a live handle from this library.
double spindir_fidelity_result_top_eigenvalue(const struct SpindirFidelityResult *h);

// Effective dimension `(J+1)² - m²`, or 0 for a null handle.
//
// # Safety
// `h` must be null or a live handle from this library.
uint64_t spindir_fidelity_result_effective_dimension(const struct SpindirFidelityResult *h);

// Number of optimal-state components.
//
// # Safety
// `h` must be null or a live handle from this library.
size_t spindir_fidelity_result_state_len(const struct SpindirFidelityResult *h);

// Copies the optimal-state components `A_j`, lowest `j` first, into `buf`.
//
// # Safety
// `h` must be null or a live handle from this library.
// `buf` must be null or valid for `len` writes.
enum SpindirStatus spindir_fidelity_result_state(const struct SpindirFidelityResult *h,
                                                 double *buf,
                                                 size_t len);

// # Safety
// `h` must be null or a handle from this library that has not been freed.
void spindir_fidelity_result_free(struct SpindirFidelityResult *h);

// Tetrahedron POVM for two spins.
//
// # Safety
// `out` must be null or valid for writes.
enum SpindirStatus spindir_povm_tetrahedron(struct SpindirPovm **out);

// Octahedron POVM for three spins; `mb2` is 1 or 3.
//
// # Safety
// `out` must be null or valid for writes.
enum SpindirStatus spindir_povm_octahedron(int32_t mb2, struct SpindirPovm **out);

// Continuous POVM with `J = j2 / 2`, `m_B = mb2 / 2`.
//
// # Safety
// `out` must be null or valid for writes.
enum SpindirStatus spindir_povm_continuous(int32_t j2, int32_t mb2, struct SpindirPovm **out);

// Completeness residual `max |Σ O_r - 1|`.
//
// # Safety
// `h` must be null or a live handle from this library.
// `out` must be null or valid for writes.
enum SpindirStatus spindir_povm_completeness(const struct SpindirPovm *h, double *out);

// JSON description `{J2, mB2, kind, outcomes}`; release with [`spindir_string_free`].
//
// # Safety
// `h` must be null or a live handle from this library.
// `out` must be null or valid for writes.
enum SpindirStatus spindir_povm_to_json(const struct SpindirPovm *h, char **out);

// # Safety
// `h` must be null or a handle from this library that has not been freed.
void spindir_povm_free(struct SpindirPovm *h);

// # Safety
// `s` must be null or a string from this library that has not been freed.
void spindir_string_free(char *s);

// Simulates the best state for the POVM's reference projection with a discrete
// POVM on one worker.
//
// # Safety
// `h` must be null or a live handle from this library.
// `out` must be null or valid for writes.
enum SpindirStatus spindir_simulate(const struct SpindirPovm *h,
                                    uint64_t trials,
                                    uint64_t seed,
                                    struct SpindirSimReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPINDIR_H */
