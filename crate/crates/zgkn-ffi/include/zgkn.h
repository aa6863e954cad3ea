#ifndef ZGKN_H
#define ZGKN_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum ZgknStatus {
  ZGKN_STATUS_OK = 0,
  ZGKN_STATUS_NULL_POINTER = 1,
  ZGKN_STATUS_INVALID_ARGUMENT = 2,
  ZGKN_STATUS_INADMISSIBLE = 3,
  ZGKN_STATUS_NOT_CONVERGED = 4,
  ZGKN_STATUS_NUMERICAL_FAILURE = 5,
  ZGKN_STATUS_BUFFER_TOO_SMALL = 6,
  ZGKN_STATUS_PANIC = 7,
} ZgknStatus;

// Columns of a wave profile.
typedef enum ZgknColumn {
  ZGKN_COLUMN_R = 0,
  ZGKN_COLUMN_BIG_R = 1,
  ZGKN_COLUMN_OMEGA = 2,
  ZGKN_COLUMN_THETA = 3,
  ZGKN_COLUMN_S = 4,
  ZGKN_COLUMN_BIG_THETA = 5,
  ZGKN_COLUMN_DENSITY = 6,
} ZgknColumn;

typedef enum ZgknBswConvention {
  ZGKN_BSW_CONVENTION_PRINTED = 0,
  ZGKN_BSW_CONVENTION_SIGN_CORRECTED = 1,
} ZgknBswConvention;

// Opaque radial and angular profile.
typedef struct ZgknProfile ZgknProfile;

// Opaque solved bound state.
typedef struct ZgknState ZgknState;

typedef struct ZgknSolveOptions {
  double tol;
  double inner_tol;
  uint32_t max_iter;
  double theta_margin;
} ZgknSolveOptions;

// Convergence diagnostics of a solved state.
typedef struct ZgknConvergence {
  uint32_t iterations;
  double delta_e;
  double residual_lambda;
  double residual_e;
  bool retried;
  bool in_guaranteed_region;
} ZgknConvergence;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *zgkn_last_error_message(void);

// Static NUL-terminated crate version.
const char *zgkn_version(void);

// `γ = −Z·α`.
double zgkn_gamma_from_z(double z);

struct ZgknSolveOptions zgkn_solve_options_default(void);

// Solves for the bound state with windings `(n_theta, n_omega)`.
// `options` may be null for the defaults. On success `*out` owns a new state.
//
// # Safety
// `out` must be valid for writes; `options`, when non-null, must point to a
// valid `ZgknSolveOptions`.
enum ZgknStatus zgkn_solve(double a,
                           double gamma,
                           double kappa,
                           int64_t n_theta,
                           int64_t n_omega,
                           const struct ZgknSolveOptions *options,
                           struct ZgknState **out);

// Releases a state; null is ignored.
//
// # Safety
// `state` must be null or come from `zgkn_solve` and not be freed twice.
void zgkn_state_free(struct ZgknState *state);

// # Safety
// `state` must be a live handle or null; `energy` and `lambda` valid for writes or null.
enum ZgknStatus zgkn_state_eigenvalues(const struct ZgknState *state,
                                       double *energy,
                                       double *lambda);

// # Safety
// `state` must be a live handle or null; `out` valid for writes or null.
enum ZgknStatus zgkn_state_convergence(const struct ZgknState *state, struct ZgknConvergence *out);

// Spectroscopic label such as `2p1/2`, owned by the state.
//
// # Safety
// `state` must be a live handle or null.
const char *zgkn_state_label(const struct ZgknState *state);

// Quantum numbers `(n, ℓ, k, M)` and `2j`.
//
// # Safety
// `state` must be a live handle or null; every out pointer valid for writes or null.
enum ZgknStatus zgkn_state_quantum_numbers(const struct ZgknState *state,
                                           uint32_t *n,
                                           uint32_t *ell,
                                           uint32_t *twice_j,
                                           int64_t *k,
                                           uint32_t *big_m);

// Wave profile of a solved state on `2n + 1` radial and angular points.
//
// # Safety
// `state` must be a live handle or null; `out` valid for writes or null.
enum ZgknStatus zgkn_wave_profile(const struct ZgknState *state,
                                  uint32_t n,
                                  struct ZgknProfile **out);

// # Safety
// `profile` must be null or come from `zgkn_wave_profile` and not be freed twice.
void zgkn_profile_free(struct ZgknProfile *profile);

// Copies a column into `buf`. `*len` holds the capacity on entry and the
// column length on return; a short buffer yields `ZGKN_STATUS_BUFFER_TOO_SMALL`
// with nothing copied.
//
// # Safety
// `profile` must be a live handle or null; `len` valid for reads and writes;
// `buf` valid for `*len` writes unless `*len` is zero.
enum ZgknStatus zgkn_profile_column(const struct ZgknProfile *profile,
                                    enum ZgknColumn col,
                                    double *buf,
                                    uintptr_t *len);

// Peak radius and the two normalization integrals of a profile.
//
// # Safety
// `profile` must be a live handle or null; out pointers valid for writes or null.
enum ZgknStatus zgkn_profile_summary(const struct ZgknProfile *profile,
                                     double *peak_r,
                                     double *radial_norm,
                                     double *angular_norm);

// Sommerfeld energy for radial index `big_m` and spin-orbit number `k`.
//
// # Safety
// `out` must be valid for writes or null.
enum ZgknStatus zgkn_sommerfeld(uint32_t big_m, int64_t k, double gamma, double *out);

// Small-a series for the angular eigenvalue.
//
// # Safety
// `out` must be valid for writes or null.
enum ZgknStatus zgkn_bsw_lambda(enum ZgknBswConvention convention,
                                double kappa,
                                int64_t big_n,
                                double a,
                                double energy,
                                double *out);

// Spin-orbit number `k` with `λ = k` at `a = 0`.
//
// # Safety
// `out` must be valid for writes or null.
enum ZgknStatus zgkn_angular_k(int64_t big_n, double kappa, int64_t *out);

// Copies the last error message into `buf` (truncated, always NUL-terminated).
// Returns the full message length without the terminator.
//
// # Safety
// `buf` must be valid for `len` writes unless `len` is zero.
uintptr_t zgkn_copy_last_error(char *buf, uintptr_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ZGKN_H */
