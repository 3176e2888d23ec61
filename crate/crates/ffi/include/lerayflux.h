#ifndef LERAYFLUX_H
#define LERAYFLUX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Values 2 to 6 match the exit codes of the `lerayflux` binary.
 */
typedef enum LfStatus {
  LF_STATUS_OK = 0,
  LF_STATUS_NULL_POINTER = 1,
  LF_STATUS_INVALID_PARAMETER = 2,
  LF_STATUS_CFL = 3,
  LF_STATUS_IO = 4,
  LF_STATUS_SHAPE = 5,
  LF_STATUS_RESOLUTION = 6,
  LF_STATUS_PANIC = 7,
} LfStatus;

typedef enum LfInitialKind {
  LF_INITIAL_KIND_TAYLOR_GREEN = 0,
  LF_INITIAL_KIND_SINGLE_MODE = 1,
  LF_INITIAL_KIND_RANDOM_DIV_FREE = 2,
} LfInitialKind;

typedef enum LfField {
  LF_FIELD_U = 0,
  LF_FIELD_V = 1,
  LF_FIELD_Z = 2,
} LfField;

/**
 * Opaque model handle.
 */
typedef struct LfModel LfModel;

/**
 * Opaque state handle.
 */
typedef struct LfState LfState;

/**
 * Model constants, mirroring the TOML `[model]` section.
 */
typedef struct LfParams {
  double alpha;
  double nu;
  double diff_d;
  double k_rate;
  double activation;
  double theta_i;
  double theta_bar;
  /**
   * Nonzero adds viscosity and species diffusion.
   */
  int viscous;
} LfParams;

/**
 * Initial-condition shape parameters.
 */
typedef struct LfInitialSpec {
  double amplitude;
  uint64_t seed;
  double slope;
  double kmax;
  double z_amplitude;
  double z_mean;
} LfInitialSpec;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len − 1` bytes). Returns the full message length.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t lf_last_error(char *buf, size_t len);

/**
 * Default constants: inviscid, reaction off.
 */
struct LfParams lf_params_default(void);

struct LfInitialSpec lf_initial_spec_default(void);

/**
 * # Safety
 * `params` must be null or valid; `out` must be null or writable.
 */
enum LfStatus lf_model_new(const struct LfParams *params, struct LfModel **out);

/**
 * # Safety
 * `model` must be null or a handle from [`lf_model_new`] not yet freed.
 */
void lf_model_free(struct LfModel *model);

/**
 * Initial state on a `dim`-dimensional `n`-point grid.
 *
 * # Safety
 * `spec` must be null or valid; `out` must be null or writable.
 */
enum LfStatus lf_state_initial(enum LfInitialKind kind,
                               size_t dim,
                               size_t n,
                               double alpha,
                               const struct LfInitialSpec *spec,
                               struct LfState **out);

/**
 * Load a snapshot file written by the simulator.
 *
 * # Safety
 * `path` must be null or a NUL-terminated string; `out` must be null or writable.
 */
enum LfStatus lf_state_load(const char *path, struct LfState **out);

/**
 * # Safety
 * `state` must be null or a live handle; `path` must be null or NUL-terminated.
 */
enum LfStatus lf_state_save(const struct LfState *state, const char *path);

/**
 * # Safety
 * `state` must be null or a handle not yet freed.
 */
void lf_state_free(struct LfState *state);

/**
 * Advance `state` in place by `steps` RK4 steps of size `dt`.
 *
 * # Safety
 * `model` and `state` must be null or live handles.
 */
enum LfStatus lf_state_step(const struct LfModel *model,
                            struct LfState *state,
                            double dt,
                            size_t steps);

/**
 * Time, grid size and energies `‖u‖²`, `‖Z‖²` of a state. Null outputs are skipped.
 *
 * # Safety
 * `state` must be null or a live handle; outputs must be null or writable.
 */
enum LfStatus lf_state_info(const struct LfState *state,
                            double *t,
                            size_t *dim,
                            size_t *n,
                            double *e_u,
                            double *e_z);

/**
 * `Π_κ` of the velocity `u` for each of `len` increasing cutoffs.
 *
 * # Safety
 * `kappas` must hold `len` values and `pi` must have room for `len`.
 */
enum LfStatus lf_flux(const struct LfState *state, const double *kappas, size_t len, double *pi);

/**
 * `∫|D_{1,ε}|` and `∫|D_{2,ε}|`. `algebraic` selects the commutator form
 * instead of the increment quadrature with `points` nodes per axis.
 *
 * # Safety
 * `state` must be a live handle; `d1` and `d2` must be writable.
 */
enum LfStatus lf_defect(const struct LfState *state,
                        double eps,
                        int algebraic,
                        size_t points,
                        double *d1,
                        double *d2);

/**
 * Inhomogeneous Besov norm of one field; pass `INFINITY` for `p` or `q = ∞`.
 *
 * # Safety
 * `state` must be a live handle; `out` must be writable.
 */
enum LfStatus lf_besov_norm(const struct LfState *state,
                            enum LfField field,
                            double s,
                            double p,
                            double q,
                            double *out);

/**
 * Extrapolated shock dissipation `|∫D|` of the jump-`sigma` sawtooth on `n`
 * points over a decreasing geometric ladder of `len ≥ 3` scales.
 *
 * # Safety
 * `eps` must hold `len` values; `out` must be writable.
 */
enum LfStatus lf_burgers_dissipation(size_t n,
                                     double sigma,
                                     const double *eps,
                                     size_t len,
                                     double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LERAYFLUX_H */
