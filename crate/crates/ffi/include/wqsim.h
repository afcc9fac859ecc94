#ifndef WQSIM_H
#define WQSIM_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WqsimLabel {
  WQSIM_LABEL_TWO_PHOTON = 0,
  WQSIM_LABEL_ONE_PHOTON_TRAPPED = 1,
  WQSIM_LABEL_DARK_STATE = 2,
  WQSIM_LABEL_MIXED = 3,
} WqsimLabel;

typedef enum WqsimStatus {
  WQSIM_STATUS_OK = 0,
  WQSIM_STATUS_NULL_POINTER = 1,
  WQSIM_STATUS_INVALID_GEOMETRY = 2,
  WQSIM_STATUS_INVALID_COUPLING = 3,
  WQSIM_STATUS_INVALID_FREQUENCY = 4,
  WQSIM_STATUS_INVALID_GRID = 5,
  WQSIM_STATUS_INVALID_ARGUMENT = 6,
  WQSIM_STATUS_STEP_TOO_LARGE = 7,
  WQSIM_STATUS_NON_FINITE_STATE = 8,
  WQSIM_STATUS_OUT_OF_RANGE = 9,
  WQSIM_STATUS_MISSING_ORIGIN = 10,
  WQSIM_STATUS_UNKNOWN_PRESET = 11,
  WQSIM_STATUS_PARSE_ERROR = 12,
  WQSIM_STATUS_IO_ERROR = 13,
  WQSIM_STATUS_PANIC = 14,
} WqsimStatus;

/**
 * One or two atoms and their shared resonance.
 */
typedef struct WqsimConfig WqsimConfig;

/**
 * Atomic amplitudes on the integrator's time grid.
 */
typedef struct WqsimTrajectory WqsimTrajectory;

typedef struct WqsimClass {
  enum WqsimLabel label;
  /**
   * Long-time `|c_ee|^2` in the Markov limit.
   */
  double predicted_cee_sq;
  bool outside_markov_regime;
} WqsimClass;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *wqsim_version(void);

/**
 * Copies the last error message of this thread into `buf` (truncated and
 * NUL-terminated) and returns its full length in bytes, or 0 if none.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t wqsim_last_error(char *buf, size_t len);

/**
 * Creates an empty network; add one or two atoms before use.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum WqsimStatus wqsim_config_new(double omega_a, struct WqsimConfig **out);

/**
 * Appends an atom, then validates the network so far.
 *
 * # Safety
 * `config` must come from this library and not be freed.
 */
enum WqsimStatus wqsim_config_add_atom(struct WqsimConfig *config,
                                       double z,
                                       double gamma_l,
                                       double gamma_r);

/**
 * Reads a scenario file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum WqsimStatus wqsim_config_from_file(const char *path, struct WqsimConfig **out);

/**
 * Headline network of a named preset.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum WqsimStatus wqsim_config_from_preset(const char *name, struct WqsimConfig **out);

/**
 * Number of atoms in the network.
 *
 * # Safety
 * `config` must come from this library; `out` must be valid.
 */
enum WqsimStatus wqsim_config_atom_count(const struct WqsimConfig *config, size_t *out);

/**
 * # Safety
 * `config` must be null or come from this library, and not be used again.
 */
void wqsim_config_free(struct WqsimConfig *config);

/**
 * Markov-limit steady-state classification.
 *
 * # Safety
 * `config` must come from this library; `out` must be valid.
 */
enum WqsimStatus wqsim_classify(const struct WqsimConfig *config, struct WqsimClass *out);

/**
 * `c_ee(t)` with both atoms excited at `t = 0` (one component). A
 * non-positive `t_end` or `dt` selects the default.
 *
 * # Safety
 * `config` must come from this library; `out` must be valid.
 */
enum WqsimStatus wqsim_solve_cee(const struct WqsimConfig *config,
                                 double t_end,
                                 double dt,
                                 struct WqsimTrajectory **out);

/**
 * Single-excitation amplitudes, one component per atom, with atom 1
 * excited at `t = 0`. Defaults as for [`wqsim_solve_cee`].
 *
 * # Safety
 * `config` must come from this library; `out` must be valid.
 */
enum WqsimStatus wqsim_solve_single_excitation(const struct WqsimConfig *config,
                                               double t_end,
                                               double dt,
                                               struct WqsimTrajectory **out);

/**
 * Number of time nodes and components.
 *
 * # Safety
 * `traj` must come from this library; outputs must be valid.
 */
enum WqsimStatus wqsim_trajectory_shape(const struct WqsimTrajectory *traj,
                                        size_t *nodes,
                                        size_t *dim);

/**
 * Time and value of one component at node `index`.
 *
 * # Safety
 * `traj` must come from this library; outputs must be valid.
 */
enum WqsimStatus wqsim_trajectory_node(const struct WqsimTrajectory *traj,
                                       size_t index,
                                       size_t component,
                                       double *t,
                                       double *re,
                                       double *im);

/**
 * One component at an arbitrary time, by the solver's own interpolant.
 *
 * # Safety
 * `traj` must come from this library; outputs must be valid.
 */
enum WqsimStatus wqsim_trajectory_sample(const struct WqsimTrajectory *traj,
                                         double t,
                                         size_t component,
                                         double *re,
                                         double *im);

/**
 * # Safety
 * `traj` must be null or come from this library, and not be used again.
 */
void wqsim_trajectory_free(struct WqsimTrajectory *traj);

/**
 * Runs a preset and writes its data set into `out_dir`.
 *
 * # Safety
 * Both arguments must be NUL-terminated strings.
 */
enum WqsimStatus wqsim_run_preset(const char *name, const char *out_dir);

/**
 * Runs a scenario file and writes its data set into `out_dir`.
 *
 * # Safety
 * Both arguments must be NUL-terminated strings.
 */
enum WqsimStatus wqsim_simulate(const char *config_path, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WQSIM_H */
