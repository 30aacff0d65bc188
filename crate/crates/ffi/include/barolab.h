#ifndef BAROLAB_H
#define BAROLAB_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stddef.h>
#include <stdint.h>

/**
 * Result codes.
 */
typedef enum BlStatus {
  BL_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  BL_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  BL_STATUS_INVALID_UTF8 = 2,
  /**
   * Invalid configuration, grid or parameter.
   */
  BL_STATUS_CONFIG = 3,
  /**
   * The computation failed (non-finite state, no convergence).
   */
  BL_STATUS_SOLVER = 4,
  /**
   * An output buffer is too small; the required length was reported.
   */
  BL_STATUS_BUFFER_TOO_SMALL = 5,
  /**
   * An internal panic was caught.
   */
  BL_STATUS_PANIC = 6,
} BlStatus;

/**
 * Opaque simulation handle.
 */
typedef struct BlSimulation BlSimulation;

/**
 * Energy split at the current time.
 */
typedef struct BlEnergy {
  double kinetic;
  double potential;
  double total;
} BlEnergy;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null if the last call
 * succeeded. Valid until the next call into this library on the thread.
 */
const char *bl_last_error(void);

/**
 * Library version as a static nul-terminated string.
 */
const char *bl_version(void);

/**
 * Builds a simulation from a scenario JSON document. Relative data paths in
 * the scenario resolve against `base_dir`, which may be null.
 *
 * # Safety
 * `scenario_json` and a non-null `base_dir` are nul-terminated strings;
 * `out` is writable.
 */
enum BlStatus bl_simulation_new(const char *scenario_json,
                                const char *base_dir,
                                struct BlSimulation **out);

/**
 * Releases a simulation. Null is ignored.
 *
 * # Safety
 * `sim` is null or came from [`bl_simulation_new`] and was not freed.
 */
void bl_simulation_free(struct BlSimulation *sim);

/**
 * Integrates forward until time `t_target`. A target before the current
 * time is a config error; on a solver failure the state is left unchanged.
 *
 * # Safety
 * `sim` is a live handle.
 */
enum BlStatus bl_simulation_advance(struct BlSimulation *sim, double t_target);

/**
 * Current simulation time.
 *
 * # Safety
 * `sim` is a live handle and `out` is writable.
 */
enum BlStatus bl_simulation_time(const struct BlSimulation *sim, double *out);

/**
 * Kinetic, potential and total energy of the current state.
 *
 * # Safety
 * `sim` is a live handle and `out` is writable.
 */
enum BlStatus bl_simulation_energy(const struct BlSimulation *sim, struct BlEnergy *out);

/**
 * Total mass of the current state.
 *
 * # Safety
 * `sim` is a live handle and `out` is writable.
 */
enum BlStatus bl_simulation_mass(const struct BlSimulation *sim, double *out);

/**
 * Number of interior cells.
 *
 * # Safety
 * `sim` is a live handle and `out` is writable.
 */
enum BlStatus bl_simulation_cell_count(const struct BlSimulation *sim, size_t *out);

/**
 * Copies the interior densities, axis 0 fastest, into `buf`. `written`
 * (may be null) receives the cell count; if `len` is smaller the call
 * returns [`BlStatus::BufferTooSmall`] and copies nothing.
 *
 * # Safety
 * `sim` is a live handle and `buf` holds `len` doubles.
 */
enum BlStatus bl_simulation_copy_density(const struct BlSimulation *sim,
                                         double *buf,
                                         size_t len,
                                         size_t *written);

/**
 * Pressure `a rho^gamma` and pressure potential of the isentropic law.
 * Either output may be null.
 *
 * # Safety
 * Non-null outputs are writable.
 */
enum BlStatus bl_isentropic_pressure(double rho,
                                     double a,
                                     double gamma,
                                     double *p_out,
                                     double *potential_out);

/**
 * Static density on `n` uniform cells of `[0, length]` for the potential
 * given at cell centers, with total mass `mass` and law `a rho^gamma`.
 * Writes `n` densities to `rho_out` and the constant to `c_out` (may be
 * null).
 *
 * # Safety
 * `potential` holds `n` doubles and `rho_out` has room for `n`.
 */
enum BlStatus bl_static_solve_1d(const double *potential,
                                 size_t n,
                                 double length,
                                 double mass,
                                 double a,
                                 double gamma,
                                 double *rho_out,
                                 double *c_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BAROLAB_H */
