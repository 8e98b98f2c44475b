/* SPDX-License-Identifier: Apache-2.0 */

#ifndef CZSCATTER_H
#define CZSCATTER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum CzsStatus {
  CZS_STATUS_OK = 0,
  CZS_STATUS_NULL_POINTER = 1,
  CZS_STATUS_INVALID_ARGUMENT = 2,
  CZS_STATUS_NUMERICAL_FAILURE = 3,
  /**
   * The wave vector hits a resonance pole of the coupling.
   */
  CZS_STATUS_POLE = 4,
  CZS_STATUS_PANIC = 5,
} CzsStatus;

/**
 * Positions of the two centers and the mirror.
 */
typedef struct CzsGeometry CzsGeometry;

/**
 * Coupling between the flying particle and a center.
 */
typedef struct CzsModel CzsModel;

/**
 * Stationary state of one spin configuration.
 */
typedef struct CzsSolution CzsSolution;

/**
 * Complex number as two doubles.
 */
typedef struct CzsComplex {
  double re;
  double im;
} CzsComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static nul-terminated string.
 */
const char *czs_version(void);

/**
 * Copies the calling thread's last error message into `buf` (truncated and
 * nul-terminated) and returns the full message length without the nul.
 * Returns 0 when there is no error. `buf` may be null to query the length.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes of writes.
 */
size_t czs_last_error_message(char *buf, size_t len);

/**
 * Massive particle with `mass` and delta barrier height `barrier`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CzsStatus czs_model_massive(double mass, double barrier, struct CzsModel **out);

/**
 * Massive particle whose dimensionless coupling at `k0` equals `gamma`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CzsStatus czs_model_massive_from_gamma(double gamma,
                                            double k0,
                                            double mass,
                                            struct CzsModel **out);

/**
 * Photon in a waveguide coupled to three-level atoms.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CzsStatus czs_model_photonic(double velocity,
                                  double omega0,
                                  double coupling,
                                  struct CzsModel **out);

/**
 * # Safety
 * `model` must be null or a handle from a `czs_model_*` constructor, not yet freed.
 */
void czs_model_free(struct CzsModel *model);

/**
 * Geometry with the second center at `x2` and the mirror at `x3`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CzsStatus czs_geometry_new(double x2, double x3, struct CzsGeometry **out);

/**
 * Geometry of the CZ regime `(n, n_prime)` at wave vector `k0`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CzsStatus czs_geometry_cz_regime(uint32_t n,
                                      uint32_t n_prime,
                                      double k0,
                                      struct CzsGeometry **out);

/**
 * Writes `x2` and `x3` of a geometry.
 *
 * # Safety
 * `geometry` must be a live handle; outputs valid for writes.
 */
enum CzsStatus czs_geometry_positions(const struct CzsGeometry *geometry, double *x2, double *x3);

/**
 * # Safety
 * `geometry` must be null or a live handle.
 */
void czs_geometry_free(struct CzsGeometry *geometry);

/**
 * Stationary state for spins `(alpha1, alpha2)`, each 0 or 1, at wave vector `k`.
 *
 * # Safety
 * Handles must be live; `out` valid for writes.
 */
enum CzsStatus czs_solve(const struct CzsModel *model,
                         const struct CzsGeometry *geometry,
                         uint8_t alpha1,
                         uint8_t alpha2,
                         double k,
                         struct CzsSolution **out);

/**
 * Reflection amplitude of a solution.
 *
 * # Safety
 * `solution` must be live; `out` valid for writes.
 */
enum CzsStatus czs_solution_reflection(const struct CzsSolution *solution, struct CzsComplex *out);

/**
 * Largest boundary-condition violation of a solution, relative to its amplitudes.
 *
 * # Safety
 * `solution` must be live; `out` valid for writes.
 */
enum CzsStatus czs_solution_residual(const struct CzsSolution *solution, double *out);

/**
 * Wave function at position `x`.
 *
 * # Safety
 * Handles must be live; `out` valid for writes.
 */
enum CzsStatus czs_solution_wavefunction(const struct CzsSolution *solution,
                                         const struct CzsGeometry *geometry,
                                         double x,
                                         struct CzsComplex *out);

/**
 * # Safety
 * `solution` must be null or a live handle.
 */
void czs_solution_free(struct CzsSolution *solution);

/**
 * Writes the four reflection amplitudes in the order 00, 01, 10, 11.
 *
 * # Safety
 * Handles must be live; `out` valid for 4 writes.
 */
enum CzsStatus czs_reflection_gate(const struct CzsModel *model,
                                   const struct CzsGeometry *geometry,
                                   double k,
                                   struct CzsComplex *out);

/**
 * Process fidelity of the reflection gate at `k` against CZ.
 *
 * # Safety
 * Handles must be live; `out` valid for writes.
 */
enum CzsStatus czs_gate_fidelity(const struct CzsModel *model,
                                 const struct CzsGeometry *geometry,
                                 double k,
                                 double *out);

/**
 * Large-coupling fidelity against CZ at wave vector `k`.
 *
 * # Safety
 * `geometry` must be live; `out` valid for writes.
 */
enum CzsStatus czs_fidelity_closed_form(const struct CzsGeometry *geometry, double k, double *out);

/**
 * Decoherence-time bound in seconds for group velocity `velocity` (m/s) and
 * vacuum wavelength `wavelength` (m).
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CzsStatus czs_working_condition(double velocity, double wavelength, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CZSCATTER_H */
