#ifndef DEBRIS_LINKER_H
#define DEBRIS_LINKER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum DlStatus {
  DL_STATUS_OK = 0,
  DL_STATUS_NULL_POINTER = 1,
  DL_STATUS_INVALID_INPUT = 2,
  DL_STATUS_PARSE = 3,
  DL_STATUS_DEGENERATE_TIMES = 4,
  DL_STATUS_NO_SOLUTION = 5,
  DL_STATUS_COMPUTATION = 6,
  DL_STATUS_OUT_OF_RANGE = 7,
  DL_STATUS_PANIC = 8,
} DlStatus;

/**
 * Linkage method for [`dl_link`].
 */
typedef enum DlMethod {
  DL_METHOD_INFANG_LINEAR = 0,
  DL_METHOD_INFANG_QUADRATIC = 1,
  DL_METHOD_KEPLERIAN_INTEGRALS = 2,
} DlMethod;

/**
 * Opaque attributable handle.
 */
typedef struct DlAttributable DlAttributable;

/**
 * Opaque list of linkage solutions.
 */
typedef struct DlSolutionSet DlSolutionSet;

/**
 * Opaque radar track handle.
 */
typedef struct DlTrack DlTrack;

/**
 * Orbital elements, angles in degrees.
 */
typedef struct DlElements {
  double epoch_mjd;
  double a_km;
  double e;
  double inc_deg;
  double raan_deg;
  double argp_deg;
  double mean_anomaly_deg;
} DlElements;

/**
 * One linkage solution.
 */
typedef struct DlSolution {
  /**
   * 0 linear, 1 and 2 quadratic roots, 3 Keplerian integrals.
   */
  uint32_t method;
  /**
   * Revolutions of the Lambert branch, −1 when none.
   */
  int32_t revolutions;
  /**
   * Lambert case 1 to 4, 0 when none.
   */
  uint32_t lambert_case;
  bool preferred;
  uint32_t iterations;
  double residual;
  /**
   * Angle corrections (Δα₁, Δδ₁, Δα₂, Δδ₂), rad.
   */
  double delta[4];
  struct DlElements first;
  struct DlElements second;
} DlSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *dl_last_error_message(void);

/**
 * Builds an attributable from its mean epoch (integer MJD plus day
 * fraction), angles in degrees, range in km and its rates in km/s and km/s²,
 * and the station's geocentric latitude, longitude (deg) and radius (km).
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for a handle.
 */
enum DlStatus dl_attributable_new(int64_t mjd_day,
                                  double mjd_fraction,
                                  double alpha_deg,
                                  double delta_deg,
                                  double rho_km,
                                  double rho_dot_km_s,
                                  double rho_ddot_km_s2,
                                  double station_lat_deg,
                                  double station_lon_deg,
                                  double station_radius_km,
                                  struct DlAttributable **out);

/**
 * Parses an attributable from the JSON written by `debris-linker interpolate`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum DlStatus dl_attributable_from_json(const char *json, struct DlAttributable **out);

/**
 * # Safety
 * `att` must come from this library and not be freed twice. Null is ignored.
 */
void dl_attributable_free(struct DlAttributable *att);

/**
 * Parses a radar track file's text.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` writable.
 */
enum DlStatus dl_track_parse(const char *text, struct DlTrack **out);

/**
 * # Safety
 * `track` must come from this library and not be freed twice. Null is ignored.
 */
void dl_track_free(struct DlTrack *track);

/**
 * Reduces a track to its attributable.
 *
 * # Safety
 * `track` must be a live handle and `out` writable.
 */
enum DlStatus dl_track_attributable(const struct DlTrack *track, struct DlAttributable **out);

/**
 * Gibbs orbit of a track (observations 1, 2 and 4).
 *
 * # Safety
 * `track` must be a live handle and `out` writable.
 */
enum DlStatus dl_gibbs(const struct DlTrack *track, struct DlElements *out);

/**
 * Links two attributables. An empty solution set is reported as
 * `NoSolution` with the per-branch failures in the error message; no set is
 * returned in that case.
 *
 * # Safety
 * `first` and `second` must be live handles and `out` writable.
 */
enum DlStatus dl_link(const struct DlAttributable *first,
                      const struct DlAttributable *second,
                      enum DlMethod method,
                      struct DlSolutionSet **out);

/**
 * Number of solutions in a set; 0 for null.
 *
 * # Safety
 * `set` must be a live handle or null.
 */
size_t dl_solution_set_len(const struct DlSolutionSet *set);

/**
 * Copies solution `index` (preferred first) into `out`.
 *
 * # Safety
 * `set` must be a live handle and `out` writable.
 */
enum DlStatus dl_solution_set_get(const struct DlSolutionSet *set,
                                  size_t index,
                                  struct DlSolution *out);

/**
 * # Safety
 * `set` must come from [`dl_link`] and not be freed twice. Null is ignored.
 */
void dl_solution_set_free(struct DlSolutionSet *set);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DEBRIS_LINKER_H */
