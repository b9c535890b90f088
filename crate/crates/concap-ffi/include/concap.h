#ifndef CONCAP_H
#define CONCAP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Center constraint kinds for [`concap_maximize`].
 */
enum ConcapConstraintKind
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  /**
   * Centers in the closed disk |z| <= r_max.
   */
  ConcapConstraintKind_Disk = 0,
  /**
   * Centers on the real interval [-r_max, r_max].
   */
  ConcapConstraintKind_Interval = 1,
};
#ifndef __cplusplus
typedef int32_t ConcapConstraintKind;
#endif // __cplusplus

/**
 * Status code of every fallible call.
 */
enum ConcapStatus
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  ConcapStatus_Ok = 0,
  /**
   * Argument outside its mathematical domain.
   */
  ConcapStatus_DomainError = 1,
  /**
   * Disks overlap or touch.
   */
  ConcapStatus_OverlapError = 2,
  /**
   * No feasible configuration exists or the start is infeasible.
   */
  ConcapStatus_InfeasibleError = 3,
  /**
   * Iterative solver missed its tolerance.
   */
  ConcapStatus_NonConvergence = 4,
  /**
   * Linear system numerically singular.
   */
  ConcapStatus_SingularSystem = 5,
  ConcapStatus_InvalidArgument = 6,
  /**
   * Null pointer passed where an object was required.
   */
  ConcapStatus_NullPointer = 7,
  /**
   * Unexpected internal failure.
   */
  ConcapStatus_InternalError = 8,
};
#ifndef __cplusplus
typedef int32_t ConcapStatus;
#endif // __cplusplus

/**
 * Opaque constellation builder.
 */
typedef struct ConcapConstellation ConcapConstellation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates an empty constellation builder; free with
 * [`concap_constellation_free`].
 */
struct ConcapConstellation *concap_constellation_new(void);

/**
 * Releases a builder. Passing null is a no-op.
 */
void concap_constellation_free(struct ConcapConstellation *c);

/**
 * Appends a hyperbolic disk with center (cx, cy) and hyperbolic radius r.
 */
ConcapStatus concap_constellation_add_disk(struct ConcapConstellation *c,
                                           double cx,
                                           double cy,
                                           double r);

/**
 * Number of disks currently in the builder; 0 for null.
 */
uintptr_t concap_constellation_len(const struct ConcapConstellation *c);

/**
 * Capacity of the condenser formed by the unit disk and the constellation,
 * discretized with n points per boundary component (even, >= 16).
 */
ConcapStatus concap_capacity(const struct ConcapConstellation *c, uintptr_t n, double *out_cap);

/**
 * Per-disk capacity contributions b_k; `out_b` must hold as many doubles as
 * there are disks.
 */
ConcapStatus concap_capacity_contributions(const struct ConcapConstellation *c,
                                           uintptr_t n,
                                           double *out_b);

/**
 * Hyperbolic distance between (ax, ay) and (bx, by) in the unit disk.
 */
ConcapStatus concap_hyp_distance(double ax, double ay, double bx, double by, double *out);

/**
 * Closed-form capacity of a single hyperbolic disk of radius r.
 */
ConcapStatus concap_hyp_disk_capacity(double r, double *out);

/**
 * Hyperbolic radius of the centered disk with the given capacity.
 */
ConcapStatus concap_condense_radius(double cap, double *out);

/**
 * The Grotzsch modulus mu(r), r in (0, 1).
 */
ConcapStatus concap_mu(double r, double *out);

/**
 * Complete elliptic integral K(r) in the modulus convention, r in [0, 1).
 */
ConcapStatus concap_ellip_k(double r, double *out);

/**
 * Capacity of one hyperbolic segment of length l.
 */
ConcapStatus concap_segment_capacity(double l, double *out);

/**
 * Capacity of five radial segments of length l merged at the origin.
 */
ConcapStatus concap_star_capacity_5(double l, double *out);

/**
 * Maximizes the capacity of m disks with the given hyperbolic radii over
 * their centers. `radii` holds m values; `out_centers` must hold 2 m doubles
 * and receives the centers interleaved as x0, y0, x1, y1, ...; the achieved
 * capacity lands in `out_cap`. Deterministic for a fixed seed.
 */
ConcapStatus concap_maximize(const double *radii,
                             uintptr_t m,
                             ConcapConstraintKind kind,
                             double r_max,
                             uint64_t seed,
                             uintptr_t starts,
                             double *out_cap,
                             double *out_centers);

/**
 * Library version as a static NUL-terminated string.
 */
const char *concap_version(void);

/**
 * Copies the last error message of this thread into `buf` (at most `len`
 * bytes including the NUL terminator) and returns the full message length.
 */
uintptr_t concap_last_error_message(char *buf, uintptr_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONCAP_H */
