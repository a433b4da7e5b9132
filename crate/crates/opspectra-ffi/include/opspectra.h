/* C interface to the opspectra spectral-statistics library. */

#ifndef OPSPECTRA_H
#define OPSPECTRA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result class of an FFI call.
typedef enum OpsStatus {
  // The call succeeded.
  OPS_STATUS_OK = 0,
  // A parameter or pointer was outside the documented domain.
  OPS_STATUS_INVALID_ARGUMENT = 1,
  // A numerical contract failed (non-convergence, accuracy loss).
  OPS_STATUS_NUMERICAL = 2,
  // An internal invariant was violated; report as a bug.
  OPS_STATUS_INTERNAL = 3,
} OpsStatus;

// Edge roll-off used by the finite-size radial fit.
typedef enum OpsEdgeVariant {
  // Complementary error function, value 1 at the support edge.
  OPS_EDGE_VARIANT_STANDARD_ERFC = 0,
  // Gaussian tail, value 1/2 at the support edge.
  OPS_EDGE_VARIANT_GAUSSIAN_Q = 1,
} OpsEdgeVariant;

// A quantum operation on a d-dimensional system, held behind an opaque
// pointer. Created by `ops_random_map_new`, `ops_baker_map_new` or
// `ops_map_compose`; released with `ops_map_free`.
typedef struct OpsMap OpsMap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *ops_version(void);

// Message of the most recent failure on the calling thread, or null if no
// call has failed yet. The pointer stays valid until the next failing call
// on the same thread.
const char *ops_last_error(void);

// Eigenvalues of one complex Ginibre matrix with entry standard deviation
// scale/sqrt(dim), drawn from the (seed, stream) generator. Writes `dim`
// values into each of `out_re` and `out_im`.
//
// # Safety
// `out_re` and `out_im` must point to writable arrays of `dim` doubles.
enum OpsStatus ops_ginibre_spectrum(size_t dim,
                                    double scale,
                                    uint64_t seed,
                                    uint64_t stream,
                                    double *out_re,
                                    double *out_im);

// New random quantum operation on a d-dimensional system coupled to an
// env-dimensional environment, drawn from the (seed, stream) generator.
// On success `*out` owns the map.
//
// # Safety
// `out` must point to a writable `OpsMap*` slot.
enum OpsStatus ops_random_map_new(size_t d,
                                  size_t env,
                                  uint64_t seed,
                                  uint64_t stream,
                                  struct OpsMap **out);

// New stochastic baker operation: `steps` applications of the generalized
// baker unitary with phases (phi1, phi2), coupled to an env-dimensional
// environment by a rank d/env projective measurement. On success `*out`
// owns the map.
//
// # Safety
// `out` must point to a writable `OpsMap*` slot.
enum OpsStatus ops_baker_map_new(size_t d,
                                 size_t env,
                                 size_t steps,
                                 double phi1,
                                 double phi2,
                                 struct OpsMap **out);

// Composition of `count` maps, applied left to right: maps[0] acts first.
// All maps must share one system dimension. On success `*out` owns the
// composite; the inputs remain owned by the caller.
//
// # Safety
// `maps` must point to `count` valid `OpsMap*` handles and `out` to a
// writable `OpsMap*` slot.
enum OpsStatus ops_map_compose(const struct OpsMap *const *maps, size_t count, struct OpsMap **out);

// System dimension d of a map, or 0 for a null handle.
size_t ops_map_dim(const struct OpsMap *map);

// Bulk spectrum of a map: the d^2 - 1 superoperator eigenvalues away from
// the fixed leading eigenvalue 1. Writes d^2 - 1 values into each of
// `out_re` and `out_im`.
//
// # Safety
// `out_re` and `out_im` must point to writable arrays of d^2 - 1 doubles.
enum OpsStatus ops_map_bulk_spectrum(const struct OpsMap *map, double *out_re, double *out_im);

// Rescaled squared singular values of a map's superoperator under the
// drop-leading protocol: the largest value is removed, the rest are
// renormalized to mean 1. Writes d^2 - 1 values into `out`.
//
// # Safety
// `out` must point to a writable array of d^2 - 1 doubles.
enum OpsStatus ops_map_singular_values(const struct OpsMap *map, double *out);

// Shannon entropy of the map's normalized squared singular values, relative
// to the uniform distribution: S - ln(d^2 - 1), written to `*out`.
//
// # Safety
// `out` must point to a writable double.
enum OpsStatus ops_map_entropy(const struct OpsMap *map, double *out);

// Release a map handle. Null is ignored.
//
// # Safety
// `map` must be a handle returned by this library, released at most once.
void ops_map_free(struct OpsMap *map);

// Nonzero rescaled squared singular values of the s-th power of a
// stochastic baker operation, computed through its rank-(d^2/env)
// truncation. Writes d^2/env - 1 values into `out`.
//
// # Safety
// `out` must point to a writable array of d^2/env - 1 doubles.
enum OpsStatus ops_baker_sstep_singular(size_t d,
                                        size_t env,
                                        size_t steps,
                                        double phi1,
                                        double phi2,
                                        size_t s,
                                        double *out);

// Fuss-Catalan density of the given order (1, 2 or 3) evaluated at `len`
// points `xs`, written to `out`.
//
// # Safety
// `xs` and `out` must point to arrays of `len` doubles; `out` writable.
enum OpsStatus ops_fc_density(size_t order, const double *xs, size_t len, double *out);

// Mean of -x ln x under the Fuss-Catalan density of the given order,
// written to `*out`.
//
// # Safety
// `out` must point to a writable double.
enum OpsStatus ops_fc_mean_entropy(size_t order, double *out);

// Fit the finite-size edge parameter q to `len` pooled eigenvalue radii:
// the radii are binned into a `bins`-cell histogram and matched against the
// order-s radial law with support radius `xi` at matrix dimension `n`. The
// fitted q is written to `*out_q`.
//
// # Safety
// `radii` must point to `len` doubles and `out_q` to a writable double.
enum OpsStatus ops_fit_q(const double *radii,
                         size_t len,
                         size_t s,
                         double xi,
                         size_t n,
                         size_t bins,
                         enum OpsEdgeVariant variant,
                         double *out_q);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OPSPECTRA_H */
