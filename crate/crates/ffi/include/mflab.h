#ifndef MFLAB_H
#define MFLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MflabStatus {
  MFLAB_STATUS_OK = 0,
  MFLAB_STATUS_NULL_POINTER = 1,
  MFLAB_STATUS_INVALID_ARGUMENT = 2,
  MFLAB_STATUS_UNSTABLE = 3,
  MFLAB_STATUS_DIMENSION_MISMATCH = 4,
  MFLAB_STATUS_STATE_SPACE_TOO_LARGE = 5,
  MFLAB_STATUS_NUMERICAL_FAILURE = 6,
  MFLAB_STATUS_SERIALIZATION = 7,
  MFLAB_STATUS_PANIC = 8,
} MflabStatus;

/**
 * Sparse proportion vector over supernode tuples.
 */
typedef struct MflabProportion MflabProportion;

/**
 * Ring simulator with its current queue lengths and clock.
 */
typedef struct MflabRing MflabRing;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next call into this library on the same thread.
 */
const char *mflab_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *mflab_version(void);

/**
 * Empty proportion vector over `(k+1)`-tuples.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum MflabStatus mflab_proportion_new(size_t k, struct MflabProportion **out);

/**
 * # Safety
 * `p` must come from this library and not be used afterwards. NULL is ignored.
 */
void mflab_proportion_free(struct MflabProportion *p);

/**
 * Sets the fraction at tuple `coords[0..len]`; `len` must be `k + 1`.
 *
 * # Safety
 * `p` must be a live handle and `coords` valid for `len` reads.
 */
enum MflabStatus mflab_proportion_set(struct MflabProportion *p,
                                      const uint32_t *coords,
                                      size_t len,
                                      double value);

/**
 * Fraction at tuple `coords[0..len]`; zero when absent.
 *
 * # Safety
 * `p` must be a live handle, `coords` valid for `len` reads, `out` writable.
 */
enum MflabStatus mflab_proportion_get(const struct MflabProportion *p,
                                      const uint32_t *coords,
                                      size_t len,
                                      double *out);

/**
 * Number of stored tuples.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum MflabStatus mflab_proportion_len(const struct MflabProportion *p, size_t *out);

/**
 * JSON object mapping `"u0,...,uk"` to fractions. Release the string with
 * [`mflab_string_free`].
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum MflabStatus mflab_proportion_to_json(const struct MflabProportion *p, char **out);

/**
 * Parses the format written by [`mflab_proportion_to_json`].
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum MflabStatus mflab_proportion_from_json(const char *json, struct MflabProportion **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards. NULL is ignored.
 */
void mflab_string_free(char *s);

/**
 * `sup_u |a_u - b_u| / (u_k + 1)`.
 *
 * # Safety
 * `a` and `b` must be live handles and `out` writable.
 */
enum MflabStatus mflab_rho_distance(const struct MflabProportion *a,
                                    const struct MflabProportion *b,
                                    double *out);

/**
 * Half the l1 distance.
 *
 * # Safety
 * `a` and `b` must be live handles and `out` writable.
 */
enum MflabStatus mflab_total_variation(const struct MflabProportion *a,
                                       const struct MflabProportion *b,
                                       double *out);

/**
 * Stationary law of JSQ among `k + 1` queues truncated at `cap`.
 * `residual` may be NULL.
 *
 * # Safety
 * `out` must be writable; `residual` NULL or writable.
 */
enum MflabStatus mflab_jsq_stationary(size_t k,
                                      double lambda,
                                      double mu,
                                      uint32_t cap,
                                      struct MflabProportion **out,
                                      double *residual);

/**
 * Fixed point of the mean-field equations, reached by integrating from
 * empty queues until `max |dz/dt| <= tolerance`. `residual` may be NULL.
 *
 * # Safety
 * `out` must be writable; `residual` NULL or writable.
 */
enum MflabStatus mflab_meanfield_fixed_point(size_t k,
                                             double lambda,
                                             double mu,
                                             uint32_t cap,
                                             double tolerance,
                                             struct MflabProportion **out,
                                             double *residual);

/**
 * Ring of `n_nodes` empty queues, each routing to the shortest of itself
 * and its next `k` neighbours.
 *
 * # Safety
 * `out` must be writable.
 */
enum MflabStatus mflab_ring_new(size_t n_nodes,
                                size_t k,
                                double lambda,
                                double mu,
                                uint64_t seed,
                                uint64_t stream,
                                struct MflabRing **out);

/**
 * # Safety
 * `r` must come from this library and not be used afterwards. NULL is ignored.
 */
void mflab_ring_free(struct MflabRing *r);

/**
 * Simulates up to absolute time `until`. Earlier times are a no-op.
 *
 * # Safety
 * `r` must be a live handle.
 */
enum MflabStatus mflab_ring_run(struct MflabRing *r, double until);

/**
 * Current simulation time.
 *
 * # Safety
 * `r` must be a live handle and `out` writable.
 */
enum MflabStatus mflab_ring_time(const struct MflabRing *r, double *out);

/**
 * Copies the queue lengths into `buf`, which must hold `n_nodes` entries.
 *
 * # Safety
 * `r` must be a live handle and `buf` valid for `len` writes.
 */
enum MflabStatus mflab_ring_queues(const struct MflabRing *r, uint32_t *buf, size_t len);

/**
 * Current empirical proportion vector of the ring, as a new handle.
 *
 * # Safety
 * `r` must be a live handle and `out` writable.
 */
enum MflabStatus mflab_ring_proportion(const struct MflabRing *r, struct MflabProportion **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MFLAB_H */
