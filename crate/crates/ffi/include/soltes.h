#ifndef SOLTES_H
#define SOLTES_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Written in place of a delta when deleting the vertex disconnects the digraph.
 */
#define SOLTES_DELTA_DISCONNECTED (-9223372036854775807 - 1)

typedef enum SoltesFormat {
  SOLTES_FORMAT_EDGE_LIST = 0,
  SOLTES_FORMAT_JSON = 1,
  SOLTES_FORMAT_DOT = 2,
} SoltesFormat;

typedef enum SoltesMode {
  SOLTES_MODE_SYMMETRIC = 0,
  SOLTES_MODE_EXHAUSTIVE = 1,
  /**
   * Brute-force check of `sample_size` evenly spaced vertices.
   */
  SOLTES_MODE_SAMPLE = 2,
} SoltesMode;

typedef enum SoltesStatus {
  SOLTES_STATUS_OK = 0,
  SOLTES_STATUS_NULL_POINTER = 1,
  SOLTES_STATUS_INVALID_ARGUMENT = 2,
  SOLTES_STATUS_PARSE = 3,
  SOLTES_STATUS_NOT_STRONGLY_CONNECTED = 4,
  /**
   * The construction search found no certificate.
   */
  SOLTES_STATUS_SEARCH_MISS = 5,
  SOLTES_STATUS_PANIC = 6,
} SoltesStatus;

/**
 * Opaque digraph handle.
 */
typedef struct SoltesDigraph SoltesDigraph;

typedef struct SoltesDegreeStats {
  size_t min_out;
  size_t max_out;
  size_t min_in;
  size_t max_in;
} SoltesDegreeStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *soltes_version(void);

/**
 * Message for the last failed call on this thread, or NULL after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *soltes_last_error_message(void);

/**
 * Builds `D(n, S)` from `len` differences at `s`.
 *
 * # Safety
 * `s` must point to `len` readable values (it may be NULL when `len` is 0);
 * `out` must be writable.
 */
enum SoltesStatus soltes_circulant_new(size_t n,
                                       const size_t *s,
                                       size_t len,
                                       struct SoltesDigraph **out);

/**
 * Builds the order-3306 mixed construction.
 *
 * # Safety
 * `out` must be writable.
 */
enum SoltesStatus soltes_appendix_c_new(bool include_backward, struct SoltesDigraph **out);

/**
 * Builds a digraph from `len` arcs `tails[i] -> heads[i]` on vertices `0..n`.
 *
 * # Safety
 * `tails` and `heads` must each point to `len` readable values; `out` must be writable.
 */
enum SoltesStatus soltes_digraph_from_arcs(size_t n,
                                           const size_t *tails,
                                           const size_t *heads,
                                           size_t len,
                                           struct SoltesDigraph **out);

/**
 * Parses a JSON spec (`circulant`, `rule` or `arcs`).
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum SoltesStatus soltes_digraph_from_json(const char *text, struct SoltesDigraph **out);

/**
 * Parses an edge list.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum SoltesStatus soltes_digraph_from_edge_list(const char *text, struct SoltesDigraph **out);

/**
 * # Safety
 * `d` must be NULL or a handle from this library that has not been freed.
 */
void soltes_digraph_free(struct SoltesDigraph *d);

/**
 * Number of vertices; 0 for NULL.
 *
 * # Safety
 * `d` must be NULL or a live handle.
 */
size_t soltes_digraph_order(const struct SoltesDigraph *d);

/**
 * Number of arcs; 0 for NULL.
 *
 * # Safety
 * `d` must be NULL or a live handle.
 */
size_t soltes_digraph_arc_count(const struct SoltesDigraph *d);

/**
 * Total distance over ordered pairs.
 *
 * # Safety
 * `d` must be a live handle and `out` writable.
 */
enum SoltesStatus soltes_wiener(const struct SoltesDigraph *d, uint64_t *out);

/**
 * `W(D) - W(D - v)`, or `SOLTES_DELTA_DISCONNECTED`.
 *
 * # Safety
 * `d` must be a live handle and `out` writable.
 */
enum SoltesStatus soltes_delta(const struct SoltesDigraph *d, size_t v, int64_t *out);

/**
 * Writes the delta of every vertex `v` to `out[v]`; `len` must be at least the order.
 *
 * # Safety
 * `d` must be a live handle and `out` must have room for `len` values.
 */
enum SoltesStatus soltes_delta_profile(const struct SoltesDigraph *d, int64_t *out, size_t len);

/**
 * Decides whether every vertex deletion lowers the total distance by `z`.
 * `sample_size` is read only in `SOLTES_MODE_SAMPLE`.
 *
 * # Safety
 * `d` must be a live handle and `out_holds` writable.
 */
enum SoltesStatus soltes_is_z_soltes(const struct SoltesDigraph *d,
                                     int64_t z,
                                     enum SoltesMode mode,
                                     size_t sample_size,
                                     bool *out_holds);

/**
 * # Safety
 * `d` must be a live handle and `out` writable.
 */
enum SoltesStatus soltes_degree_stats(const struct SoltesDigraph *d, struct SoltesDegreeStats *out);

/**
 * Serializes `d`; free the result with `soltes_string_free`.
 *
 * # Safety
 * `d` must be a live handle and `out` writable.
 */
enum SoltesStatus soltes_export(const struct SoltesDigraph *d,
                                enum SoltesFormat format,
                                bool one_based,
                                char **out);

/**
 * Runs the z-Šoltés circulant search and returns the certificate as JSON.
 * `mode` must be symmetric or exhaustive.
 *
 * # Safety
 * `out_json` must be writable; free the result with `soltes_string_free`.
 */
enum SoltesStatus soltes_construct(int64_t z,
                                   uint64_t m,
                                   enum SoltesMode mode,
                                   bool force,
                                   char **out_json);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library that has not been freed.
 */
void soltes_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SOLTES_H */
