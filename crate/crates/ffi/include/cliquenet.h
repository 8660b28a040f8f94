#ifndef CLIQUENET_H
#define CLIQUENET_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Sentinel for an erased cluster in pattern arrays.
 */
#define CN_ERASED UINT32_MAX

/**
 * Result of a call.
 */
typedef enum CnStatus {
  CN_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  CN_STATUS_NULL_POINTER = 1,
  /**
   * An argument is out of range or inconsistent with the network.
   */
  CN_STATUS_INVALID_ARGUMENT = 2,
  /**
   * A snapshot, message or path string is malformed.
   */
  CN_STATUS_FORMAT = 3,
  CN_STATUS_IO = 4,
  /**
   * An output buffer is too small.
   */
  CN_STATUS_BUFFER_TOO_SMALL = 5,
  /**
   * Internal failure; the library caught a panic.
   */
  CN_STATUS_INTERNAL = 6,
} CnStatus;

/**
 * Per-cluster or overall outcome of a retrieval.
 */
typedef enum CnOutcome {
  CN_OUTCOME_UNIQUE = 0,
  CN_OUTCOME_AMBIGUOUS = 1,
  CN_OUTCOME_SILENT = 2,
} CnOutcome;

/**
 * Opaque network handle.
 */
typedef struct CnNetwork CnNetwork;

/**
 * Decoding parameters: memory effect, threshold and iteration cap.
 */
typedef struct CnDecodeParams {
  uint32_t gamma;
  int64_t sigma;
  uint32_t max_iters;
} CnDecodeParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null if none.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *cn_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cn_version(void);

/**
 * Retrieval defaults: `gamma = 1`, `sigma = 0`, `max_iters = 4`.
 */
struct CnDecodeParams cn_decode_params_retrieval(void);

/**
 * Creates an empty network of `clusters` clusters of `fanals` fanals
 * (`fanals` a power of two).
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum CnStatus cn_network_new(uint32_t clusters, uint32_t fanals, struct CnNetwork **out);

/**
 * Releases a network. Null is ignored.
 *
 * # Safety
 * `net` must come from this library and not have been freed already.
 */
void cn_network_free(struct CnNetwork *net);

/**
 * Number of clusters, or 0 for a null handle.
 *
 * # Safety
 * `net` must be null or a live handle.
 */
uint32_t cn_network_clusters(const struct CnNetwork *net);

/**
 * Fanals per cluster, or 0 for a null handle.
 *
 * # Safety
 * `net` must be null or a live handle.
 */
uint32_t cn_network_fanals(const struct CnNetwork *net);

/**
 * Number of connections present.
 *
 * # Safety
 * `net` must be null or a live handle.
 */
uint64_t cn_network_edge_count(const struct CnNetwork *net);

/**
 * Number of messages learnt so far, duplicates included.
 *
 * # Safety
 * `net` must be null or a live handle.
 */
uint64_t cn_network_learned_count(const struct CnNetwork *net);

/**
 * Fraction of possible connections present, or NaN for a null handle.
 *
 * # Safety
 * `net` must be null or a live handle.
 */
double cn_network_density(const struct CnNetwork *net);

/**
 * Learns a complete pattern of `len` fanal indices.
 *
 * # Safety
 * `net` must be a live handle and `fanals` valid for reading `len` values.
 */
enum CnStatus cn_network_learn(struct CnNetwork *net, const uint32_t *fanals, size_t len);

/**
 * Learns a message given as `⌈k/4⌉` hex digits, high bits first.
 *
 * # Safety
 * `net` must be a live handle and `hex` a NUL-terminated string.
 */
enum CnStatus cn_network_learn_hex(struct CnNetwork *net, const char *hex);

/**
 * Decides whether a complete pattern is accepted in the classification
 * setting (`sigma = c`, `gamma = 1`, one iteration).
 *
 * # Safety
 * `net` must be a live handle, `fanals` valid for reading `len` values and
 * `accepted` valid for writing.
 */
enum CnStatus cn_network_is_accepted(const struct CnNetwork *net,
                                     const uint32_t *fanals,
                                     size_t len,
                                     bool *accepted);

/**
 * Completes a probe. `probe` and `out_fanals` both hold `len` entries, one
 * per cluster; erased clusters are [`CN_ERASED`]. On return `out_fanals`
 * holds the unique winner of each cluster or [`CN_ERASED`] where the
 * cluster ended ambiguous or silent. `outcome` receives `Ambiguous` if any
 * cluster is ambiguous, else `Silent` if any is silent, else `Unique`.
 * `iterations` (optional) receives the number of iterations run.
 *
 * # Safety
 * Pointers must be valid for `len` reads and writes respectively;
 * `params`, `outcome` must be valid; `iterations` may be null.
 */
enum CnStatus cn_network_retrieve(const struct CnNetwork *net,
                                  const uint32_t *probe,
                                  size_t len,
                                  const struct CnDecodeParams *params,
                                  uint32_t *out_fanals,
                                  enum CnOutcome *outcome,
                                  uint32_t *iterations);

/**
 * Writes a snapshot file.
 *
 * # Safety
 * `net` must be a live handle and `path` a NUL-terminated string.
 */
enum CnStatus cn_network_save(const struct CnNetwork *net, const char *path);

/**
 * Reads a snapshot file into a new handle.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` valid for writing.
 */
enum CnStatus cn_network_load(const char *path, struct CnNetwork **out);

/**
 * Size in bytes of the network's snapshot.
 *
 * # Safety
 * `net` must be null or a live handle.
 */
size_t cn_network_snapshot_len(const struct CnNetwork *net);

/**
 * Copies the snapshot into `buf` of capacity `cap` and stores its size in
 * `written`. Fails with `BufferTooSmall` (and still sets `written`) when
 * `cap` is insufficient.
 *
 * # Safety
 * `buf` must be valid for `cap` writes and `written` for one write.
 */
enum CnStatus cn_network_snapshot(const struct CnNetwork *net,
                                  uint8_t *buf,
                                  size_t cap,
                                  size_t *written);

/**
 * Builds a network from snapshot bytes.
 *
 * # Safety
 * `bytes` must be valid for `len` reads and `out` for one write.
 */
enum CnStatus cn_network_from_snapshot(const uint8_t *bytes, size_t len, struct CnNetwork **out);

/**
 * Expected density after `m` uniform random messages with `l` fanals per cluster.
 */
double cn_expected_density(double m, double l);

/**
 * Probability that a random message is accepted at density `d` with `c` clusters.
 */
double cn_accept_probability(double d, uint32_t c);

/**
 * Single-iteration retrieval error with `erased` clusters missing.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum CnStatus cn_retrieval_error(double m, uint32_t l, uint32_t c, uint32_t erased, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CLIQUENET_H */
