#ifndef IDEALPACK_H
#define IDEALPACK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status of a packing value.
 */
typedef enum IpPackStatus {
  IP_PACK_STATUS_EXACT = 0,
  IP_PACK_STATUS_LOWER_BOUND = 1,
  IP_PACK_STATUS_SATURATED = 2,
} IpPackStatus;

/**
 * Result codes.
 */
typedef enum IpStatus {
  IP_STATUS_OK = 0,
  IP_STATUS_NULL_POINTER = 1,
  IP_STATUS_INVALID_ARGUMENT = 2,
  IP_STATUS_SYNTAX = 3,
  IP_STATUS_UNKNOWN_NAME = 4,
  IP_STATUS_KIND_MISMATCH = 5,
  IP_STATUS_OUT_OF_MARGIN = 6,
  IP_STATUS_BUDGET_EXCEEDED = 7,
  IP_STATUS_NOT_FOUND = 8,
  IP_STATUS_IO = 9,
  IP_STATUS_INTERNAL = 10,
} IpStatus;

/**
 * A set materialized on a universe.
 */
typedef struct IpSet IpSet;

/**
 * A group with the finite carrier sets live on.
 */
typedef struct IpUniverse IpUniverse;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success. The pointer
 * stays valid until the next call on the same thread.
 */
const char *ip_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ip_version(void);

/**
 * `ℤ` with core `[lo, hi]` and shift margin `margin`.
 *
 * # Safety
 * Handle and output pointers must be null or valid.
 */
enum IpStatus ip_universe_integers(int64_t lo,
                                   int64_t hi,
                                   uint64_t margin,
                                   struct IpUniverse **out);

/**
 * `ℤ_N`.
 *
 * # Safety
 * Handle and output pointers must be null or valid.
 */
enum IpStatus ip_universe_cyclic(uint64_t order, struct IpUniverse **out);

/**
 * Reduced words of length `<= max_len` in the free group on `a`, `b`.
 *
 * # Safety
 * Handle and output pointers must be null or valid.
 */
enum IpStatus ip_universe_free_group(size_t max_len, size_t margin, struct IpUniverse **out);

/**
 * Number of points in the carrier.
 *
 * # Safety
 * Handle and output pointers must be null or valid.
 */
enum IpStatus ip_universe_size(const struct IpUniverse *u, uint64_t *out);

/**
 * # Safety
 * `u` must come from an `ip_universe_*` constructor and not be used afterwards.
 */
void ip_universe_free(struct IpUniverse *u);

/**
 * Materializes a set expression; names from the shipped catalog are available.
 *
 * # Safety
 * Handle and output pointers must be null or valid.
 */
enum IpStatus ip_set_parse(const struct IpUniverse *u, const char *expr, struct IpSet **out);

/**
 * Number of elements of the set on the core.
 *
 * # Safety
 * Handle and output pointers must be null or valid.
 */
enum IpStatus ip_set_count(const struct IpSet *s, uint64_t *out);

/**
 * # Safety
 * `s` must come from [`ip_set_parse`] and not be used afterwards.
 */
void ip_set_free(struct IpSet *s);

/**
 * Packing index for the trivial ideal over shifts `lo..=hi` (residues on `ℤ_N`).
 * Without `exact` the value is a greedy lower bound.
 *
 * # Safety
 * Handle and output pointers must be null or valid.
 */
enum IpStatus ip_pack(const struct IpSet *s,
                      size_t n,
                      int64_t lo,
                      int64_t hi,
                      bool exact,
                      uint64_t *out_value,
                      enum IpPackStatus *out_status);

/**
 * Largest gap on the core; `UINT64_MAX` when the set misses the core.
 *
 * # Safety
 * Handle and output pointers must be null or valid.
 */
enum IpStatus ip_gap(const struct IpSet *s, uint64_t *out);

/**
 * Smallness at scale: every `F` with `|F| <= m` from `[-s, s]` leaves a large complement
 * within `inner_size` translators from `[0, inner_shift]`.
 *
 * # Safety
 * Handle and output pointers must be null or valid.
 */
enum IpStatus ip_is_small(const struct IpSet *set,
                          size_t m,
                          uint64_t s,
                          size_t inner_size,
                          uint64_t inner_shift,
                          bool *out);

/**
 * Builds the Følner measure for the test set `f[0..f_len]` at tolerance `1/n` that
 * vanishes on `avoid`, and returns `μ(eval)` as `num/den` in lowest terms.
 *
 * # Safety
 * Handle and output pointers must be null or valid.
 */
enum IpStatus ip_measure(const struct IpSet *avoid,
                         const int64_t *f,
                         size_t f_len,
                         uint64_t n,
                         const struct IpSet *eval,
                         int64_t *out_num,
                         int64_t *out_den);

/**
 * Runs the command line with `argc` arguments (program name first) and returns its exit
 * code. When `out_report` is not null it receives the JSON report, or null if none was
 * produced; release it with [`ip_string_free`].
 *
 * # Safety
 * `argv` must hold `argc` NUL-terminated strings.
 */
int32_t ip_run(size_t argc, const char *const *argv, char **out_report);

/**
 * # Safety
 * `s` must come from [`ip_run`] and not be used afterwards.
 */
void ip_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IDEALPACK_H */
