#ifndef HETCDC_H
#define HETCDC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HetcdcStatus {
  HETCDC_STATUS_OK = 0,
  HETCDC_STATUS_NULL_POINTER = 1,
  HETCDC_STATUS_FEASIBILITY_VIOLATION = 2,
  HETCDC_STATUS_BAD_DIMENSION = 3,
  HETCDC_STATUS_INVALID_ALLOCATION = 4,
  HETCDC_STATUS_INTERNAL_CONTRADICTION = 5,
  HETCDC_STATUS_UNDECODABLE = 6,
  HETCDC_STATUS_REDUCE_FAILURE = 7,
  HETCDC_STATUS_BUDGET_EXCEEDED = 8,
  HETCDC_STATUS_TOO_LARGE = 9,
  HETCDC_STATUS_UNBOUNDED = 10,
  HETCDC_STATUS_PARSE = 11,
  HETCDC_STATUS_INFEASIBLE = 12,
  HETCDC_STATUS_PANIC = 13,
} HetcdcStatus;

/**
 * Opaque validated instance.
 */
typedef struct HetcdcConfig HetcdcConfig;

/**
 * Opaque optimal three-node placement.
 */
typedef struct HetcdcPlacement HetcdcPlacement;

/**
 * Exact `num/den` with `den > 0`.
 */
typedef struct HetcdcRational {
  int64_t num;
  int64_t den;
} HetcdcRational;

/**
 * Instance-level lower bounds for three nodes.
 */
typedef struct HetcdcBounds {
  struct HetcdcRational pooled;
  struct HetcdcRational cutset;
  struct HetcdcRational genie;
  struct HetcdcRational max_bound;
} HetcdcBounds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call into this library on the same thread.
 */
const char *hetcdc_last_error(void);

/**
 * Static name of a status code, or null for an unknown code.
 */
const char *hetcdc_status_name(int32_t status);

/**
 * Creates an instance from `k` storage sizes and `n` files.
 *
 * # Safety
 * `storage` must point to `k` readable values; `out` must be writable.
 */
enum HetcdcStatus hetcdc_config_new(const uint64_t *storage,
                                    size_t k,
                                    uint64_t n,
                                    struct HetcdcConfig **out);

/**
 * # Safety
 * `cfg` must come from [`hetcdc_config_new`] and not be freed twice.
 */
void hetcdc_config_free(struct HetcdcConfig *cfg);

/**
 * Closed-form minimum load for three nodes.
 *
 * # Safety
 * `cfg` must be a live handle; `out` must be writable.
 */
enum HetcdcStatus hetcdc_optimal_load(const struct HetcdcConfig *cfg, struct HetcdcRational *out);

/**
 * Regime number 1..=7.
 *
 * # Safety
 * `cfg` must be a live handle; `out` must be writable.
 */
enum HetcdcStatus hetcdc_classify_regime(const struct HetcdcConfig *cfg, uint32_t *out);

/**
 * # Safety
 * `cfg` must be a live handle; `out` must be writable.
 */
enum HetcdcStatus hetcdc_lower_bounds(const struct HetcdcConfig *cfg, struct HetcdcBounds *out);

/**
 * Brute-force minimum at half-file granularity.
 *
 * # Safety
 * `cfg` must be a live handle; `out` must be writable.
 */
enum HetcdcStatus hetcdc_oracle_min(const struct HetcdcConfig *cfg,
                                    uint64_t budget,
                                    struct HetcdcRational *out);

/**
 * Optimum of the general-K linear program.
 *
 * # Safety
 * `cfg` must be a live handle; `out` must be writable.
 */
enum HetcdcStatus hetcdc_lp_optimum(const struct HetcdcConfig *cfg, struct HetcdcRational *out);

/**
 * Builds the optimal placement of a three-node instance.
 *
 * # Safety
 * `cfg` must be a live handle; `out` must be writable.
 */
enum HetcdcStatus hetcdc_placement_new(const struct HetcdcConfig *cfg,
                                       struct HetcdcPlacement **out);

/**
 * # Safety
 * `p` must come from [`hetcdc_placement_new`] and not be freed twice.
 */
void hetcdc_placement_free(struct HetcdcPlacement *p);

/**
 * Subpacketization factor: 1, or 2 when files are split in halves.
 *
 * # Safety
 * `p` must be a live handle.
 */
uint64_t hetcdc_placement_scale(const struct HetcdcPlacement *p);

/**
 * Grouped XOR load of the placement in units of the original instance.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum HetcdcStatus hetcdc_placement_load(const struct HetcdcPlacement *p,
                                        struct HetcdcRational *out);

/**
 * Placement as a JSON document. Release the string with
 * [`hetcdc_string_free`].
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum HetcdcStatus hetcdc_placement_json(const struct HetcdcPlacement *p, char **out);

/**
 * Runs a byte-level round on the placement and reports the measured load
 * in units of the original instance.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum HetcdcStatus hetcdc_simulate(const struct HetcdcPlacement *p,
                                  size_t t_bytes,
                                  uint64_t seed,
                                  struct HetcdcRational *out);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void hetcdc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HETCDC_H */
