/* C ABI for the gnslab library. Handles are opaque; every function returns a GnsStatus. */

#pragma once

/* Generated with cbindgen:0.29.4 */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes shared by every entry point.
 */
typedef enum GnsStatus {
  GNS_STATUS_OK = 0,
  GNS_STATUS_NULL_POINTER = 1,
  GNS_STATUS_INVALID_ARGUMENT = 2,
  GNS_STATUS_RESOURCE_LIMIT = 3,
  GNS_STATUS_UNAVAILABLE = 4,
} GnsStatus;

/**
 * Opaque gap report.
 */
typedef struct GnsGapReport GnsGapReport;

/**
 * Opaque exact colored-partition table.
 */
typedef struct GnsPartitionTable GnsPartitionTable;

/**
 * Opaque realized random subset.
 */
typedef struct GnsSample GnsSample;

/**
 * Human-readable name of a status code; static storage, do not free.
 */
const char *gns_status_name(enum GnsStatus status);

/**
 * Sample a p-random subset of the box `[0, extents[0]) x ...`.
 *
 * # Safety
 * `extents` must point to `dim` values and `out` must be a valid pointer.
 */
enum GnsStatus gns_sample_create(size_t dim,
                                 double p,
                                 uint64_t seed,
                                 const uint64_t *extents,
                                 bool include_origin,
                                 struct GnsSample **out);

/**
 * Number of sampled points.
 *
 * # Safety
 * `handle` must come from `gns_sample_create`; `out` must be valid.
 */
enum GnsStatus gns_sample_len(const struct GnsSample *handle, size_t *out);

/**
 * Copy the sampled points as row-major flattened coordinates
 * (`len * dim` values). `buf_len` is the buffer capacity in u64 slots.
 *
 * # Safety
 * `handle` from `gns_sample_create`; `buf` valid for `buf_len` writes.
 */
enum GnsStatus gns_sample_copy_points(const struct GnsSample *handle,
                                      uint64_t *buf,
                                      size_t buf_len);

/**
 * # Safety
 * `handle` must come from `gns_sample_create` and not be freed twice.
 */
void gns_sample_free(struct GnsSample *handle);

/**
 * Gap report over explicit generator points (flattened coordinates).
 * `model`: 0 = semigroup closure, 1 = subset sums.
 *
 * # Safety
 * `coords` must hold `n_points * dim` values; `extents` holds `dim` values;
 * `out` must be valid.
 */
enum GnsStatus gns_gap_report_create(const uint64_t *coords,
                                     size_t n_points,
                                     size_t dim,
                                     const uint64_t *extents,
                                     int32_t model,
                                     struct GnsGapReport **out);

/**
 * # Safety
 * `handle` from `gns_gap_report_create`; `out` valid.
 */
enum GnsStatus gns_gap_report_gap_count(const struct GnsGapReport *handle, uint64_t *out);

/**
 * # Safety
 * `handle` from `gns_gap_report_create`; `out` valid.
 */
enum GnsStatus gns_gap_report_certified(const struct GnsGapReport *handle, bool *out);

/**
 * Certificate threshold; `GNS_STATUS_UNAVAILABLE` when the certificate did
 * not produce one.
 *
 * # Safety
 * `handle` from `gns_gap_report_create`; `out` valid.
 */
enum GnsStatus gns_gap_report_threshold(const struct GnsGapReport *handle, uint64_t *out);

/**
 * # Safety
 * `handle` must come from `gns_gap_report_create` and not be freed twice.
 */
void gns_gap_report_free(struct GnsGapReport *handle);

/**
 * Volume of the continuous shifted-hyperboloid region.
 *
 * # Safety
 * `out` must be valid.
 */
enum GnsStatus gns_region_volume(size_t dim, double shift, double level, double *out);

/**
 * Number of lattice points of the region.
 *
 * # Safety
 * `out` must be valid.
 */
enum GnsStatus gns_region_count(size_t dim, double shift, double level, uint64_t *out);

/**
 * Build the exact table of `ptn_d(0..=n_max)`.
 *
 * # Safety
 * `out` must be valid.
 */
enum GnsStatus gns_ptn_create(size_t dim, uint64_t n_max, struct GnsPartitionTable **out);

/**
 * Natural log of `ptn_d(n)` (0 maps to -inf is never produced; values are >= 1).
 *
 * # Safety
 * `handle` from `gns_ptn_create`; `out` valid.
 */
enum GnsStatus gns_ptn_ln_value(const struct GnsPartitionTable *handle, uint64_t n, double *out);

/**
 * # Safety
 * `handle` must come from `gns_ptn_create` and not be freed twice.
 */
void gns_ptn_free(struct GnsPartitionTable *handle);

/**
 * Subset-sum residue coverage of the product group with the given moduli.
 *
 * # Safety
 * `coords` must hold `n_points * m` values; `moduli` holds `m` values;
 * out-pointers must be valid.
 */
enum GnsStatus gns_residue_coverage(const uint64_t *coords,
                                    size_t n_points,
                                    const uint64_t *moduli,
                                    size_t m,
                                    uint64_t *out_covered,
                                    bool *out_full);

/**
 * One Monte Carlo trial with the auto box policy; returns the certified gap
 * count. `certified` reports the certificate verdict; the gap count is exact
 * for the infinite lattice only when it is true.
 *
 * # Safety
 * Out-pointers must be valid.
 */
enum GnsStatus gns_trial_gap_count(size_t dim,
                                   double p,
                                   uint64_t seed,
                                   double outer_c,
                                   uint64_t *out_gap_count,
                                   bool *out_certified);
