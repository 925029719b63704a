/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef WARPCLUSTER_H
#define WARPCLUSTER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call. Values 2 to 9 match the CLI exit codes.
 */
typedef enum WcStatus {
  WC_STATUS_OK = 0,
  WC_STATUS_NULL_POINTER = 1,
  WC_STATUS_INVALID_ARGUMENT = 2,
  WC_STATUS_IO = 3,
  WC_STATUS_PARSE = 4,
  WC_STATUS_INVALID_SERIES = 5,
  WC_STATUS_BAND_INFEASIBLE = 6,
  WC_STATUS_K_OUT_OF_RANGE = 7,
  WC_STATUS_INVALID_MATRIX = 8,
  WC_STATUS_UNSUPPORTED = 9,
  WC_STATUS_PANIC = 10,
} WcStatus;

/**
 * A list of validated time series.
 */
typedef struct WcDataset WcDataset;

/**
 * A condensed pairwise distance matrix.
 */
typedef struct WcMatrix WcMatrix;

/**
 * Medoids, assignment and cost of one clustering run.
 */
typedef struct WcResult WcResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *wc_last_error(void);

/**
 * DTW cost between two sample arrays.
 *
 * # Safety
 * `x` and `y` must point to `n` and `m` readable doubles; `out` must be
 * writable.
 */
enum WcStatus wc_dtw(const double *x,
                     size_t n,
                     const double *y,
                     size_t m,
                     int64_t half_width,
                     double *out);

/**
 * An empty dataset.
 */
struct WcDataset *wc_dataset_new(void);

/**
 * Append a series. Ids must be unique within the dataset.
 *
 * # Safety
 * `ds` must come from this library; `id` must be a NUL-terminated string
 * and `samples` must point to `len` readable doubles.
 */
enum WcStatus wc_dataset_push(struct WcDataset *ds,
                              const char *id,
                              const double *samples,
                              size_t len);

/**
 * Read one series per row from a CSV file (or tab-separated for `.tsv`).
 * With `labels` set, the first cell of each row is dropped.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` writable.
 */
enum WcStatus wc_dataset_load_csv(const char *path, bool labels, struct WcDataset **out);

/**
 * Number of series, or 0 for a null handle.
 *
 * # Safety
 * `ds` must be null or come from this library.
 */
size_t wc_dataset_len(const struct WcDataset *ds);

/**
 * # Safety
 * `ds` must be null or come from this library, and not be used afterwards.
 */
void wc_dataset_free(struct WcDataset *ds);

/**
 * All pairwise distances. `workers` of 0 uses one worker per CPU.
 *
 * # Safety
 * `ds` must come from this library and `out` be writable.
 */
enum WcStatus wc_matrix_build(const struct WcDataset *ds,
                              int64_t half_width,
                              bool auto_widen,
                              size_t workers,
                              struct WcMatrix **out);

/**
 * Number of series covered, or 0 for a null handle.
 *
 * # Safety
 * `m` must be null or come from this library.
 */
size_t wc_matrix_size(const struct WcMatrix *m);

/**
 * # Safety
 * `m` must come from this library and `out` be writable.
 */
enum WcStatus wc_matrix_get(const struct WcMatrix *m, size_t i, size_t j, double *out);

/**
 * # Safety
 * `m` must come from this library and `path` be a NUL-terminated string.
 */
enum WcStatus wc_matrix_save(const struct WcMatrix *m, const char *path);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` writable.
 */
enum WcStatus wc_matrix_load(const char *path, struct WcMatrix **out);

/**
 * # Safety
 * `m` must be null or come from this library, and not be used afterwards.
 */
void wc_matrix_free(struct WcMatrix *m);

/**
 * Exact clustering. `node_limit` of 0 keeps the default budget.
 *
 * # Safety
 * `m` must come from this library and `out` be writable.
 */
enum WcStatus wc_solve_exact(const struct WcMatrix *m,
                             size_t k,
                             uint64_t node_limit,
                             struct WcResult **out);

/**
 * k-medoids with `restarts` seeded restarts of at most `max_iterations`
 * steps each.
 *
 * # Safety
 * `m` must come from this library and `out` be writable.
 */
enum WcStatus wc_kmedoids(const struct WcMatrix *m,
                          size_t k,
                          size_t restarts,
                          size_t max_iterations,
                          uint64_t seed,
                          struct WcResult **out);

/**
 * Number of medoids, or 0 for a null handle.
 *
 * # Safety
 * `r` must be null or come from this library.
 */
size_t wc_result_k(const struct WcResult *r);

/**
 * Number of series assigned, or 0 for a null handle.
 *
 * # Safety
 * `r` must be null or come from this library.
 */
size_t wc_result_len(const struct WcResult *r);

/**
 * Copy the ascending medoid indices into `out`, which holds `cap` values.
 *
 * # Safety
 * `r` must come from this library and `out` point to `cap` writable values.
 */
enum WcStatus wc_result_medoids(const struct WcResult *r, size_t *out, size_t cap);

/**
 * Copy each series' medoid index into `out`, which holds `cap` values.
 *
 * # Safety
 * `r` must come from this library and `out` point to `cap` writable values.
 */
enum WcStatus wc_result_assignment(const struct WcResult *r, size_t *out, size_t cap);

/**
 * Total cost, or NaN for a null handle.
 *
 * # Safety
 * `r` must be null or come from this library.
 */
double wc_result_total_cost(const struct WcResult *r);

/**
 * True when the exact solver proved the result optimal.
 *
 * # Safety
 * `r` must be null or come from this library.
 */
bool wc_result_is_global_optimal(const struct WcResult *r);

/**
 * # Safety
 * `r` must be null or come from this library, and not be used afterwards.
 */
void wc_result_free(struct WcResult *r);

/**
 * Mean silhouette of a result over the matrix it was computed from.
 *
 * # Safety
 * `m` and `r` must come from this library and `out` be writable.
 */
enum WcStatus wc_silhouette_mean(const struct WcMatrix *m, const struct WcResult *r, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WARPCLUSTER_H */
