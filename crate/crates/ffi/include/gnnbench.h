#ifndef GNNBENCH_H
#define GNNBENCH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GbStatus {
  GB_STATUS_OK = 0,
  GB_STATUS_INVALID_ARGUMENT = 1,
  GB_STATUS_IO = 2,
  GB_STATUS_RUNTIME = 3,
  GB_STATUS_NULL_POINTER = 4,
  GB_STATUS_PANIC = 5,
} GbStatus;

/**
 * Opaque generated or loaded dataset.
 */
typedef struct GbDataset GbDataset;

/**
 * Opaque class and graph feature set.
 */
typedef struct GbFeatures GbFeatures;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *gb_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *gb_version(void);

/**
 * Generates a dataset from a named preset (`cora-like` or `planted`).
 * Zero for `nodes`, `edges`, `attrs` or `classes` keeps the preset value;
 * `attrs` and `classes` apply to the planted preset only.
 *
 * # Safety
 * `preset` must be a NUL-terminated string and `out` a valid pointer.
 */
enum GbStatus gb_dataset_generate_preset(const char *preset,
                                         uint64_t seed,
                                         size_t nodes,
                                         size_t edges,
                                         size_t attrs,
                                         size_t classes,
                                         struct GbDataset **out);

/**
 * Generates a dataset whose class features follow `features`.
 *
 * # Safety
 * `features` must be a live handle and `out` a valid pointer.
 */
enum GbStatus gb_dataset_generate_from_features(const struct GbFeatures *features,
                                                uint64_t seed,
                                                struct GbDataset **out);

/**
 * Loads a dataset directory.
 *
 * # Safety
 * `dir` must be a NUL-terminated string and `out` a valid pointer.
 */
enum GbStatus gb_dataset_load(const char *dir, struct GbDataset **out);

/**
 * Writes a dataset directory.
 *
 * # Safety
 * `dataset` must be a live handle and `dir` a NUL-terminated string.
 */
enum GbStatus gb_dataset_save(const struct GbDataset *dataset, const char *dir);

/**
 * # Safety
 * `dataset` must be null or a live handle.
 */
size_t gb_dataset_node_count(const struct GbDataset *dataset);

/**
 * # Safety
 * `dataset` must be null or a live handle.
 */
size_t gb_dataset_edge_count(const struct GbDataset *dataset);

/**
 * # Safety
 * `dataset` must be null or a live handle.
 */
size_t gb_dataset_attr_count(const struct GbDataset *dataset);

/**
 * # Safety
 * `dataset` must be null or a live handle.
 */
size_t gb_dataset_class_count(const struct GbDataset *dataset);

/**
 * Copies the node labels into `labels`, which must hold at least
 * `gb_dataset_node_count` elements.
 *
 * # Safety
 * `dataset` must be a live handle and `labels` valid for `len` writes.
 */
enum GbStatus gb_dataset_labels(const struct GbDataset *dataset, size_t *labels, size_t len);

/**
 * Copies the undirected edges `(src[i], dst[i])`, with `src[i] < dst[i]`,
 * in lexicographic order. Both buffers must hold `gb_dataset_edge_count`
 * elements.
 *
 * # Safety
 * `dataset` must be a live handle; `src` and `dst` valid for `len` writes.
 */
enum GbStatus gb_dataset_edges(const struct GbDataset *dataset,
                               size_t *src,
                               size_t *dst,
                               size_t len);

/**
 * # Safety
 * `dataset` must be null or a handle not yet freed.
 */
void gb_dataset_free(struct GbDataset *dataset);

/**
 * Extracts class and graph features from a dataset.
 *
 * # Safety
 * `dataset` must be a live handle and `out` a valid pointer.
 */
enum GbStatus gb_features_extract(const struct GbDataset *dataset, struct GbFeatures **out);

/**
 * Loads a `features.json`.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum GbStatus gb_features_load(const char *path, struct GbFeatures **out);

/**
 * Writes a `features.json`.
 *
 * # Safety
 * `features` must be a live handle and `path` a NUL-terminated string.
 */
enum GbStatus gb_features_save(const struct GbFeatures *features, const char *path);

/**
 * # Safety
 * `features` must be null or a live handle.
 */
size_t gb_features_class_count(const struct GbFeatures *features);

/**
 * # Safety
 * `features` must be null or a live handle.
 */
size_t gb_features_attr_count(const struct GbFeatures *features);

/**
 * Copies the k×k class preference mean, row-major, into `out`.
 *
 * # Safety
 * `features` must be a live handle and `out` valid for `len` writes.
 */
enum GbStatus gb_features_preference_mean(const struct GbFeatures *features,
                                          double *out,
                                          size_t len);

/**
 * Copies the d×k attribute-class correlation, row-major, into `out`.
 *
 * # Safety
 * `features` must be a live handle and `out` valid for `len` writes.
 */
enum GbStatus gb_features_attr_correlation(const struct GbFeatures *features,
                                           double *out,
                                           size_t len);

/**
 * Applies the class-size (`alpha`), preference (`beta`) and attribute
 * mixing (`gamma`) transforms. Pass NaN to skip a transform.
 *
 * # Safety
 * `features` must be a live handle and `out` a valid pointer.
 */
enum GbStatus gb_features_transform(const struct GbFeatures *features,
                                    double alpha,
                                    double beta,
                                    double gamma,
                                    struct GbFeatures **out);

/**
 * # Safety
 * `features` must be null or a handle not yet freed.
 */
void gb_features_free(struct GbFeatures *features);

/**
 * Macro-averaged F1 over `k` classes.
 *
 * # Safety
 * `predicted` and `truth` must be valid for `n` reads, `out` for one write.
 */
enum GbStatus gb_f1_macro(const size_t *predicted,
                          const size_t *truth,
                          size_t n,
                          size_t k,
                          double *out);

/**
 * Fraction of positions where `predicted` equals `truth`.
 *
 * # Safety
 * `predicted` and `truth` must be valid for `n` reads, `out` for one write.
 */
enum GbStatus gb_accuracy(const size_t *predicted, const size_t *truth, size_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GNNBENCH_H */
