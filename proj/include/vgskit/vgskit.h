/*
 * Copyright 2026 The vgskit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to vgskit.
 *
 * Conventions:
 *   - Every fallible call returns a vgs_status. On failure, vgs_last_error()
 *     returns a message describing the most recent failure on the calling
 *     thread; output parameters are left untouched.
 *   - Objects are opaque handles created by *_create / *_read / *_load /
 *     *_fit / *_train and released with the matching *_free. Free functions
 *     accept NULL.
 *   - Caller-provided output buffers are sized as documented per function.
 *   - Strings returned by accessors are owned by the handle and stay valid
 *     until it is freed.
 *   - Handles are immutable after construction (except vgs_units_append and
 *     vgs_feature_store_add) and may be shared between threads for reading.
 */

#ifndef VGSKIT_VGSKIT_H_
#define VGSKIT_VGSKIT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(VGSKIT_BUILDING)
#    define VGS_API __declspec(dllexport)
#  else
#    define VGS_API __declspec(dllimport)
#  endif
#else
#  define VGS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vgs_status {
  VGS_OK = 0,
  VGS_ERR_IO_FAILURE = 1,
  VGS_ERR_BAD_MAGIC = 2,
  VGS_ERR_TRUNCATED_FILE = 3,
  VGS_ERR_NON_FINITE_VALUE = 4,
  VGS_ERR_EMPTY_MANIFEST = 5,
  VGS_ERR_INVALID_MANIFEST = 6,
  VGS_ERR_SHAPE_MISMATCH = 7,
  VGS_ERR_MASK_ROW_ALL_ONES = 8,
  VGS_ERR_ZERO_VECTOR = 9,
  VGS_ERR_NON_POSITIVE_TEMPERATURE = 10,
  VGS_ERR_INVALID_DISTRIBUTION = 11,
  VGS_ERR_NON_FINITE_EVALUATION = 12,
  VGS_ERR_TOO_FEW_POINTS = 13,
  VGS_ERR_DIM_MISMATCH = 14,
  VGS_ERR_EMPTY_BATCH = 15,
  VGS_ERR_KC_SMALLER_THAN_N = 16,
  VGS_ERR_UNKNOWN_QUERY = 17,
  VGS_ERR_ZERO_NORM_FRAME = 18,
  VGS_ERR_MISSING_FEATURE = 19,
  VGS_ERR_EMPTY_SEQUENCE = 20,
  VGS_ERR_DEGENERATE_INPUT = 21,
  VGS_ERR_EMPTY_CORPUS = 22,
  VGS_ERR_LENGTH_MISMATCH = 23,
  VGS_ERR_INVALID_ARGUMENT = 24,
  VGS_ERR_INTERNAL = 99
} vgs_status;

VGS_API const char* vgs_version(void);
VGS_API const char* vgs_status_name(vgs_status status);
/* Nonzero for statuses caused by the filesystem or a malformed file. */
VGS_API int vgs_status_is_io(vgs_status status);
VGS_API const char* vgs_last_error(void);

/* ---- Feature matrices (FVF1 files) ---------------------------------- */

typedef struct vgs_matrix vgs_matrix;

VGS_API vgs_status vgs_matrix_create(size_t rows, size_t cols, const float* values,
                                     vgs_matrix** out);
VGS_API vgs_status vgs_matrix_read(const char* path, vgs_matrix** out);
VGS_API vgs_status vgs_matrix_write(const vgs_matrix* m, const char* path);
VGS_API size_t vgs_matrix_rows(const vgs_matrix* m);
VGS_API size_t vgs_matrix_cols(const vgs_matrix* m);
/* Row-major, rows * cols values. */
VGS_API const float* vgs_matrix_data(const vgs_matrix* m);
VGS_API void vgs_matrix_free(vgs_matrix* m);

/* ---- Pair manifests ------------------------------------------------- */

typedef struct vgs_manifest vgs_manifest;

VGS_API vgs_status vgs_manifest_read(const char* path, vgs_manifest** out);
VGS_API vgs_status vgs_manifest_parse(const char* jsonl, vgs_manifest** out);
VGS_API size_t vgs_manifest_num_captions(const vgs_manifest* m);
VGS_API size_t vgs_manifest_num_images(const vgs_manifest* m);
VGS_API const char* vgs_manifest_caption_id(const vgs_manifest* m, size_t caption);
VGS_API const char* vgs_manifest_image_id(const vgs_manifest* m, size_t image);
VGS_API size_t vgs_manifest_image_of_caption(const vgs_manifest* m, size_t caption);
/* mask: num_captions * num_images bytes, 0 = matched pair. */
VGS_API vgs_status vgs_manifest_positive_mask(const vgs_manifest* m, uint8_t* mask);
VGS_API void vgs_manifest_free(vgs_manifest* m);

/* ---- Losses --------------------------------------------------------- */

typedef enum vgs_reduction {
  VGS_REDUCTION_SUM = 0,
  VGS_REDUCTION_BATCH_MEAN = 1
} vgs_reduction;

/* scores, mask and grad are batch x batch row-major; grad may be NULL. */
VGS_API vgs_status vgs_matching_loss(const double* scores, const uint8_t* mask,
                                     size_t batch, double delta,
                                     vgs_reduction reduction, double* loss,
                                     double* grad);

/* distractors: num_distractors x dim row-major. Gradient outputs may be NULL
 * and have the shapes of the corresponding inputs. */
VGS_API vgs_status vgs_w2v2_loss(const double* context, const double* positive,
                                 const double* distractors, size_t num_distractors,
                                 size_t dim, double kappa, double* loss,
                                 double* grad_context, double* grad_positive,
                                 double* grad_distractors);

/* p_bar: groups x entries, rows summing to one. grad may be NULL. */
VGS_API vgs_status vgs_diversity_loss(const double* p_bar, size_t groups,
                                      size_t entries, int negate, double* loss,
                                      double* grad);

typedef enum vgs_objective {
  VGS_OBJECTIVE_FASTVGS = 0,
  VGS_OBJECTIVE_FASTVGS_PLUS = 1
} vgs_objective;

typedef struct vgs_loss_weights {
  double coarse;
  double fine;
  double w2v2;
  double diversity;
} vgs_loss_weights;

/* (0.1, 1, 1, 0.1) */
VGS_API vgs_loss_weights vgs_default_loss_weights(void);
VGS_API vgs_status vgs_total_objective(double lc, double lf, double lw, double ld,
                                       const vgs_loss_weights* weights,
                                       vgs_objective objective, double* out);

/* Returns f(x) and writes the analytic gradient (n values) into grad. */
typedef double (*vgs_gradient_fn)(const double* x, double* grad, size_t n,
                                  void* user);

VGS_API vgs_status vgs_finite_difference_check(vgs_gradient_fn f, void* user,
                                               const double* x0, size_t n,
                                               double eps, double* max_rel_error);

typedef struct vgs_gradient_suite_options {
  size_t instances;
  size_t max_batch;
  size_t max_dim;
  size_t max_distractors;
  size_t max_groups;
  size_t max_entries;
  double eps;
  uint64_t seed;
} vgs_gradient_suite_options;

typedef struct vgs_gradient_suite_result {
  double matching_max_error;
  double w2v2_max_error;
  double diversity_max_error;
} vgs_gradient_suite_result;

VGS_API vgs_gradient_suite_options vgs_default_gradient_suite_options(void);
VGS_API vgs_status vgs_gradient_suite(const vgs_gradient_suite_options* opts,
                                      vgs_gradient_suite_result* out);

/* ---- Codebooks and k-means ----------------------------------------- */

typedef enum vgs_assign_mode {
  VGS_ASSIGN_HARD = 0,
  VGS_ASSIGN_GUMBEL = 1
} vgs_assign_mode;

/* codewords: groups x entries x dim; logits: steps x groups x entries.
 * Outputs: indices steps x groups, probs steps x groups x entries,
 * codes steps x (groups * dim). probs and codes may be NULL. */
VGS_API vgs_status vgs_codebook_assign(const double* codewords, size_t groups,
                                       size_t entries, size_t dim,
                                       const double* logits, size_t steps,
                                       vgs_assign_mode mode, double temperature,
                                       uint64_t seed, uint32_t* indices,
                                       double* probs, double* codes);

/* probs: steps x groups x entries; p_bar: groups x entries. */
VGS_API vgs_status vgs_batch_code_distribution(const double* probs, size_t steps,
                                               size_t groups, size_t entries,
                                               double* p_bar);

typedef struct vgs_kmeans vgs_kmeans;

VGS_API vgs_status vgs_kmeans_fit(const vgs_matrix* data, size_t k, size_t max_iters,
                                  uint64_t seed, vgs_kmeans** out);
VGS_API vgs_status vgs_kmeans_save(const vgs_kmeans* model, const char* path);
VGS_API vgs_status vgs_kmeans_load(const char* path, vgs_kmeans** out);
VGS_API size_t vgs_kmeans_k(const vgs_kmeans* model);
VGS_API size_t vgs_kmeans_dim(const vgs_kmeans* model);
VGS_API size_t vgs_kmeans_iterations(const vgs_kmeans* model);
VGS_API size_t vgs_kmeans_history_size(const vgs_kmeans* model);
VGS_API double vgs_kmeans_history(const vgs_kmeans* model, size_t i);
/* k x dim row-major. */
VGS_API const double* vgs_kmeans_centroids(const vgs_kmeans* model);
/* units: one entry per row of frames. */
VGS_API vgs_status vgs_kmeans_quantize(const vgs_kmeans* model, const vgs_matrix* frames,
                                       uint32_t* units);
VGS_API void vgs_kmeans_free(vgs_kmeans* model);

/* ---- Unit sequences ------------------------------------------------- */

typedef struct vgs_units vgs_units;

VGS_API vgs_status vgs_units_create(vgs_units** out);
VGS_API vgs_status vgs_units_read(const char* path, vgs_units** out);
VGS_API vgs_status vgs_units_append(vgs_units* u, const char* utterance_id,
                                    const uint32_t* units, size_t n);
VGS_API vgs_status vgs_units_write(const vgs_units* u, const char* path);
VGS_API size_t vgs_units_count(const vgs_units* u);
VGS_API const char* vgs_units_id(const vgs_units* u, size_t i);
VGS_API size_t vgs_units_length(const vgs_units* u, size_t i);
VGS_API const uint32_t* vgs_units_data(const vgs_units* u, size_t i);
VGS_API void vgs_units_free(vgs_units* u);

/* ---- Span masking --------------------------------------------------- */

typedef enum vgs_mask_mode {
  VGS_MASK_PER_UTTERANCE = 0,
  VGS_MASK_BATCH_MIN_CROP = 1
} vgs_mask_mode;

typedef struct vgs_mask_spec {
  double p;
  size_t span_len;
  vgs_mask_mode mode;
  uint64_t seed;
} vgs_mask_spec;

/* p = 0.065, span_len = 10, per-utterance, seed 42. */
VGS_API vgs_mask_spec vgs_default_mask_spec(void);
/* flags: length bytes, 1 = masked. */
VGS_API vgs_status vgs_sample_mask(size_t length, const vgs_mask_spec* spec,
                                   uint8_t* flags);
/* flags: sum(lengths) bytes, utterances concatenated. */
VGS_API vgs_status vgs_batch_masks(const size_t* lengths, size_t count,
                                   const vgs_mask_spec* spec, uint8_t* flags);
/* fractions: count values; seeds spec->seed .. spec->seed + num_seeds - 1. */
VGS_API vgs_status vgs_mean_masked_fraction(const size_t* lengths, size_t count,
                                            const vgs_mask_spec* spec,
                                            size_t num_seeds, double* fractions);

/* ---- Retrieval ------------------------------------------------------ */

/* out: rows(queries) x rows(targets). */
VGS_API vgs_status vgs_coarse_scores(const vgs_matrix* queries,
                                     const vgs_matrix* targets, double* out);
/* out: min(k, n) indices; *count receives that number. */
VGS_API vgs_status vgs_top_k(const double* scores, size_t n, size_t k, size_t* out,
                             size_t* count);

typedef double (*vgs_fine_score_fn)(size_t query, size_t candidate, void* user);
typedef struct vgs_ranking vgs_ranking;

/* table: rows(queries) x rows(targets) precomputed fine scores.
 * fine_calls (may be NULL) receives the number of fine-score lookups. */
VGS_API vgs_status vgs_ctf_retrieve_table(const vgs_matrix* queries,
                                          const vgs_matrix* targets,
                                          const double* table, size_t kc, size_t n,
                                          size_t threads, vgs_ranking** out,
                                          uint64_t* fine_calls);
/* concurrent_safe = 0 keeps all callback invocations on one thread. */
VGS_API vgs_status vgs_ctf_retrieve_callback(const vgs_matrix* queries,
                                             const vgs_matrix* targets,
                                             vgs_fine_score_fn fn, void* user,
                                             int concurrent_safe, size_t kc, size_t n,
                                             size_t threads, vgs_ranking** out,
                                             uint64_t* fine_calls);
/* Exhaustive ranking of a rows x cols score table, top n per row. */
VGS_API vgs_status vgs_rank_all(const double* scores, size_t rows, size_t cols,
                                size_t n, vgs_ranking** out);
VGS_API size_t vgs_ranking_num_queries(const vgs_ranking* r);
VGS_API size_t vgs_ranking_list_size(const vgs_ranking* r, size_t query);
VGS_API size_t vgs_ranking_candidate(const vgs_ranking* r, size_t query, size_t rank);
VGS_API double vgs_ranking_score(const vgs_ranking* r, size_t query, size_t rank);
VGS_API void vgs_ranking_free(vgs_ranking* r);

typedef enum vgs_direction {
  VGS_SPEECH_TO_IMAGE = 0,
  VGS_IMAGE_TO_SPEECH = 1
} vgs_direction;

VGS_API vgs_status vgs_recall_at_n(const vgs_ranking* r, const vgs_manifest* manifest,
                                   size_t n, vgs_direction direction, double* out);

/* ---- Feature stores, ABX and semantic evaluation -------------------- */

typedef struct vgs_feature_store vgs_feature_store;

VGS_API vgs_status vgs_feature_store_create(vgs_feature_store** out);
/* Loads every *.fvf in dir; ids are file stems. */
VGS_API vgs_status vgs_feature_store_load_dir(const char* dir, double frame_rate_hz,
                                              vgs_feature_store** out);
/* Copies the matrix. */
VGS_API vgs_status vgs_feature_store_add(vgs_feature_store* store, const char* id,
                                         const vgs_matrix* frames);
VGS_API size_t vgs_feature_store_size(const vgs_feature_store* store);
VGS_API void vgs_feature_store_free(vgs_feature_store* store);

VGS_API vgs_status vgs_dtw_distance(const vgs_matrix* x, const vgs_matrix* y,
                                    double* out);

typedef struct vgs_abx_report vgs_abx_report;

/* weighted = 0: overall error is the plain mean of group errors. */
VGS_API vgs_status vgs_abx_evaluate(const vgs_feature_store* store,
                                    const char* triplets_path, int weighted,
                                    size_t threads, vgs_abx_report** out);
VGS_API double vgs_abx_overall(const vgs_abx_report* r);
VGS_API size_t vgs_abx_triples(const vgs_abx_report* r);
VGS_API size_t vgs_abx_num_groups(const vgs_abx_report* r);
VGS_API const char* vgs_abx_group_key(const vgs_abx_report* r, size_t i);
VGS_API double vgs_abx_group_error(const vgs_abx_report* r, size_t i);
VGS_API size_t vgs_abx_group_triples(const vgs_abx_report* r, size_t i);
VGS_API void vgs_abx_report_free(vgs_abx_report* r);

typedef enum vgs_pool_mode { VGS_POOL_MEAN = 0, VGS_POOL_MAX = 1 } vgs_pool_mode;

/* out: cols(frames) values. */
VGS_API vgs_status vgs_pool(const vgs_matrix* frames, vgs_pool_mode mode, double* out);
VGS_API vgs_status vgs_spearman(const double* xs, const double* ys, size_t n,
                                double* out);
/* 100 x Spearman(model cosine, human score). num_pairs may be NULL. */
VGS_API vgs_status vgs_semantic_score(const vgs_feature_store* store,
                                      const char* judgments_path, vgs_pool_mode mode,
                                      size_t threads, double* out, size_t* num_pairs);

/* ---- Unit language models ------------------------------------------ */

typedef struct vgs_span_spec {
  double mean;
  double std;
  double coverage_target;
  uint64_t seed;
} vgs_span_spec;

/* mean 5, std 5, coverage 0.5, seed 42. */
VGS_API vgs_span_spec vgs_default_span_spec(void);
/* Writes up to capacity spans and sets *count to the total number sampled;
 * call again with a larger buffer when *count > capacity. */
VGS_API vgs_status vgs_span_sample(size_t length, const vgs_span_spec* spec,
                                   size_t* starts, size_t* lens, size_t capacity,
                                   size_t* count);

typedef struct vgs_ngram vgs_ngram;

/* vocab_size 0 = one past the largest unit in the corpus. */
VGS_API vgs_status vgs_ngram_train(const vgs_units* corpus, size_t order, double add_k,
                                   size_t vocab_size, vgs_ngram** out);
VGS_API vgs_status vgs_ngram_save(const vgs_ngram* lm, const char* path);
VGS_API vgs_status vgs_ngram_load(const char* path, vgs_ngram** out);
VGS_API size_t vgs_ngram_order(const vgs_ngram* lm);
VGS_API size_t vgs_ngram_vocab_size(const vgs_ngram* lm);
/* history: most recent unit last. */
VGS_API vgs_status vgs_ngram_prob(const vgs_ngram* lm, const uint32_t* history,
                                  size_t history_len, uint32_t unit, double* out);
VGS_API vgs_status vgs_ngram_sequence_log_prob(const vgs_ngram* lm,
                                               const uint32_t* units, size_t n,
                                               double* out);
VGS_API vgs_status vgs_pseudo_logprob(const vgs_ngram* lm, const uint32_t* units,
                                      size_t n, const vgs_span_spec* spec,
                                      size_t repeats, double* out);
VGS_API void vgs_ngram_free(vgs_ngram* lm);

VGS_API vgs_status vgs_paired_accuracy(const double* pos, const double* neg, size_t n,
                                       double* out);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* VGSKIT_VGSKIT_H_ */
