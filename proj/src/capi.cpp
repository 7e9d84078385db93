// Copyright 2026 The vgskit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vgskit/vgskit.h"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <new>
#include <string>
#include <utility>
#include <vector>

#include "vgskit/abx.hpp"
#include "vgskit/error.hpp"
#include "vgskit/featstore.hpp"
#include "vgskit/losses.hpp"
#include "vgskit/masking.hpp"
#include "vgskit/quantizer.hpp"
#include "vgskit/retrieval.hpp"
#include "vgskit/semeval.hpp"
#include "vgskit/unitlm.hpp"

struct vgs_matrix {
  vgs::FeatureMatrix m;
};

struct vgs_manifest {
  vgs::PairManifest m;
};

struct vgs_kmeans {
  vgs::KMeansModel m;
};

struct vgs_units {
  std::vector<vgs::UnitSequence> seqs;
};

struct vgs_ranking {
  std::vector<vgs::RankedList> lists;
};

struct vgs_feature_store {
  vgs::FeatureStore store;
};

struct vgs_abx_report {
  vgs::AbxReport r;
};

struct vgs_ngram {
  vgs::NGramLM lm;
};

namespace {

thread_local std::string g_last_error;

vgs_status Fail(vgs_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs fn, translating exceptions into a status and the thread's last error.
template <typename Fn>
vgs_status Guard(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return VGS_OK;
  } catch (const vgs::Error& e) {
    return Fail(static_cast<vgs_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(VGS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(VGS_ERR_INTERNAL, e.what());
  } catch (...) {
    return Fail(VGS_ERR_INTERNAL, "unknown exception");
  }
}

void Require(bool ok, const char* what) {
  if (!ok) throw vgs::Error(vgs::ErrorCode::kInvalidArgument, what);
}

template <typename T>
std::vector<T> Copy(const T* p, std::size_t n) {
  return n ? std::vector<T>(p, p + n) : std::vector<T>{};
}

vgs::RealMatrix CopyMatrix(const double* p, std::size_t rows, std::size_t cols) {
  return vgs::RealMatrix(rows, cols, Copy(p, rows * cols));
}

vgs::MaskSpec ToSpec(const vgs_mask_spec* spec) {
  vgs::MaskSpec s;
  if (spec) {
    s.p = spec->p;
    s.span_len = spec->span_len;
    s.mode = spec->mode == VGS_MASK_BATCH_MIN_CROP ? vgs::MaskMode::kBatchMinCrop
                                                   : vgs::MaskMode::kPerUtterance;
    s.seed = spec->seed;
  }
  return s;
}

vgs::SpanSpec ToSpec(const vgs_span_spec* spec) {
  vgs::SpanSpec s;
  if (spec) {
    s.mean = spec->mean;
    s.std = spec->std;
    s.coverage_target = spec->coverage_target;
    s.seed = spec->seed;
  }
  return s;
}

vgs::PoolMode ToPool(vgs_pool_mode mode) {
  return mode == VGS_POOL_MAX ? vgs::PoolMode::kMax : vgs::PoolMode::kMean;
}

}  // namespace

extern "C" {

const char* vgs_version(void) { return "0.1.0"; }

const char* vgs_status_name(vgs_status status) {
  if (status == VGS_OK) return "Ok";
  if (status == VGS_ERR_INTERNAL) return "Internal";
  if (status >= VGS_ERR_IO_FAILURE && status <= VGS_ERR_INVALID_ARGUMENT) {
    return vgs::ErrorCodeName(static_cast<vgs::ErrorCode>(status));
  }
  return "Unknown";
}

int vgs_status_is_io(vgs_status status) {
  if (status < VGS_ERR_IO_FAILURE || status > VGS_ERR_INVALID_ARGUMENT) return 0;
  return vgs::IsIoError(static_cast<vgs::ErrorCode>(status)) ? 1 : 0;
}

const char* vgs_last_error(void) { return g_last_error.c_str(); }

// ---- Feature matrices ----------------------------------------------------

vgs_status vgs_matrix_create(size_t rows, size_t cols, const float* values,
                             vgs_matrix** out) {
  return Guard([&] {
    Require(out && (values || rows * cols == 0), "null argument");
    *out = new vgs_matrix{vgs::FeatureMatrix(rows, cols, Copy(values, rows * cols))};
  });
}

vgs_status vgs_matrix_read(const char* path, vgs_matrix** out) {
  return Guard([&] {
    Require(path && out, "null argument");
    *out = new vgs_matrix{vgs::ReadFeatures(path)};
  });
}

vgs_status vgs_matrix_write(const vgs_matrix* m, const char* path) {
  return Guard([&] {
    Require(m && path, "null argument");
    vgs::WriteFeatures(m->m, path);
  });
}

size_t vgs_matrix_rows(const vgs_matrix* m) { return m ? m->m.rows() : 0; }
size_t vgs_matrix_cols(const vgs_matrix* m) { return m ? m->m.cols() : 0; }
const float* vgs_matrix_data(const vgs_matrix* m) {
  return m ? m->m.values().data() : nullptr;
}
void vgs_matrix_free(vgs_matrix* m) { delete m; }

// ---- Pair manifests ------------------------------------------------------

vgs_status vgs_manifest_read(const char* path, vgs_manifest** out) {
  return Guard([&] {
    Require(path && out, "null argument");
    *out = new vgs_manifest{vgs::ReadPairManifest(path)};
  });
}

vgs_status vgs_manifest_parse(const char* jsonl, vgs_manifest** out) {
  return Guard([&] {
    Require(jsonl && out, "null argument");
    *out = new vgs_manifest{vgs::ParsePairManifest(jsonl)};
  });
}

size_t vgs_manifest_num_captions(const vgs_manifest* m) {
  return m ? m->m.num_captions() : 0;
}
size_t vgs_manifest_num_images(const vgs_manifest* m) {
  return m ? m->m.num_images() : 0;
}
const char* vgs_manifest_caption_id(const vgs_manifest* m, size_t caption) {
  if (!m || caption >= m->m.num_captions()) return nullptr;
  return m->m.records()[caption].caption_id.c_str();
}
const char* vgs_manifest_image_id(const vgs_manifest* m, size_t image) {
  if (!m || image >= m->m.num_images()) return nullptr;
  return m->m.image_ids()[image].c_str();
}
size_t vgs_manifest_image_of_caption(const vgs_manifest* m, size_t caption) {
  if (!m || caption >= m->m.num_captions()) return static_cast<size_t>(-1);
  return m->m.image_of_caption(caption);
}

vgs_status vgs_manifest_positive_mask(const vgs_manifest* m, uint8_t* mask) {
  return Guard([&] {
    Require(m && mask, "null argument");
    const auto built = vgs::BuildPositiveMask(m->m);
    std::copy(built.values().begin(), built.values().end(), mask);
  });
}

void vgs_manifest_free(vgs_manifest* m) { delete m; }

// ---- Losses --------------------------------------------------------------

vgs_status vgs_matching_loss(const double* scores, const uint8_t* mask, size_t batch,
                             double delta, vgs_reduction reduction, double* loss,
                             double* grad) {
  return Guard([&] {
    Require(scores && mask && loss, "null argument");
    vgs::ScoreMatrix s{CopyMatrix(scores, batch, batch), vgs::ScoreKind::kCoarse};
    vgs::MatchingLossConfig cfg;
    cfg.delta = delta;
    cfg.mask = vgs::Matrix<std::uint8_t>(batch, batch, Copy(mask, batch * batch));
    cfg.reduction = reduction == VGS_REDUCTION_BATCH_MEAN ? vgs::Reduction::kBatchMean
                                                          : vgs::Reduction::kSum;
    const auto r = vgs::MatchingLoss(s, cfg);
    *loss = r.loss;
    if (grad) std::copy(r.grad.values().begin(), r.grad.values().end(), grad);
  });
}

vgs_status vgs_w2v2_loss(const double* context, const double* positive,
                         const double* distractors, size_t num_distractors, size_t dim,
                         double kappa, double* loss, double* grad_context,
                         double* grad_positive, double* grad_distractors) {
  return Guard([&] {
    Require(context && positive && loss && (distractors || num_distractors == 0),
            "null argument");
    vgs::W2V2LossInput in;
    in.context = Copy(context, dim);
    in.positive = Copy(positive, dim);
    for (std::size_t k = 0; k < num_distractors; ++k) {
      in.distractors.push_back(Copy(distractors + k * dim, dim));
    }
    in.kappa = kappa;
    const auto r = vgs::W2V2ContrastiveLoss(in);
    *loss = r.loss;
    if (grad_context) std::copy(r.grad_context.begin(), r.grad_context.end(), grad_context);
    if (grad_positive) {
      std::copy(r.grad_positive.begin(), r.grad_positive.end(), grad_positive);
    }
    if (grad_distractors) {
      for (std::size_t k = 0; k < num_distractors; ++k) {
        std::copy(r.grad_distractors[k].begin(), r.grad_distractors[k].end(),
                  grad_distractors + k * dim);
      }
    }
  });
}

vgs_status vgs_diversity_loss(const double* p_bar, size_t groups, size_t entries,
                              int negate, double* loss, double* grad) {
  return Guard([&] {
    Require(p_bar && loss, "null argument");
    const vgs::CodeDistribution dist(CopyMatrix(p_bar, groups, entries));
    const auto r = vgs::DiversityLoss(dist, negate != 0);
    *loss = r.loss;
    if (grad) std::copy(r.grad.values().begin(), r.grad.values().end(), grad);
  });
}

vgs_loss_weights vgs_default_loss_weights(void) {
  const vgs::LossWeights w;
  return {w.coarse, w.fine, w.w2v2, w.diversity};
}

vgs_status vgs_total_objective(double lc, double lf, double lw, double ld,
                               const vgs_loss_weights* weights, vgs_objective objective,
                               double* out) {
  return Guard([&] {
    Require(out, "null argument");
    vgs::LossWeights w;
    if (weights) w = {weights->coarse, weights->fine, weights->w2v2, weights->diversity};
    *out = vgs::TotalObjective(lc, lf, lw, ld, w,
                               objective == VGS_OBJECTIVE_FASTVGS_PLUS
                                   ? vgs::Objective::kFastVgsPlus
                                   : vgs::Objective::kFastVgs);
  });
}

vgs_status vgs_finite_difference_check(vgs_gradient_fn f, void* user, const double* x0,
                                       size_t n, double eps, double* max_rel_error) {
  return Guard([&] {
    Require(f && x0 && max_rel_error, "null argument");
    const vgs::GradientFunction fn = [&](std::span<const double> x,
                                         std::span<double> g) {
      return f(x.data(), g.data(), x.size(), user);
    };
    const auto x = Copy(x0, n);
    *max_rel_error = vgs::FiniteDifferenceCheck(fn, x, eps);
  });
}

vgs_gradient_suite_options vgs_default_gradient_suite_options(void) {
  const vgs::GradientSuiteOptions o;
  return {o.instances, o.max_batch,   o.max_dim, o.max_distractors,
          o.max_groups, o.max_entries, o.eps,     o.seed};
}

vgs_status vgs_gradient_suite(const vgs_gradient_suite_options* opts,
                              vgs_gradient_suite_result* out) {
  return Guard([&] {
    Require(out, "null argument");
    vgs::GradientSuiteOptions o;
    if (opts) {
      o.instances = opts->instances;
      o.max_batch = opts->max_batch;
      o.max_dim = opts->max_dim;
      o.max_distractors = opts->max_distractors;
      o.max_groups = opts->max_groups;
      o.max_entries = opts->max_entries;
      o.eps = opts->eps;
      o.seed = opts->seed;
    }
    const auto r = vgs::RunGradientSuite(o);
    *out = {r.matching_max_error, r.w2v2_max_error, r.diversity_max_error};
  });
}

// ---- Codebooks and k-means -----------------------------------------------

vgs_status vgs_codebook_assign(const double* codewords, size_t groups, size_t entries,
                               size_t dim, const double* logits, size_t steps,
                               vgs_assign_mode mode, double temperature, uint64_t seed,
                               uint32_t* indices, double* probs, double* codes) {
  return Guard([&] {
    Require(codewords && logits && indices, "null argument");
    const vgs::Codebook cb(groups, entries, dim,
                           Copy(codewords, groups * entries * dim));
    vgs::Tensor3 lg(steps, groups, entries);
    std::copy(logits, logits + lg.values().size(), lg.values().begin());
    const auto r = vgs::CodebookAssign(
        cb, lg, mode == VGS_ASSIGN_GUMBEL ? vgs::AssignMode::kGumbel : vgs::AssignMode::kHard,
        temperature, seed);
    std::copy(r.indices.values().begin(), r.indices.values().end(), indices);
    if (probs) std::copy(r.probs.values().begin(), r.probs.values().end(), probs);
    if (codes) std::copy(r.codes.values().begin(), r.codes.values().end(), codes);
  });
}

vgs_status vgs_batch_code_distribution(const double* probs, size_t steps, size_t groups,
                                       size_t entries, double* p_bar) {
  return Guard([&] {
    Require(probs && p_bar, "null argument");
    vgs::Tensor3 p(steps, groups, entries);
    std::copy(probs, probs + p.values().size(), p.values().begin());
    const auto d = vgs::BatchCodeDistribution(p);
    std::copy(d.p_bar().values().begin(), d.p_bar().values().end(), p_bar);
  });
}

vgs_status vgs_kmeans_fit(const vgs_matrix* data, size_t k, size_t max_iters,
                          uint64_t seed, vgs_kmeans** out) {
  return Guard([&] {
    Require(data && out, "null argument");
    *out = new vgs_kmeans{vgs::KMeansFit(data->m, k, max_iters, seed)};
  });
}

vgs_status vgs_kmeans_save(const vgs_kmeans* model, const char* path) {
  return Guard([&] {
    Require(model && path, "null argument");
    vgs::SaveKMeans(model->m, path);
  });
}

vgs_status vgs_kmeans_load(const char* path, vgs_kmeans** out) {
  return Guard([&] {
    Require(path && out, "null argument");
    *out = new vgs_kmeans{vgs::LoadKMeans(path)};
  });
}

size_t vgs_kmeans_k(const vgs_kmeans* model) { return model ? model->m.k() : 0; }
size_t vgs_kmeans_dim(const vgs_kmeans* model) { return model ? model->m.dim() : 0; }
size_t vgs_kmeans_iterations(const vgs_kmeans* model) {
  return model ? model->m.iterations : 0;
}
size_t vgs_kmeans_history_size(const vgs_kmeans* model) {
  return model ? model->m.inertia_history.size() : 0;
}
double vgs_kmeans_history(const vgs_kmeans* model, size_t i) {
  if (!model || i >= model->m.inertia_history.size()) return 0.0;
  return model->m.inertia_history[i];
}
const double* vgs_kmeans_centroids(const vgs_kmeans* model) {
  return model ? model->m.centroids.data() : nullptr;
}

vgs_status vgs_kmeans_quantize(const vgs_kmeans* model, const vgs_matrix* frames,
                               uint32_t* units) {
  return Guard([&] {
    Require(model && frames && units, "null argument");
    const vgs::FrameSequence seq(frames->m, 50.0, "");
    const auto u = vgs::KMeansQuantize(model->m, seq);
    std::copy(u.units().begin(), u.units().end(), units);
  });
}

void vgs_kmeans_free(vgs_kmeans* model) { delete model; }

// ---- Unit sequences ------------------------------------------------------

vgs_status vgs_units_create(vgs_units** out) {
  return Guard([&] {
    Require(out, "null argument");
    *out = new vgs_units{};
  });
}

vgs_status vgs_units_read(const char* path, vgs_units** out) {
  return Guard([&] {
    Require(path && out, "null argument");
    *out = new vgs_units{vgs::ReadUnitSequences(path)};
  });
}

vgs_status vgs_units_append(vgs_units* u, const char* utterance_id,
                            const uint32_t* units, size_t n) {
  return Guard([&] {
    Require(u && utterance_id && (units || n == 0), "null argument");
    u->seqs.emplace_back(Copy(units, n), utterance_id, 0);
  });
}

vgs_status vgs_units_write(const vgs_units* u, const char* path) {
  return Guard([&] {
    Require(u && path, "null argument");
    std::string text;
    for (const auto& s : u->seqs) text += vgs::FormatUnitSequence(s) + "\n";
    std::FILE* f = std::fopen(path, "wb");
    if (!f) throw vgs::Error(vgs::ErrorCode::kIoFailure, std::string("cannot open ") + path);
    const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size();
    if (std::fclose(f) != 0 || !ok) {
      throw vgs::Error(vgs::ErrorCode::kIoFailure, std::string("cannot write ") + path);
    }
  });
}

size_t vgs_units_count(const vgs_units* u) { return u ? u->seqs.size() : 0; }
const char* vgs_units_id(const vgs_units* u, size_t i) {
  if (!u || i >= u->seqs.size()) return nullptr;
  return u->seqs[i].utterance_id().c_str();
}
size_t vgs_units_length(const vgs_units* u, size_t i) {
  if (!u || i >= u->seqs.size()) return 0;
  return u->seqs[i].size();
}
const uint32_t* vgs_units_data(const vgs_units* u, size_t i) {
  if (!u || i >= u->seqs.size()) return nullptr;
  return u->seqs[i].units().data();
}
void vgs_units_free(vgs_units* u) { delete u; }

// ---- Span masking --------------------------------------------------------

vgs_mask_spec vgs_default_mask_spec(void) {
  const vgs::MaskSpec s;
  return {s.p, s.span_len, VGS_MASK_PER_UTTERANCE, s.seed};
}

vgs_status vgs_sample_mask(size_t length, const vgs_mask_spec* spec, uint8_t* flags) {
  return Guard([&] {
    Require(flags || length == 0, "null argument");
    const auto m = vgs::SampleMask(length, ToSpec(spec));
    std::copy(m.flags.begin(), m.flags.end(), flags);
  });
}

vgs_status vgs_batch_masks(const size_t* lengths, size_t count, const vgs_mask_spec* spec,
                           uint8_t* flags) {
  return Guard([&] {
    Require(lengths && flags, "null argument");
    const auto masks = vgs::BatchMasks(std::span(lengths, count), ToSpec(spec));
    for (const auto& m : masks) flags = std::copy(m.flags.begin(), m.flags.end(), flags);
  });
}

vgs_status vgs_mean_masked_fraction(const size_t* lengths, size_t count,
                                    const vgs_mask_spec* spec, size_t num_seeds,
                                    double* fractions) {
  return Guard([&] {
    Require(lengths && fractions, "null argument");
    const auto f = vgs::MeanMaskedFraction(std::span(lengths, count), ToSpec(spec), num_seeds);
    std::copy(f.begin(), f.end(), fractions);
  });
}

// ---- Retrieval -----------------------------------------------------------

vgs_status vgs_coarse_scores(const vgs_matrix* queries, const vgs_matrix* targets,
                             double* out) {
  return Guard([&] {
    Require(queries && targets && out, "null argument");
    const auto s = vgs::CoarseScores(queries->m, targets->m);
    std::copy(s.values().begin(), s.values().end(), out);
  });
}

vgs_status vgs_top_k(const double* scores, size_t n, size_t k, size_t* out,
                     size_t* count) {
  return Guard([&] {
    Require(scores && out && count, "null argument");
    const auto idx = vgs::TopK(std::span(scores, n), k);
    std::copy(idx.begin(), idx.end(), out);
    *count = idx.size();
  });
}

vgs_status vgs_ctf_retrieve_table(const vgs_matrix* queries, const vgs_matrix* targets,
                                  const double* table, size_t kc, size_t n,
                                  size_t threads, vgs_ranking** out,
                                  uint64_t* fine_calls) {
  return Guard([&] {
    Require(queries && targets && table && out, "null argument");
    vgs::TableFineScorer fine(
        CopyMatrix(table, queries->m.rows(), targets->m.rows()));
    auto lists = vgs::CtfRetrieve(queries->m, targets->m, fine, kc, n, threads);
    *out = new vgs_ranking{std::move(lists)};
    if (fine_calls) *fine_calls = fine.call_count();
  });
}

vgs_status vgs_ctf_retrieve_callback(const vgs_matrix* queries, const vgs_matrix* targets,
                                     vgs_fine_score_fn fn, void* user,
                                     int concurrent_safe, size_t kc, size_t n,
                                     size_t threads, vgs_ranking** out,
                                     uint64_t* fine_calls) {
  return Guard([&] {
    Require(queries && targets && fn && out, "null argument");
    vgs::CallbackFineScorer fine(
        [fn, user](std::size_t q, std::size_t c) { return fn(q, c, user); },
        concurrent_safe != 0);
    auto lists = vgs::CtfRetrieve(queries->m, targets->m, fine, kc, n, threads);
    *out = new vgs_ranking{std::move(lists)};
    if (fine_calls) *fine_calls = fine.call_count();
  });
}

vgs_status vgs_rank_all(const double* scores, size_t rows, size_t cols, size_t n,
                        vgs_ranking** out) {
  return Guard([&] {
    Require(scores && out, "null argument");
    *out = new vgs_ranking{vgs::RankAll(CopyMatrix(scores, rows, cols), n)};
  });
}

size_t vgs_ranking_num_queries(const vgs_ranking* r) { return r ? r->lists.size() : 0; }
size_t vgs_ranking_list_size(const vgs_ranking* r, size_t query) {
  if (!r || query >= r->lists.size()) return 0;
  return r->lists[query].candidates.size();
}
size_t vgs_ranking_candidate(const vgs_ranking* r, size_t query, size_t rank) {
  if (!r || query >= r->lists.size() || rank >= r->lists[query].candidates.size()) {
    return static_cast<size_t>(-1);
  }
  return r->lists[query].candidates[rank];
}
double vgs_ranking_score(const vgs_ranking* r, size_t query, size_t rank) {
  if (!r || query >= r->lists.size() || rank >= r->lists[query].scores.size()) return 0.0;
  return r->lists[query].scores[rank];
}
void vgs_ranking_free(vgs_ranking* r) { delete r; }

vgs_status vgs_recall_at_n(const vgs_ranking* r, const vgs_manifest* manifest, size_t n,
                           vgs_direction direction, double* out) {
  return Guard([&] {
    Require(r && manifest && out, "null argument");
    *out = vgs::RecallAtN(r->lists, manifest->m, n,
                          direction == VGS_IMAGE_TO_SPEECH
                              ? vgs::RetrievalDirection::kImageToSpeech
                              : vgs::RetrievalDirection::kSpeechToImage);
  });
}

// ---- Feature stores, ABX and semantic evaluation -------------------------

vgs_status vgs_feature_store_create(vgs_feature_store** out) {
  return Guard([&] {
    Require(out, "null argument");
    *out = new vgs_feature_store{};
  });
}

vgs_status vgs_feature_store_load_dir(const char* dir, double frame_rate_hz,
                                      vgs_feature_store** out) {
  return Guard([&] {
    Require(dir && out, "null argument");
    *out = new vgs_feature_store{vgs::LoadFeatureDir(dir, frame_rate_hz)};
  });
}

vgs_status vgs_feature_store_add(vgs_feature_store* store, const char* id,
                                 const vgs_matrix* frames) {
  return Guard([&] {
    Require(store && id && frames, "null argument");
    store->store.insert_or_assign(id, vgs::FrameSequence(frames->m, 50.0, id));
  });
}

size_t vgs_feature_store_size(const vgs_feature_store* store) {
  return store ? store->store.size() : 0;
}
void vgs_feature_store_free(vgs_feature_store* store) { delete store; }

vgs_status vgs_dtw_distance(const vgs_matrix* x, const vgs_matrix* y, double* out) {
  return Guard([&] {
    Require(x && y && out, "null argument");
    *out = vgs::DtwDistance(x->m, y->m);
  });
}

vgs_status vgs_abx_evaluate(const vgs_feature_store* store, const char* triplets_path,
                            int weighted, size_t threads, vgs_abx_report** out) {
  return Guard([&] {
    Require(store && triplets_path && out, "null argument");
    const auto triplets = vgs::ReadTriplets(triplets_path);
    *out = new vgs_abx_report{vgs::AbxError(
             triplets, store->store,
             weighted ? vgs::AbxAggregation::kWeighted : vgs::AbxAggregation::kUnweighted,
             threads)};
  });
}

double vgs_abx_overall(const vgs_abx_report* r) { return r ? r->r.overall : 0.0; }
size_t vgs_abx_triples(const vgs_abx_report* r) { return r ? r->r.triples : 0; }
size_t vgs_abx_num_groups(const vgs_abx_report* r) { return r ? r->r.groups.size() : 0; }
const char* vgs_abx_group_key(const vgs_abx_report* r, size_t i) {
  if (!r || i >= r->r.groups.size()) return nullptr;
  return r->r.groups[i].group_key.c_str();
}
double vgs_abx_group_error(const vgs_abx_report* r, size_t i) {
  if (!r || i >= r->r.groups.size()) return 0.0;
  return r->r.groups[i].error;
}
size_t vgs_abx_group_triples(const vgs_abx_report* r, size_t i) {
  if (!r || i >= r->r.groups.size()) return 0;
  return r->r.groups[i].triples;
}
void vgs_abx_report_free(vgs_abx_report* r) { delete r; }

vgs_status vgs_pool(const vgs_matrix* frames, vgs_pool_mode mode, double* out) {
  return Guard([&] {
    Require(frames && out, "null argument");
    const auto p = vgs::Pool(frames->m, ToPool(mode));
    std::copy(p.values.begin(), p.values.end(), out);
  });
}

vgs_status vgs_spearman(const double* xs, const double* ys, size_t n, double* out) {
  return Guard([&] {
    Require(xs && ys && out, "null argument");
    *out = vgs::Spearman(std::span(xs, n), std::span(ys, n));
  });
}

vgs_status vgs_semantic_score(const vgs_feature_store* store, const char* judgments_path,
                              vgs_pool_mode mode, size_t threads, double* out,
                              size_t* num_pairs) {
  return Guard([&] {
    Require(store && judgments_path && out, "null argument");
    const auto judgments = vgs::ReadJudgments(judgments_path);
    *out = vgs::SemanticScore(judgments, store->store, ToPool(mode), threads);
    if (num_pairs) *num_pairs = judgments.size();
  });
}

// ---- Unit language models ------------------------------------------------

vgs_span_spec vgs_default_span_spec(void) {
  const vgs::SpanSpec s;
  return {s.mean, s.std, s.coverage_target, s.seed};
}

vgs_status vgs_span_sample(size_t length, const vgs_span_spec* spec, size_t* starts,
                           size_t* lens, size_t capacity, size_t* count) {
  return Guard([&] {
    Require(count && ((starts && lens) || capacity == 0), "null argument");
    const auto spans = vgs::SpanSample(length, ToSpec(spec));
    const std::size_t n = std::min(capacity, spans.size());
    for (std::size_t i = 0; i < n; ++i) {
      starts[i] = spans[i].start;
      lens[i] = spans[i].len;
    }
    *count = spans.size();
  });
}

vgs_status vgs_ngram_train(const vgs_units* corpus, size_t order, double add_k,
                           size_t vocab_size, vgs_ngram** out) {
  return Guard([&] {
    Require(corpus && out, "null argument");
    if (vocab_size == 0) {
      for (const auto& s : corpus->seqs) {
        for (auto u : s.units()) vocab_size = std::max<std::size_t>(vocab_size, u + 1);
      }
    }
    *out = new vgs_ngram{vgs::NGramLM::Train(corpus->seqs, order, add_k, vocab_size)};
  });
}

vgs_status vgs_ngram_save(const vgs_ngram* lm, const char* path) {
  return Guard([&] {
    Require(lm && path, "null argument");
    lm->lm.Save(path);
  });
}

vgs_status vgs_ngram_load(const char* path, vgs_ngram** out) {
  return Guard([&] {
    Require(path && out, "null argument");
    *out = new vgs_ngram{vgs::NGramLM::Load(path)};
  });
}

size_t vgs_ngram_order(const vgs_ngram* lm) { return lm ? lm->lm.order() : 0; }
size_t vgs_ngram_vocab_size(const vgs_ngram* lm) { return lm ? lm->lm.vocab_size() : 0; }

vgs_status vgs_ngram_prob(const vgs_ngram* lm, const uint32_t* history, size_t history_len,
                          uint32_t unit, double* out) {
  return Guard([&] {
    Require(lm && out && (history || history_len == 0), "null argument");
    *out = lm->lm.Prob(std::span(history, history_len), unit);
  });
}

vgs_status vgs_ngram_sequence_log_prob(const vgs_ngram* lm, const uint32_t* units,
                                       size_t n, double* out) {
  return Guard([&] {
    Require(lm && units && out, "null argument");
    *out = lm->lm.SequenceLogProb(std::span(units, n));
  });
}

vgs_status vgs_pseudo_logprob(const vgs_ngram* lm, const uint32_t* units, size_t n,
                              const vgs_span_spec* spec, size_t repeats, double* out) {
  return Guard([&] {
    Require(lm && units && out, "null argument");
    *out = vgs::PseudoLogProb(lm->lm, std::span(units, n), ToSpec(spec), repeats);
  });
}

void vgs_ngram_free(vgs_ngram* lm) { delete lm; }

vgs_status vgs_paired_accuracy(const double* pos, const double* neg, size_t n,
                               double* out) {
  return Guard([&] {
    Require(pos && neg && out, "null argument");
    *out = vgs::PairedAccuracy(std::span(pos, n), std::span(neg, n));
  });
}

}  // extern "C"
