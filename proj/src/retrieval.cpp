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

#include "vgskit/retrieval.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "parallel.hpp"
#include "vgskit/error.hpp"

namespace vgs {

namespace {

RankedList Rank(std::size_t query, std::span<const std::size_t> pool,
                std::span<const double> pool_scores, std::size_t n) {
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t keep = std::min(n, pool.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep),
                    order.end(), [&](std::size_t a, std::size_t b) {
                      if (pool_scores[a] != pool_scores[b]) return pool_scores[a] > pool_scores[b];
                      return pool[a] < pool[b];
                    });
  RankedList out;
  out.query = query;
  for (std::size_t i = 0; i < keep; ++i) {
    out.candidates.push_back(pool[order[i]]);
    out.scores.push_back(pool_scores[order[i]]);
  }
  return out;
}

}  // namespace

RealMatrix CoarseScores(const FeatureMatrix& queries, const FeatureMatrix& targets) {
  if (queries.cols() != targets.cols()) {
    throw Error(ErrorCode::kDimMismatch, "query dim " + std::to_string(queries.cols()) +
                                             " vs target dim " +
                                             std::to_string(targets.cols()));
  }
  RealMatrix s(queries.rows(), targets.rows(), 0.0);
  for (std::size_t i = 0; i < queries.rows(); ++i) {
    const auto q = queries.row(i);
    for (std::size_t j = 0; j < targets.rows(); ++j) {
      const auto t = targets.row(j);
      double dot = 0.0;
      for (std::size_t d = 0; d < q.size(); ++d) {
        dot += static_cast<double>(q[d]) * static_cast<double>(t[d]);
      }
      s(i, j) = dot;
    }
  }
  return s;
}

std::vector<std::size_t> TopK(std::span<const double> scores, std::size_t k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "K must be >= 1");
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  const std::size_t keep = std::min(k, scores.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return a < b;
                    });
  idx.resize(keep);
  return idx;
}

TableFineScorer::TableFineScorer(RealMatrix table) : table_(std::move(table)) {}

double TableFineScorer::DoScore(std::size_t query, std::size_t candidate) {
  if (query >= table_.rows() || candidate >= table_.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "fine score table has no entry (" +
                                               std::to_string(query) + ", " +
                                               std::to_string(candidate) + ")");
  }
  return table_(query, candidate);
}

std::vector<RankedList> CtfRetrieve(const FeatureMatrix& queries,
                                    const FeatureMatrix& targets, FineScorer& fine,
                                    std::size_t kc, std::size_t n, std::size_t threads) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "N must be >= 1");
  if (kc < n) {
    throw Error(ErrorCode::kKcSmallerThanN,
                "Kc=" + std::to_string(kc) + " < N=" + std::to_string(n));
  }
  const RealMatrix coarse = CoarseScores(queries, targets);
  std::vector<RankedList> out(queries.rows());
  const std::size_t workers = fine.concurrent_safe() ? threads : 1;
  detail::ParallelFor(queries.rows(), workers, [&](std::size_t q) {
    const auto pool = TopK(coarse.row(q), kc);
    std::vector<double> fine_scores;
    fine_scores.reserve(pool.size());
    for (std::size_t c : pool) fine_scores.push_back(fine.Score(q, c));
    out[q] = Rank(q, pool, fine_scores, n);
  });
  return out;
}

std::vector<RankedList> RankAll(const RealMatrix& scores, std::size_t n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "N must be >= 1");
  std::vector<std::size_t> pool(scores.cols());
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<RankedList> out;
  out.reserve(scores.rows());
  for (std::size_t q = 0; q < scores.rows(); ++q) {
    out.push_back(Rank(q, pool, scores.row(q), n));
  }
  return out;
}

double RecallAtN(std::span<const RankedList> ranked, const PairManifest& manifest,
                 std::size_t n, RetrievalDirection direction) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "N must be >= 1");
  if (ranked.empty()) throw Error(ErrorCode::kInvalidArgument, "no ranked lists");
  const bool s2i = direction == RetrievalDirection::kSpeechToImage;
  const std::size_t num_queries = s2i ? manifest.num_captions() : manifest.num_images();
  const std::size_t num_candidates = s2i ? manifest.num_images() : manifest.num_captions();
  std::size_t hits = 0;
  for (const auto& list : ranked) {
    if (list.query >= num_queries) {
      throw Error(ErrorCode::kUnknownQuery,
                  "query " + std::to_string(list.query) + " not in manifest");
    }
    const std::size_t depth = std::min(n, list.candidates.size());
    for (std::size_t r = 0; r < depth; ++r) {
      const std::size_t c = list.candidates[r];
      if (c >= num_candidates) {
        throw Error(ErrorCode::kInvalidArgument,
                    "candidate " + std::to_string(c) + " not in manifest");
      }
      const bool match = s2i ? manifest.image_of_caption(list.query) == c
                             : manifest.image_of_caption(c) == list.query;
      if (match) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(ranked.size());
}

}  // namespace vgs
