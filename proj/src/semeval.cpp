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

#include "vgskit/semeval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <utility>

#include "jsonl.hpp"
#include "parallel.hpp"
#include "vgskit/error.hpp"

namespace vgs {

namespace {

const FrameSequence& Lookup(const FeatureStore& store, const std::string& id) {
  auto it = store.find(id);
  if (it == store.end()) throw Error(ErrorCode::kMissingFeature, "no features for '" + id + "'");
  return it->second;
}

}  // namespace

PooledVector Pool(const FeatureMatrix& frames, PoolMode mode) {
  if (frames.rows() == 0) throw Error(ErrorCode::kEmptySequence, "no frames to pool");
  PooledVector out{std::vector<double>(frames.row(0).begin(), frames.row(0).end()), mode};
  for (std::size_t t = 1; t < frames.rows(); ++t) {
    const auto f = frames.row(t);
    for (std::size_t d = 0; d < f.size(); ++d) {
      if (mode == PoolMode::kMean) {
        out.values[d] += f[d];
      } else {
        out.values[d] = std::max(out.values[d], static_cast<double>(f[d]));
      }
    }
  }
  if (mode == PoolMode::kMean) {
    for (double& v : out.values) v /= static_cast<double>(frames.rows());
  }
  return out;
}

PooledVector Pool(const FrameSequence& frames, PoolMode mode) {
  return Pool(frames.frames, mode);
}

double ModelSimilarity(const PooledVector& a, const PooledVector& b) {
  if (a.values.size() != b.values.size()) {
    throw Error(ErrorCode::kDimMismatch, "pooled vectors differ in size");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0.0 || nb == 0.0) throw Error(ErrorCode::kZeroVector, "pooled vector is zero");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

std::vector<double> AverageRanks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && xs[order[j]] == xs[order[i]]) ++j;
    // Positions i..j-1 (0-based) share rank mean(i+1 .. j).
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

double Spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error(ErrorCode::kLengthMismatch, "series lengths differ");
  if (xs.size() < 2) throw Error(ErrorCode::kDegenerateInput, "need at least two points");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
      throw Error(ErrorCode::kNonFiniteValue, "series value is not finite");
    }
  }
  const auto rx = AverageRanks(xs);
  const auto ry = AverageRanks(ys);
  const double n = static_cast<double>(xs.size());
  // Both rank vectors have mean (n + 1) / 2.
  const double mean = 0.5 * (n + 1.0);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::kDegenerateInput, "constant series has no rank correlation");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<Judgment> ParseJudgments(std::string_view text) {
  constexpr auto kBad = ErrorCode::kInvalidManifest;
  std::vector<Judgment> out;
  std::set<std::pair<std::string, std::string>> seen;
  jsonl::ForEachRecord(text, kBad, [&](const jsonl::Json& rec, std::size_t line) {
    Judgment j{jsonl::RequireString(rec, "id_1", line, kBad),
               jsonl::RequireString(rec, "id_2", line, kBad),
               jsonl::RequireNumber(rec, "human_score", line, kBad)};
    if (!std::isfinite(j.human_score)) {
      throw Error(kBad, "line " + std::to_string(line) + ": score not finite");
    }
    auto key = std::minmax(j.id_1, j.id_2);
    if (!seen.emplace(key.first, key.second).second) {
      throw Error(kBad, "line " + std::to_string(line) + ": duplicate pair");
    }
    out.push_back(std::move(j));
  });
  return out;
}

std::vector<Judgment> ReadJudgments(const std::filesystem::path& path) {
  return ParseJudgments(ReadTextFile(path));
}

double SemanticScore(std::span<const Judgment> judgments, const FeatureStore& features,
                     PoolMode mode, std::size_t threads) {
  for (const auto& j : judgments) {
    Lookup(features, j.id_1);
    Lookup(features, j.id_2);
  }
  std::vector<double> model(judgments.size());
  std::vector<double> human(judgments.size());
  detail::ParallelFor(judgments.size(), threads, [&](std::size_t i) {
    const auto& j = judgments[i];
    model[i] = ModelSimilarity(Pool(Lookup(features, j.id_1), mode),
                               Pool(Lookup(features, j.id_2), mode));
    human[i] = j.human_score;
  });
  return 100.0 * Spearman(model, human);
}

}  // namespace vgs
