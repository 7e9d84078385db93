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

#include "vgskit/abx.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "jsonl.hpp"
#include "parallel.hpp"
#include "vgskit/error.hpp"

namespace vgs {

namespace {

std::vector<double> FrameNorms(const FeatureMatrix& m) {
  std::vector<double> norms(m.rows());
  for (std::size_t t = 0; t < m.rows(); ++t) {
    double s = 0.0;
    for (float v : m.row(t)) s += static_cast<double>(v) * v;
    if (s == 0.0) {
      throw Error(ErrorCode::kZeroNormFrame, "frame " + std::to_string(t) + " has zero norm");
    }
    norms[t] = std::sqrt(s);
  }
  return norms;
}

double Dot(std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * b[i];
  return s;
}

const FrameSequence& Lookup(const FeatureStore& store, const std::string& id) {
  auto it = store.find(id);
  if (it == store.end()) throw Error(ErrorCode::kMissingFeature, "no features for '" + id + "'");
  return it->second;
}

}  // namespace

double CosineDistance(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::kDimMismatch, "frame dims differ");
  const double na = std::sqrt(Dot(a, a));
  const double nb = std::sqrt(Dot(b, b));
  if (na == 0.0 || nb == 0.0) throw Error(ErrorCode::kZeroNormFrame, "zero-norm frame");
  return std::max(0.0, 1.0 - Dot(a, b) / (na * nb));
}

double DtwDistance(const FeatureMatrix& x, const FeatureMatrix& y) {
  if (x.cols() != y.cols()) {
    throw Error(ErrorCode::kDimMismatch, "frame dims " + std::to_string(x.cols()) +
                                             " and " + std::to_string(y.cols()));
  }
  const auto nx = FrameNorms(x);
  const auto ny = FrameNorms(y);
  const std::size_t rows = x.rows();
  const std::size_t cols = y.rows();

  // Accumulated (cost, length) per cell, compared lexicographically.
  std::vector<double> cost(rows * cols);
  std::vector<std::size_t> len(rows * cols);
  auto at = [cols](std::size_t i, std::size_t j) { return i * cols + j; };
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      // Clamped: roundoff can push 1 - cos slightly below zero.
      const double d = std::max(0.0, 1.0 - Dot(x.row(i), y.row(j)) / (nx[i] * ny[j]));
      if (i == 0 && j == 0) {
        cost[0] = d;
        len[0] = 1;
        continue;
      }
      double best_c = 0.0;
      std::size_t best_l = 0;
      bool have = false;
      auto consider = [&](std::size_t k) {
        if (!have || cost[k] < best_c || (cost[k] == best_c && len[k] < best_l)) {
          best_c = cost[k];
          best_l = len[k];
          have = true;
        }
      };
      if (i > 0 && j > 0) consider(at(i - 1, j - 1));
      if (i > 0) consider(at(i - 1, j));
      if (j > 0) consider(at(i, j - 1));
      cost[at(i, j)] = best_c + d;
      len[at(i, j)] = best_l + 1;
    }
  }
  const std::size_t end = at(rows - 1, cols - 1);
  return cost[end] / static_cast<double>(len[end]);
}

double DtwDistance(const FrameSequence& x, const FrameSequence& y) {
  return DtwDistance(x.frames, y.frames);
}

std::vector<AbxTriplet> ParseTriplets(std::string_view text) {
  constexpr auto kBad = ErrorCode::kInvalidManifest;
  std::vector<AbxTriplet> out;
  jsonl::ForEachRecord(text, kBad, [&](const jsonl::Json& rec, std::size_t line) {
    AbxTriplet t{jsonl::RequireString(rec, "a_id", line, kBad),
                 jsonl::RequireString(rec, "b_id", line, kBad),
                 jsonl::RequireString(rec, "x_id", line, kBad),
                 jsonl::RequireString(rec, "group_key", line, kBad)};
    if (t.group_key.empty()) {
      throw Error(kBad, "line " + std::to_string(line) + ": empty group_key");
    }
    out.push_back(std::move(t));
  });
  return out;
}

std::vector<AbxTriplet> ReadTriplets(const std::filesystem::path& path) {
  return ParseTriplets(ReadTextFile(path));
}

double AbxTripleScore(double dist_ax, double dist_bx) {
  if (dist_ax < dist_bx) return 0.0;
  if (dist_ax > dist_bx) return 1.0;
  return 0.5;
}

AbxReport AbxError(std::span<const AbxTriplet> triplets, const FeatureStore& features,
                   AbxAggregation aggregation, std::size_t threads) {
  if (triplets.empty()) throw Error(ErrorCode::kEmptyManifest, "no triplets");
  for (const auto& t : triplets) {
    if (t.group_key.empty()) throw Error(ErrorCode::kInvalidManifest, "empty group_key");
    Lookup(features, t.a_id);
    Lookup(features, t.b_id);
    Lookup(features, t.x_id);
  }

  std::vector<double> scores(triplets.size());
  detail::ParallelFor(triplets.size(), threads, [&](std::size_t i) {
    const auto& t = triplets[i];
    const auto& x = Lookup(features, t.x_id);
    scores[i] = AbxTripleScore(DtwDistance(Lookup(features, t.a_id), x),
                               DtwDistance(Lookup(features, t.b_id), x));
  });

  std::map<std::string, std::pair<double, std::size_t>> by_group;
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    auto& [sum, count] = by_group[triplets[i].group_key];
    sum += scores[i];
    ++count;
  }

  AbxReport report;
  report.triples = triplets.size();
  double total = 0.0;
  for (const auto& [key, acc] : by_group) {
    report.groups.push_back({key, acc.first / static_cast<double>(acc.second), acc.second});
    total += report.groups.back().error;
  }
  if (aggregation == AbxAggregation::kUnweighted) {
    report.overall = total / static_cast<double>(report.groups.size());
  } else {
    double weighted = 0.0;
    for (const auto& [key, acc] : by_group) weighted += acc.first;
    report.overall = weighted / static_cast<double>(triplets.size());
  }
  return report;
}

SyntheticAbxTask MakeSyntheticAbxTask(const SyntheticAbxOptions& opts) {
  if (opts.categories < 2 || opts.tokens_per_category < 2 || opts.dim < 1 ||
      opts.min_frames < 1 || opts.max_frames < opts.min_frames) {
    throw Error(ErrorCode::kInvalidArgument, "invalid synthetic ABX options");
  }
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> frames_dist(opts.min_frames, opts.max_frames);

  auto random_unit = [&] {
    std::vector<double> v(opts.dim);
    double n = 0.0;
    do {
      n = 0.0;
      for (double& x : v) {
        x = gauss(rng);
        n += x * x;
      }
    } while (n == 0.0);
    for (double& x : v) x /= std::sqrt(n);
    return v;
  };

  SyntheticAbxTask task;
  std::vector<std::vector<std::string>> ids(opts.categories);
  for (std::size_t c = 0; c < opts.categories; ++c) {
    const auto proto = random_unit();
    for (std::size_t k = 0; k < opts.tokens_per_category; ++k) {
      const std::size_t frames = frames_dist(rng);
      std::vector<float> values;
      values.reserve(frames * opts.dim);
      for (std::size_t t = 0; t < frames; ++t) {
        if (opts.iid) {
          for (double v : random_unit()) values.push_back(static_cast<float>(v));
        } else {
          for (double p : proto) values.push_back(static_cast<float>(p + opts.noise * gauss(rng)));
        }
      }
      std::string id = "c" + std::to_string(c) + "_t" + std::to_string(k);
      task.features.emplace(id, FrameSequence(FeatureMatrix(frames, opts.dim, std::move(values)),
                                              50.0, id));
      ids[c].push_back(std::move(id));
    }
  }

  std::uniform_int_distribution<std::size_t> cat(0, opts.categories - 1);
  std::uniform_int_distribution<std::size_t> tok(0, opts.tokens_per_category - 1);
  for (std::size_t i = 0; i < opts.num_triplets; ++i) {
    const std::size_t ca = cat(rng);
    std::size_t cb = cat(rng);
    while (cb == ca) cb = cat(rng);
    const std::size_t a = tok(rng);
    std::size_t x = tok(rng);
    while (x == a) x = tok(rng);
    task.triplets.push_back({ids[ca][a], ids[cb][tok(rng)], ids[ca][x],
                             i % 2 == 0 ? "within" : "across"});
  }
  return task;
}

}  // namespace vgs
