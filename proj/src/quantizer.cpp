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

#include "vgskit/quantizer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "jsonl.hpp"
#include "vgskit/error.hpp"

namespace vgs {

namespace {

double SquaredDistance(std::span<const float> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    s += d * d;
  }
  return s;
}

std::size_t Argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

void Softmax(std::span<const double> logits, std::span<double> out) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    z += out[i];
  }
  for (double& p : out) p /= z;
}

// Strictly inside (0, 1) so the Gumbel transform stays finite.
double OpenUniform(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double x = 0.0;
  do {
    x = u(rng);
  } while (x <= 0.0);
  return x;
}

std::vector<std::uint32_t> AssignAll(const RealMatrix& centroids,
                                     const FeatureMatrix& data) {
  std::vector<std::uint32_t> a(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const auto x = data.row(i);
    std::uint32_t best = 0;
    double best_d = SquaredDistance(x, centroids.row(0));
    for (std::size_t c = 1; c < centroids.rows(); ++c) {
      const double d = SquaredDistance(x, centroids.row(c));
      if (d < best_d) {
        best_d = d;
        best = static_cast<std::uint32_t>(c);
      }
    }
    a[i] = best;
  }
  return a;
}

double Inertia(const RealMatrix& centroids, const FeatureMatrix& data,
               const std::vector<std::uint32_t>& assign) {
  double s = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    s += SquaredDistance(data.row(i), centroids.row(assign[i]));
  }
  return s;
}

RealMatrix PlusPlusSeeds(const FeatureMatrix& data, std::size_t k,
                         std::mt19937_64& rng) {
  const std::size_t n = data.rows();
  RealMatrix c(k, data.cols());
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto place = [&](std::size_t slot, std::size_t point) {
    const auto x = data.row(point);
    std::copy(x.begin(), x.end(), c.row(slot).begin());
  };
  place(0, pick(rng));
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = SquaredDistance(data.row(i), c.row(0));
  for (std::size_t slot = 1; slot < k; ++slot) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t chosen = 0;
    if (total > 0.0) {
      const double target = unit(rng) * total;
      double acc = 0.0;
      chosen = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > target && d2[i] > 0.0) {
          chosen = i;
          break;
        }
      }
      // Rounding can push the scan past the last positive weight.
      while (d2[chosen] == 0.0 && chosen > 0) --chosen;
    } else {
      chosen = pick(rng);
    }
    place(slot, chosen);
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], SquaredDistance(data.row(i), c.row(slot)));
    }
  }
  return c;
}

// Recomputes centroids as cluster means; empty clusters take the point
// farthest from its centroid among clusters that can spare one.
void UpdateCentroids(const FeatureMatrix& data, std::vector<std::uint32_t>& assign,
                     RealMatrix& c) {
  const std::size_t k = c.rows();
  const std::size_t dim = c.cols();
  std::vector<std::size_t> counts(k, 0);
  RealMatrix sums(k, dim, 0.0);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    ++counts[assign[i]];
    auto s = sums.row(assign[i]);
    const auto x = data.row(i);
    for (std::size_t j = 0; j < dim; ++j) s[j] += x[j];
  }
  for (std::size_t cl = 0; cl < k; ++cl) {
    if (counts[cl] == 0) continue;
    for (std::size_t j = 0; j < dim; ++j) {
      c(cl, j) = sums(cl, j) / static_cast<double>(counts[cl]);
    }
  }
  for (std::size_t cl = 0; cl < k; ++cl) {
    if (counts[cl] != 0) continue;
    std::size_t far = data.rows();
    double far_d = -1.0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
      if (counts[assign[i]] < 2) continue;
      const double d = SquaredDistance(data.row(i), c.row(assign[i]));
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    // N >= k guarantees a donor cluster while any cluster is empty.
    --counts[assign[far]];
    assign[far] = static_cast<std::uint32_t>(cl);
    counts[cl] = 1;
    const auto x = data.row(far);
    for (std::size_t j = 0; j < dim; ++j) c(cl, j) = x[j];
  }
}

}  // namespace

Codebook::Codebook(std::size_t groups, std::size_t entries, std::size_t dim,
                   std::vector<double> codewords)
    : groups_(groups), entries_(entries), dim_(dim), codewords_(std::move(codewords)) {
  if (groups_ < 1 || entries_ < 2 || dim_ < 1) {
    throw Error(ErrorCode::kInvalidArgument, "codebook needs G >= 1, V >= 2, d >= 1");
  }
  if (codewords_.size() != groups_ * entries_ * dim_) {
    throw Error(ErrorCode::kShapeMismatch, "codeword count does not match G x V x d");
  }
  for (double v : codewords_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFiniteValue, "codeword not finite");
  }
}

CodebookAssignment CodebookAssign(const Codebook& cb, const Tensor3& logits,
                                  AssignMode mode, double temperature,
                                  std::uint64_t seed) {
  if (mode == AssignMode::kGumbel && !(temperature > 0.0)) {
    throw Error(ErrorCode::kNonPositiveTemperature, "gumbel temperature must be positive");
  }
  if (logits.groups() != cb.groups() || logits.entries() != cb.entries()) {
    throw Error(ErrorCode::kShapeMismatch, "logits do not match codebook G x V");
  }
  const std::size_t steps = logits.steps();
  const std::size_t groups = cb.groups();
  const std::size_t entries = cb.entries();
  CodebookAssignment out{Matrix<std::uint32_t>(steps, groups, 0),
                         Tensor3(steps, groups, entries),
                         RealMatrix(steps, groups * cb.dim(), 0.0)};
  std::mt19937_64 rng(seed);
  std::vector<double> perturbed(entries);
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t g = 0; g < groups; ++g) {
      const auto l = logits.slice(t, g);
      for (double v : l) {
        if (!std::isfinite(v)) throw Error(ErrorCode::kNonFiniteValue, "logit not finite");
      }
      Softmax(l, out.probs.slice(t, g));
      std::size_t idx = 0;
      if (mode == AssignMode::kHard) {
        idx = Argmax(l);
      } else {
        // argmax((l + g) / tau) == argmax(l + g) for tau > 0.
        for (std::size_t v = 0; v < entries; ++v) {
          perturbed[v] = l[v] - std::log(-std::log(OpenUniform(rng)));
        }
        idx = Argmax(perturbed);
      }
      out.indices(t, g) = static_cast<std::uint32_t>(idx);
      const auto w = cb.codeword(g, idx);
      std::copy(w.begin(), w.end(), out.codes.row(t).begin() + g * cb.dim());
    }
  }
  return out;
}

CodeDistribution BatchCodeDistribution(const Tensor3& probs) {
  if (probs.steps() == 0 || probs.groups() == 0 || probs.entries() == 0) {
    throw Error(ErrorCode::kInvalidDistribution, "empty probability tensor");
  }
  RealMatrix p(probs.groups(), probs.entries(), 0.0);
  for (std::size_t t = 0; t < probs.steps(); ++t) {
    for (std::size_t g = 0; g < probs.groups(); ++g) {
      double sum = 0.0;
      for (double v : probs.slice(t, g)) sum += v;
      if (std::abs(sum - 1.0) > kDistributionTolerance) {
        throw Error(ErrorCode::kInvalidDistribution,
                    "probs[" + std::to_string(t) + "][" + std::to_string(g) +
                        "] sums to " + std::to_string(sum));
      }
      for (std::size_t v = 0; v < probs.entries(); ++v) p(g, v) += probs(t, g, v);
    }
  }
  const double inv = 1.0 / static_cast<double>(probs.steps());
  for (double& v : p.values()) v *= inv;
  return CodeDistribution(std::move(p));
}

CodeDistribution HardCodeDistribution(const Matrix<std::uint32_t>& indices,
                                      std::size_t entries) {
  if (indices.rows() == 0 || indices.cols() == 0 || entries == 0) {
    throw Error(ErrorCode::kInvalidDistribution, "empty assignment");
  }
  RealMatrix p(indices.cols(), entries, 0.0);
  for (std::size_t t = 0; t < indices.rows(); ++t) {
    for (std::size_t g = 0; g < indices.cols(); ++g) {
      if (indices(t, g) >= entries) {
        throw Error(ErrorCode::kInvalidDistribution, "index out of range");
      }
      p(g, indices(t, g)) += 1.0;
    }
  }
  const double inv = 1.0 / static_cast<double>(indices.rows());
  for (double& v : p.values()) v *= inv;
  return CodeDistribution(std::move(p));
}

KMeansModel KMeansFit(const FeatureMatrix& data, std::size_t k,
                      std::size_t max_iters, std::uint64_t seed) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (data.rows() < k) {
    throw Error(ErrorCode::kTooFewPoints, std::to_string(data.rows()) +
                                              " points for " + std::to_string(k) +
                                              " clusters");
  }
  std::mt19937_64 rng(seed);
  KMeansModel model;
  model.seed = seed;
  model.centroids = PlusPlusSeeds(data, k, rng);

  auto assign = AssignAll(model.centroids, data);
  model.inertia_history.push_back(Inertia(model.centroids, data, assign));
  for (std::size_t it = 0; it < max_iters; ++it) {
    UpdateCentroids(data, assign, model.centroids);
    ++model.iterations;
    model.inertia_history.push_back(Inertia(model.centroids, data, assign));
    auto next = AssignAll(model.centroids, data);
    if (next == assign) break;
    assign = std::move(next);
  }
  return model;
}

std::uint32_t NearestCentroid(const KMeansModel& model, std::span<const float> x) {
  if (x.size() != model.dim()) {
    throw Error(ErrorCode::kDimMismatch, "frame dim " + std::to_string(x.size()) +
                                             " vs centroid dim " +
                                             std::to_string(model.dim()));
  }
  std::uint32_t best = 0;
  double best_d = SquaredDistance(x, model.centroids.row(0));
  for (std::size_t c = 1; c < model.k(); ++c) {
    const double d = SquaredDistance(x, model.centroids.row(c));
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::uint32_t>(c);
    }
  }
  return best;
}

double KMeansInertia(const KMeansModel& model, const FeatureMatrix& data) {
  double s = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    s += SquaredDistance(data.row(i), model.centroids.row(NearestCentroid(model, data.row(i))));
  }
  return s;
}

void SaveKMeans(const KMeansModel& model, const std::filesystem::path& path) {
  std::vector<float> values(model.centroids.values().begin(),
                            model.centroids.values().end());
  WriteFeatures(FeatureMatrix(model.k(), model.dim(), std::move(values)), path);
  jsonl::Json meta = {{"k", model.k()},
                      {"dim", model.dim()},
                      {"seed", model.seed},
                      {"iters", model.iterations}};
  auto meta_path = path;
  meta_path += ".meta";
  std::ofstream out(meta_path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open " + meta_path.string());
  out << meta.dump() << '\n';
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed for " + meta_path.string());
}

KMeansModel LoadKMeans(const std::filesystem::path& path) {
  const FeatureMatrix c = ReadFeatures(path);
  KMeansModel model;
  model.centroids = RealMatrix(c.rows(), c.cols());
  std::copy(c.values().begin(), c.values().end(), model.centroids.values().begin());
  auto meta_path = path;
  meta_path += ".meta";
  std::error_code ec;
  if (std::filesystem::exists(meta_path, ec)) {
    constexpr auto kBad = ErrorCode::kInvalidArgument;
    bool seen = false;
    jsonl::ForEachRecord(ReadTextFile(meta_path), kBad,
                         [&](const jsonl::Json& rec, std::size_t line) {
                           if (seen) return;
                           seen = true;
                           const auto k = jsonl::RequireNumber(rec, "k", line, kBad);
                           const auto d = jsonl::RequireNumber(rec, "dim", line, kBad);
                           if (static_cast<std::size_t>(k) != c.rows() ||
                               static_cast<std::size_t>(d) != c.cols()) {
                             throw Error(ErrorCode::kShapeMismatch,
                                         "metadata shape disagrees with centroids");
                           }
                           model.seed = rec.value("seed", std::uint64_t{0});
                           model.iterations = rec.value("iters", std::size_t{0});
                         });
  }
  return model;
}

UnitSequence::UnitSequence(std::vector<std::uint32_t> units, std::string id,
                           std::size_t vocab_size)
    : units_(std::move(units)), id_(std::move(id)) {
  if (units_.empty()) {
    throw Error(ErrorCode::kEmptySequence, "unit sequence '" + id_ + "' is empty");
  }
  if (vocab_size > 0) {
    for (auto u : units_) {
      if (u >= vocab_size) {
        throw Error(ErrorCode::kInvalidArgument,
                    "unit " + std::to_string(u) + " outside vocabulary of " +
                        std::to_string(vocab_size));
      }
    }
  }
}

UnitSequence KMeansQuantize(const KMeansModel& model, const FrameSequence& frames) {
  std::vector<std::uint32_t> units;
  units.reserve(frames.length());
  for (std::size_t t = 0; t < frames.length(); ++t) {
    units.push_back(NearestCentroid(model, frames.frames.row(t)));
  }
  return UnitSequence(std::move(units), frames.utterance_id, model.k());
}

std::vector<UnitSequence> ParseUnitSequences(std::string_view text,
                                             std::size_t vocab_size) {
  constexpr auto kBad = ErrorCode::kInvalidArgument;
  std::vector<UnitSequence> out;
  jsonl::ForEachRecord(text, kBad, [&](const jsonl::Json& rec, std::size_t line) {
    auto id = jsonl::RequireString(rec, "utterance_id", line, kBad);
    const auto body = jsonl::RequireString(rec, "units", line, kBad);
    std::vector<std::uint32_t> units;
    const char* p = body.data();
    const char* end = p + body.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      std::uint32_t u = 0;
      auto [next, ec] = std::from_chars(p, end, u);
      if (ec != std::errc() || (next < end && *next != ' ')) {
        throw Error(kBad, "line " + std::to_string(line) + ": bad unit list");
      }
      units.push_back(u);
      p = next;
    }
    out.emplace_back(std::move(units), std::move(id), vocab_size);
  });
  return out;
}

std::vector<UnitSequence> ReadUnitSequences(const std::filesystem::path& path,
                                            std::size_t vocab_size) {
  return ParseUnitSequences(ReadTextFile(path), vocab_size);
}

std::string FormatUnitSequence(const UnitSequence& seq) {
  std::string units;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i) units += ' ';
    units += std::to_string(seq.units()[i]);
  }
  return jsonl::Json{{"utterance_id", seq.utterance_id()}, {"units", units}}.dump();
}

}  // namespace vgs
