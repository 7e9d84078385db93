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

// Training objectives of the visually grounded speech model, as pure kernels
// returning the loss together with its analytic gradient:
//
//   * masked, marginalised InfoNCE matching loss on an audio x image score
//     matrix (both retrieval directions),
//   * wav2vec2-style contrastive loss over cosine similarities,
//   * codebook diversity loss (scaled negative entropy),
//   * the weighted combinations of the above.
//
// All sums run left to right in index order so results are reproducible
// regardless of how callers parallelise over batches.

#ifndef VGSKIT_LOSSES_HPP_
#define VGSKIT_LOSSES_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "vgskit/matrix.hpp"

namespace vgs {

enum class ScoreKind { kCoarse, kFine };

// Square matrix, S(i, j) = similarity of audio i and image j.
struct ScoreMatrix {
  RealMatrix values;
  ScoreKind kind = ScoreKind::kCoarse;
};

// kSum adds the per-row terms of each direction. kBatchMean divides each
// direction by the batch size B.
enum class Reduction { kSum, kBatchMean };

struct MatchingLossConfig {
  double delta = 1.0;
  // 0 where caption i matches image j, 1 elsewhere. Same shape as S.
  Matrix<std::uint8_t> mask;
  Reduction reduction = Reduction::kSum;
};

struct LossAndGrad {
  double loss = 0.0;
  RealMatrix grad;
};

// Unreduced per-row terms of each direction; term i of audio_to_image is
// -log(e^{S(i,p)-delta} / (e^{S(i,p)-delta} + sum_j M(i,j) e^{S(i,j)})) with p
// the positive column of row i (column i when M(i,i) = 0, else the first zero
// of the row). image_to_audio is the same on columns.
struct MatchingLossTerms {
  std::vector<double> audio_to_image;
  std::vector<double> image_to_audio;
};

MatchingLossTerms ComputeMatchingLossTerms(const ScoreMatrix& scores,
                                           const MatchingLossConfig& cfg);

// Loss = reduce(audio_to_image) + reduce(image_to_audio), with gradient
// d loss / d S. Max-shifted log-sum-exp throughout.
LossAndGrad MatchingLoss(const ScoreMatrix& scores, const MatchingLossConfig& cfg);

struct W2V2LossInput {
  std::vector<double> context;
  std::vector<double> positive;
  std::vector<std::vector<double>> distractors;
  double kappa = 0.1;
};

struct W2V2LossResult {
  double loss = 0.0;
  std::vector<double> grad_context;
  std::vector<double> grad_positive;
  std::vector<std::vector<double>> grad_distractors;
};

// -log softmax of cos(c, .)/kappa over {positive} + distractors, taken at the
// positive.
W2V2LossResult W2V2ContrastiveLoss(const W2V2LossInput& input);

double CosineSimilarity(std::span<const double> a, std::span<const double> b);

// Per-group averaged code probabilities, G x V. Rows sum to one.
class CodeDistribution {
 public:
  explicit CodeDistribution(RealMatrix p_bar);

  std::size_t groups() const noexcept { return p_.rows(); }
  std::size_t entries() const noexcept { return p_.cols(); }
  const RealMatrix& p_bar() const noexcept { return p_; }

 private:
  RealMatrix p_;
};

inline constexpr double kDistributionTolerance = 1e-6;

// (1/GV) sum_g sum_v p log p, with 0 log 0 = 0. The value lies in
// [-ln(V)/V, 0]: zero for one-hot rows, -ln(V)/V for uniform rows. With
// negate set the sign is flipped. Gradient entries at p = 0 are -inf (+inf
// when negated).
LossAndGrad DiversityLoss(const CodeDistribution& p, bool negate = false);

// Same formula on an arbitrary nonnegative G x V matrix, without the
// row-sum check. Finite differencing needs this: a perturbed entry breaks
// the normalisation.
LossAndGrad DiversityLossKernel(const RealMatrix& p, bool negate = false);

struct LossWeights {
  double coarse = 0.1;
  double fine = 1.0;
  double w2v2 = 1.0;
  double diversity = 0.1;
};

enum class Objective { kFastVgs, kFastVgsPlus };

// kFastVgs: coarse*lc + fine*lf. kFastVgsPlus additionally adds
// w2v2*lw + diversity*ld.
double TotalObjective(double lc, double lf, double lw, double ld,
                      const LossWeights& weights, Objective objective);

// Evaluates f at x and writes the analytic gradient into grad.
using GradientFunction =
    std::function<double(std::span<const double> x, std::span<double> grad)>;

// Max over coordinates of |g_analytic - g_fd| / max(1e-12, |g_fd|), with g_fd
// the fourth-order central difference
//   (8 (f(x+h) - f(x-h)) - (f(x+2h) - f(x-2h))) / 12h,  h = eps.
double FiniteDifferenceCheck(const GradientFunction& f, std::span<const double> x0,
                             double eps);

// Random-instance gradient audit of the three loss kernels.
struct GradientSuiteOptions {
  std::size_t instances = 100;
  std::size_t max_batch = 8;     // matching loss B in [2, max_batch]
  std::size_t max_dim = 16;      // w2v2 vector size in [2, max_dim]
  std::size_t max_distractors = 10;
  std::size_t max_groups = 8;    // diversity G in [1, max_groups]
  std::size_t max_entries = 8;   // diversity V in [2, max_entries]
  double eps = 1e-4;
  std::uint64_t seed = 42;
};

struct GradientSuiteResult {
  double matching_max_error = 0.0;
  double w2v2_max_error = 0.0;
  double diversity_max_error = 0.0;
};

GradientSuiteResult RunGradientSuite(const GradientSuiteOptions& opts);

}  // namespace vgs

#endif  // VGSKIT_LOSSES_HPP_
