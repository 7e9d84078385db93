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

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "vgskit/error.hpp"
#include "vgskit/losses.hpp"

namespace vgs {
namespace {

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

Matrix<std::uint8_t> OffDiagonalMask(std::size_t b) {
  Matrix<std::uint8_t> m(b, b, 1);
  for (std::size_t i = 0; i < b; ++i) m(i, i) = 0;
  return m;
}

RealMatrix RandomScores(std::size_t b, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  RealMatrix s(b, b);
  for (auto& v : s.values()) v = g(rng);
  return s;
}

// Direct evaluation of both directions in long double, without any shift.
long double NaiveMatching(const RealMatrix& s, const Matrix<std::uint8_t>& m, double delta) {
  const std::size_t b = s.rows();
  long double total = 0;
  for (std::size_t i = 0; i < b; ++i) {
    const long double num = std::exp(static_cast<long double>(s(i, i)) - delta);
    long double den = num;
    for (std::size_t j = 0; j < b; ++j) den += m(i, j) * std::exp(static_cast<long double>(s(i, j)));
    total -= std::log(num / den);
  }
  for (std::size_t j = 0; j < b; ++j) {
    const long double num = std::exp(static_cast<long double>(s(j, j)) - delta);
    long double den = num;
    for (std::size_t i = 0; i < b; ++i) den += m(i, j) * std::exp(static_cast<long double>(s(i, j)));
    total -= std::log(num / den);
  }
  return total;
}

TEST(MatchingLoss, TwoByTwoWorkedExample) {
  MatchingLossConfig cfg;
  cfg.delta = 0.0;
  cfg.mask = OffDiagonalMask(2);
  const ScoreMatrix s{RealMatrix(2, 2, std::vector<double>{2, 0, 0, 2})};
  const double term = std::log1p(std::exp(-2.0));
  EXPECT_NEAR(MatchingLoss(s, cfg).loss, 4.0 * term, 1e-12);
  cfg.reduction = Reduction::kBatchMean;
  EXPECT_NEAR(MatchingLoss(s, cfg).loss, 2.0 * term, 1e-12);
}

TEST(MatchingLoss, SingleItemBatchIsZero) {
  MatchingLossConfig cfg;
  cfg.delta = 0.0;
  cfg.mask = Matrix<std::uint8_t>(1, 1, 0);
  const auto r = MatchingLoss({RealMatrix(1, 1, 3.7)}, cfg);
  EXPECT_EQ(r.loss, 0.0);
  EXPECT_EQ(r.grad(0, 0), 0.0);
}

TEST(MatchingLoss, MatchesNaiveFormula) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> delta(0.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t b = 2 + trial % 7;
    MatchingLossConfig cfg;
    cfg.delta = delta(rng);
    cfg.mask = OffDiagonalMask(b);
    const auto s = RandomScores(b, rng, 3.0);
    const double expected = static_cast<double>(NaiveMatching(s, cfg.mask, cfg.delta));
    EXPECT_NEAR(MatchingLoss({s}, cfg).loss, expected, 1e-10 * std::max(1.0, expected));
  }
}

TEST(MatchingLoss, NoOverflowAtLargeScores) {
  MatchingLossConfig cfg;
  cfg.mask = OffDiagonalMask(3);
  const ScoreMatrix s{RealMatrix(3, 3, std::vector<double>{80, -80, 80, -80, 80, 80, 80, -80, -80})};
  const auto r = MatchingLoss(s, cfg);
  EXPECT_TRUE(std::isfinite(r.loss));
  for (double g : r.grad.values()) EXPECT_TRUE(std::isfinite(g));
}

TEST(MatchingLoss, RowShiftInvariance) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> shift(-20.0, 20.0);
  MatchingLossConfig cfg;
  cfg.mask = OffDiagonalMask(5);
  for (int trial = 0; trial < 50; ++trial) {
    auto s = RandomScores(5, rng);
    const auto before = ComputeMatchingLossTerms({s}, cfg);
    const std::size_t row = trial % 5;
    const double c = shift(rng);
    for (auto& v : s.row(row)) v += c;
    const auto after = ComputeMatchingLossTerms({s}, cfg);
    EXPECT_NEAR(before.audio_to_image[row], after.audio_to_image[row], 1e-10);

    auto t = RandomScores(5, rng);
    const auto tb = ComputeMatchingLossTerms({t}, cfg);
    for (std::size_t i = 0; i < 5; ++i) t(i, row) += c;
    EXPECT_NEAR(tb.image_to_audio[row], ComputeMatchingLossTerms({t}, cfg).image_to_audio[row],
                1e-10);
  }
}

TEST(MatchingLoss, MaskedEntriesDoNotMatter) {
  std::mt19937_64 rng(9);
  // Captions 0 and 1 share an image, so S(0,1) is masked out of row 0.
  MatchingLossConfig cfg;
  cfg.mask = Matrix<std::uint8_t>(3, 3, std::vector<std::uint8_t>{0, 0, 1, 0, 0, 1, 1, 1, 0});
  auto s = RandomScores(3, rng);
  const double before = ComputeMatchingLossTerms({s}, cfg).audio_to_image[0];
  s(0, 1) += 5.0;
  EXPECT_DOUBLE_EQ(ComputeMatchingLossTerms({s}, cfg).audio_to_image[0], before);
}

TEST(MatchingLoss, MarginIncreasesLoss) {
  std::mt19937_64 rng(10);
  MatchingLossConfig cfg;
  cfg.mask = OffDiagonalMask(4);
  const auto s = RandomScores(4, rng);
  double prev = -1.0;
  for (double d : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    cfg.delta = d;
    const double l = MatchingLoss({s}, cfg).loss;
    EXPECT_GT(l, prev);
    prev = l;
  }
}

TEST(MatchingLoss, SymmetricInputsGiveEqualDirections) {
  std::mt19937_64 rng(12);
  MatchingLossConfig cfg;
  cfg.mask = OffDiagonalMask(6);
  auto s = RandomScores(6, rng);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < i; ++j) s(i, j) = s(j, i);
  }
  const auto t = ComputeMatchingLossTerms({s}, cfg);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_NEAR(t.audio_to_image[i], t.image_to_audio[i], 1e-12);
  }
}

TEST(MatchingLoss, PositiveFollowsMask) {
  // Caption 0's image is column 1.
  MatchingLossConfig cfg;
  cfg.delta = 0.0;
  cfg.mask = Matrix<std::uint8_t>(2, 2, std::vector<std::uint8_t>{1, 0, 0, 1});
  const ScoreMatrix s{RealMatrix(2, 2, std::vector<double>{0, 2, 2, 0})};
  EXPECT_NEAR(MatchingLoss(s, cfg).loss, 4.0 * std::log1p(std::exp(-2.0)), 1e-12);
}

TEST(MatchingLoss, Errors) {
  MatchingLossConfig cfg;
  cfg.mask = OffDiagonalMask(2);
  EXPECT_EQ(CodeOf([&] { MatchingLoss({RealMatrix(2, 3)}, cfg); }), ErrorCode::kShapeMismatch);
  EXPECT_EQ(CodeOf([&] { MatchingLoss({RealMatrix(3, 3)}, cfg); }), ErrorCode::kShapeMismatch);
  cfg.mask = Matrix<std::uint8_t>(2, 2, 1);
  EXPECT_EQ(CodeOf([&] { MatchingLoss({RealMatrix(2, 2)}, cfg); }), ErrorCode::kMaskRowAllOnes);
}

TEST(MatchingLoss, GradientAgainstFiniteDifferences) {
  std::mt19937_64 rng(13);
  for (auto reduction : {Reduction::kSum, Reduction::kBatchMean}) {
    MatchingLossConfig cfg;
    cfg.mask = OffDiagonalMask(4);
    cfg.reduction = reduction;
    const auto s0 = RandomScores(4, rng);
    auto f = [&](std::span<const double> x, std::span<double> grad) {
      const auto r = MatchingLoss({RealMatrix(4, 4, std::vector<double>(x.begin(), x.end()))}, cfg);
      std::copy(r.grad.values().begin(), r.grad.values().end(), grad.begin());
      return r.loss;
    };
    EXPECT_LT(FiniteDifferenceCheck(f, s0.values(), 1e-4), 1e-6);
  }
}

TEST(FiniteDifference, QuadraticIsExact) {
  auto f = [](std::span<const double> x, std::span<double> g) {
    g[0] = 2.0 * x[0];
    return x[0] * x[0];
  };
  const std::vector<double> x0 = {3.0};
  EXPECT_LT(FiniteDifferenceCheck(f, x0, 1e-5), 1e-8);
}

TEST(FiniteDifference, DetectsWrongGradient) {
  auto f = [](std::span<const double> x, std::span<double> g) {
    g[0] = 3.0 * x[0];
    return x[0] * x[0];
  };
  const std::vector<double> x0 = {1.0};
  EXPECT_NEAR(FiniteDifferenceCheck(f, x0, 1e-5), 0.5, 1e-6);
}

TEST(FiniteDifference, NonFiniteEvaluation) {
  auto f = [](std::span<const double> x, std::span<double> g) {
    g[0] = 1.0;
    return x[0] > 0.0 ? std::log(x[0]) : std::nan("");
  };
  const std::vector<double> x0 = {1e-6};
  EXPECT_EQ(CodeOf([&] { FiniteDifferenceCheck(f, x0, 1e-5); }),
            ErrorCode::kNonFiniteEvaluation);
}

std::vector<double> RandomVector(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<double> v(d);
  for (auto& x : v) x = g(rng);
  return v;
}

TEST(W2V2Loss, NoDistractorsIsZero) {
  std::mt19937_64 rng(1);
  W2V2LossInput in{RandomVector(5, rng), RandomVector(5, rng), {}, 0.1};
  const auto r = W2V2ContrastiveLoss(in);
  EXPECT_EQ(r.loss, 0.0);
  for (double g : r.grad_context) EXPECT_EQ(g, 0.0);
}

TEST(W2V2Loss, OrthogonalDistractorExample) {
  W2V2LossInput in{{1, 0}, {2, 0}, {{0, 3}}, 0.1};
  EXPECT_NEAR(W2V2ContrastiveLoss(in).loss, std::log1p(std::exp(-10.0)), 1e-15);
  EXPECT_NEAR(W2V2ContrastiveLoss(in).loss, 4.54e-5, 1e-7);
}

TEST(W2V2Loss, MatchesNaiveSoftmax) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 2 + trial % 10, k = 1 + trial % 6;
    W2V2LossInput in{RandomVector(d, rng), RandomVector(d, rng), {}, 0.1 + 0.01 * trial};
    for (std::size_t j = 0; j < k; ++j) in.distractors.push_back(RandomVector(d, rng));
    auto cosine = [](const std::vector<double>& a, const std::vector<double>& b) {
      long double ab = 0, aa = 0, bb = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
      }
      return ab / std::sqrt(aa * bb);
    };
    long double den = std::exp(cosine(in.context, in.positive) / in.kappa);
    const long double num = den;
    for (const auto& q : in.distractors) den += std::exp(cosine(in.context, q) / in.kappa);
    EXPECT_NEAR(W2V2ContrastiveLoss(in).loss, static_cast<double>(-std::log(num / den)), 1e-12);
  }
}

TEST(W2V2Loss, ScaleInvariantAndContextGradientOrthogonal) {
  std::mt19937_64 rng(3);
  W2V2LossInput in{RandomVector(8, rng), RandomVector(8, rng), {}, 0.3};
  for (int j = 0; j < 5; ++j) in.distractors.push_back(RandomVector(8, rng));
  const auto r = W2V2ContrastiveLoss(in);
  auto scaled = in;
  for (auto& x : scaled.context) x *= 7.0;
  EXPECT_NEAR(W2V2ContrastiveLoss(scaled).loss, r.loss, 1e-12);
  double dot = 0.0;
  for (std::size_t i = 0; i < 8; ++i) dot += r.grad_context[i] * in.context[i];
  EXPECT_NEAR(dot, 0.0, 1e-12);
}

TEST(W2V2Loss, GradientAgainstFiniteDifferences) {
  std::mt19937_64 rng(4);
  const std::size_t d = 8, k = 5;
  std::vector<double> x0 = RandomVector((k + 2) * d, rng);
  auto f = [&](std::span<const double> x, std::span<double> grad) {
    W2V2LossInput in;
    in.kappa = 0.5;
    in.context.assign(x.begin(), x.begin() + d);
    in.positive.assign(x.begin() + d, x.begin() + 2 * d);
    for (std::size_t j = 0; j < k; ++j) {
      in.distractors.emplace_back(x.begin() + (2 + j) * d, x.begin() + (3 + j) * d);
    }
    const auto r = W2V2ContrastiveLoss(in);
    auto it = std::copy(r.grad_context.begin(), r.grad_context.end(), grad.begin());
    it = std::copy(r.grad_positive.begin(), r.grad_positive.end(), it);
    for (const auto& g : r.grad_distractors) it = std::copy(g.begin(), g.end(), it);
    return r.loss;
  };
  EXPECT_LT(FiniteDifferenceCheck(f, x0, 1e-4), 1e-5);
}

TEST(W2V2Loss, Errors) {
  EXPECT_EQ(CodeOf([] { W2V2ContrastiveLoss({{0, 0}, {1, 0}, {}, 0.1}); }),
            ErrorCode::kZeroVector);
  EXPECT_EQ(CodeOf([] { W2V2ContrastiveLoss({{1, 0}, {1, 0}, {{0, 0}}, 0.1}); }),
            ErrorCode::kZeroVector);
  EXPECT_EQ(CodeOf([] { W2V2ContrastiveLoss({{1, 0}, {1, 0}, {}, 0.0}); }),
            ErrorCode::kNonPositiveTemperature);
  EXPECT_EQ(CodeOf([] { W2V2ContrastiveLoss({{1, 0}, {1, 0}, {}, -1.0}); }),
            ErrorCode::kNonPositiveTemperature);
  EXPECT_EQ(CodeOf([] { W2V2ContrastiveLoss({{1, 0}, {1, 0, 0}, {}, 0.1}); }),
            ErrorCode::kShapeMismatch);
}

TEST(DiversityLoss, OneHotRowsAreZero) {
  RealMatrix p(3, 4, 0.0);
  p(0, 1) = p(1, 0) = p(2, 3) = 1.0;
  EXPECT_EQ(DiversityLoss(CodeDistribution(p)).loss, 0.0);
}

TEST(DiversityLoss, UniformRowsHitLowerBound) {
  for (std::size_t v : {2, 4, 8, 320}) {
    const RealMatrix p(2, v, 1.0 / static_cast<double>(v));
    const double expected = -std::log(static_cast<double>(v)) / static_cast<double>(v);
    EXPECT_NEAR(DiversityLoss(CodeDistribution(p)).loss, expected, 1e-12) << "V=" << v;
  }
  EXPECT_NEAR(DiversityLoss(CodeDistribution(RealMatrix(2, 4, 0.25))).loss, -0.34657, 1e-5);
}

TEST(DiversityLoss, RandomRowsStayWithinBounds) {
  std::mt19937_64 rng(6);
  std::exponential_distribution<double> e(1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t g = 1 + trial % 5, v = 2 + trial % 9;
    RealMatrix p(g, v);
    for (std::size_t r = 0; r < g; ++r) {
      double z = 0.0;
      for (auto& x : p.row(r)) z += (x = e(rng));
      for (auto& x : p.row(r)) x /= z;
    }
    const double l = DiversityLoss(CodeDistribution(p)).loss;
    EXPECT_LE(l, 0.0);
    EXPECT_GE(l, -std::log(static_cast<double>(v)) / static_cast<double>(v) - 1e-15);
    EXPECT_DOUBLE_EQ(DiversityLoss(CodeDistribution(p), true).loss, -l);
  }
}

TEST(DiversityLoss, GradientMatchesClosedForm) {
  RealMatrix p(1, 3, std::vector<double>{0.5, 0.5, 0.0});
  const auto r = DiversityLoss(CodeDistribution(p));
  EXPECT_NEAR(r.grad(0, 0), (std::log(0.5) + 1.0) / 3.0, 1e-15);
  EXPECT_TRUE(std::isinf(r.grad(0, 2)) && r.grad(0, 2) < 0);
}

TEST(DiversityLoss, GradientAgainstFiniteDifferences) {
  const std::vector<double> x0 = {0.1, 0.2, 0.3, 0.4, 0.7, 0.1, 0.1, 0.1};
  auto f = [](std::span<const double> x, std::span<double> grad) {
    const auto r = DiversityLossKernel(RealMatrix(2, 4, std::vector<double>(x.begin(), x.end())));
    std::copy(r.grad.values().begin(), r.grad.values().end(), grad.begin());
    return r.loss;
  };
  EXPECT_LT(FiniteDifferenceCheck(f, x0, 1e-5), 1e-5);
}

TEST(CodeDistribution, RejectsInvalidRows) {
  EXPECT_EQ(CodeOf([] { CodeDistribution(RealMatrix(1, 2, std::vector<double>{0.5, 0.6})); }),
            ErrorCode::kInvalidDistribution);
  EXPECT_EQ(CodeOf([] { CodeDistribution(RealMatrix(1, 2, std::vector<double>{1.5, -0.5})); }),
            ErrorCode::kInvalidDistribution);
  EXPECT_EQ(CodeOf([] { CodeDistribution{RealMatrix{}}; }), ErrorCode::kInvalidDistribution);
  EXPECT_NO_THROW(CodeDistribution(RealMatrix(1, 2, std::vector<double>{0.5, 0.5 + 5e-7})));
}

TEST(TotalObjective, PaperWeights) {
  const LossWeights w;
  EXPECT_DOUBLE_EQ(TotalObjective(1, 1, 1, 1, w, Objective::kFastVgsPlus), 2.2);
  EXPECT_DOUBLE_EQ(TotalObjective(1, 1, 1, 1, w, Objective::kFastVgs), 1.1);
  EXPECT_EQ(TotalObjective(3, 4, 5, 6, {0, 0, 0, 0}, Objective::kFastVgsPlus), 0.0);
  EXPECT_EQ(TotalObjective(1, 1, 1e9, 7, w, Objective::kFastVgs),
            TotalObjective(1, 1, 0, 0, w, Objective::kFastVgs));
}

TEST(GradientSuite, AllKernelsPass) {
  GradientSuiteOptions opts;
  opts.instances = 30;
  const auto r = RunGradientSuite(opts);
  EXPECT_LT(r.matching_max_error, 1e-5);
  EXPECT_LT(r.w2v2_max_error, 1e-5);
  EXPECT_LT(r.diversity_max_error, 1e-5);
}

TEST(GradientSuite, DeterministicInSeed) {
  GradientSuiteOptions opts;
  opts.instances = 10;
  const auto a = RunGradientSuite(opts);
  const auto b = RunGradientSuite(opts);
  EXPECT_EQ(a.w2v2_max_error, b.w2v2_max_error);
  EXPECT_EQ(a.matching_max_error, b.matching_max_error);
}

}  // namespace
}  // namespace vgs
