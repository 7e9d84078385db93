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

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "vgskit/error.hpp"
#include "vgskit/semeval.hpp"

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

// O(n^2) ranks: 1 + (#smaller) + (#equal - 1) / 2.
std::vector<double> NaiveRanks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (double w : v) {
      less += w < v[i];
      equal += w == v[i];
    }
    r[i] = 1 + less + (equal - 1) / 2;
  }
  return r;
}

double NaivePearson(const std::vector<double>& x, const std::vector<double>& y) {
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= x.size();
  my /= y.size();
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

double NaiveSpearman(const std::vector<double>& x, const std::vector<double>& y) {
  return NaivePearson(NaiveRanks(x), NaiveRanks(y));
}

TEST(Pool, SingleFrameIsItself) {
  const FeatureMatrix f(1, 3, {1.5f, -2.0f, 0.25f});
  for (auto mode : {PoolMode::kMean, PoolMode::kMax}) {
    EXPECT_EQ(Pool(f, mode).values, (std::vector<double>{1.5, -2.0, 0.25}));
  }
}

TEST(Pool, TwoFrames) {
  const FeatureMatrix f(2, 2, {0, 2, 2, 0});
  EXPECT_EQ(Pool(f, PoolMode::kMean).values, (std::vector<double>{1, 1}));
  EXPECT_EQ(Pool(f, PoolMode::kMax).values, (std::vector<double>{2, 2}));
}

TEST(Pool, FrameOrderDuplicationAndDominatedFrames) {
  std::mt19937_64 rng(1);
  const auto v = testing::GaussianFloats(8 * 5, rng);
  const FeatureMatrix f(8, 5, v);
  std::vector<float> reversed, doubled(v), dominated(v);
  for (std::size_t r = 8; r-- > 0;) reversed.insert(reversed.end(), v.begin() + r * 5, v.begin() + r * 5 + 5);
  doubled.insert(doubled.end(), v.begin(), v.end());
  dominated.insert(dominated.end(), 5, -100.0f);
  for (auto mode : {PoolMode::kMean, PoolMode::kMax}) {
    const auto base = Pool(f, mode).values;
    const auto rev = Pool(FeatureMatrix(8, 5, reversed), mode).values;
    for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(rev[k], base[k], 1e-12);
  }
  const auto mean = Pool(f, PoolMode::kMean).values;
  const auto mean2 = Pool(FeatureMatrix(16, 5, doubled), PoolMode::kMean).values;
  for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(mean2[k], mean[k], 1e-12);
  EXPECT_EQ(Pool(FeatureMatrix(9, 5, dominated), PoolMode::kMax).values,
            Pool(f, PoolMode::kMax).values);
}

PooledVector Vec(std::vector<double> v) { return PooledVector{std::move(v), PoolMode::kMean}; }

TEST(ModelSimilarity, Examples) {
  EXPECT_NEAR(ModelSimilarity(Vec({3, -1, 2}), Vec({3, -1, 2})), 1.0, 1e-15);
  EXPECT_NEAR(ModelSimilarity(Vec({1, 0}), Vec({0, 5})), 0.0, 1e-15);
  // 32 / (sqrt(14) * sqrt(77))
  EXPECT_NEAR(ModelSimilarity(Vec({1, 2, 3}), Vec({4, 5, 6})), 0.97463, 5e-6);
  EXPECT_EQ(CodeOf([] { ModelSimilarity(Vec({0, 0}), Vec({1, 1})); }), ErrorCode::kZeroVector);
}

TEST(Spearman, MonotoneExamples) {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  const std::vector<double> up = {0.1, 5, 7, 100, 101};
  const std::vector<double> down = {9, 8, 2, 1, -4};
  EXPECT_NEAR(Spearman(x, up), 1.0, 1e-15);
  EXPECT_NEAR(Spearman(x, down), -1.0, 1e-15);
}

TEST(Spearman, AverageRanksForTies) {
  const std::vector<double> v = {10, 20, 10, 30, 20, 10};
  EXPECT_EQ(AverageRanks(v), (std::vector<double>{2, 4.5, 2, 6, 4.5, 2}));
}

TEST(Spearman, MatchesNaiveOracle) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> small(0, 9);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<double> x(50), y(50);
    for (std::size_t i = 0; i < 50; ++i) {
      x[i] = trial % 2 ? small(rng) : n(rng);
      y[i] = trial % 3 ? 0.3 * x[i] + n(rng) : small(rng);
    }
    EXPECT_NEAR(Spearman(x, y), NaiveSpearman(x, y), 1e-10) << trial;
  }
}

TEST(Spearman, InvariantUnderMonotoneTransforms) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  std::vector<double> x(40), y(40), fx(40), gy(40);
  for (std::size_t i = 0; i < 40; ++i) {
    x[i] = n(rng);
    y[i] = x[i] + n(rng);
    fx[i] = std::exp(x[i]);
    gy[i] = -1.0 / (1.0 + std::exp(-y[i]));
  }
  EXPECT_NEAR(Spearman(fx, gy), -Spearman(x, y), 1e-12);
}

TEST(Spearman, Errors) {
  const std::vector<double> c = {1, 1, 1}, x = {1, 2, 3}, shortv = {1};
  EXPECT_EQ(CodeOf([&] { Spearman(c, x); }), ErrorCode::kDegenerateInput);
  EXPECT_EQ(CodeOf([&] { Spearman(x, c); }), ErrorCode::kDegenerateInput);
  EXPECT_THROW(Spearman(shortv, shortv), Error);
  EXPECT_THROW(Spearman(x, std::vector<double>{1, 2}), Error);
}

struct Fixture {
  FeatureStore store;
  std::vector<Judgment> judgments;
};

// Random utterances plus pairs scored by an independent pool + cosine oracle.
Fixture MakeFixture(std::size_t utterances, std::size_t pairs, PoolMode mode, std::uint64_t seed) {
  Fixture fx;
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> pooled;
  for (std::size_t u = 0; u < utterances; ++u) {
    const std::size_t len = 3 + u % 7, dim = 6;
    const auto v = testing::GaussianFloats(len * dim, rng);
    std::vector<double> p(dim, mode == PoolMode::kMax ? -1e30 : 0.0);
    for (std::size_t t = 0; t < len; ++t)
      for (std::size_t k = 0; k < dim; ++k) {
        if (mode == PoolMode::kMax) p[k] = std::max(p[k], static_cast<double>(v[t * dim + k]));
        else p[k] += v[t * dim + k] / static_cast<double>(len);
      }
    pooled.push_back(p);
    const std::string id = "u" + std::to_string(u);
    fx.store.emplace(id, FrameSequence(FeatureMatrix(len, dim, v), 50.0, id));
  }
  std::uniform_int_distribution<std::size_t> pick(0, utterances - 1);
  std::set<std::pair<std::size_t, std::size_t>> used;
  while (fx.judgments.size() < pairs) {
    auto a = pick(rng), b = pick(rng);
    if (a == b || !used.emplace(std::min(a, b), std::max(a, b)).second) continue;
    double dot = 0, na = 0, nb = 0;
    for (std::size_t k = 0; k < pooled[a].size(); ++k) {
      dot += pooled[a][k] * pooled[b][k];
      na += pooled[a][k] * pooled[a][k];
      nb += pooled[b][k] * pooled[b][k];
    }
    fx.judgments.push_back({"u" + std::to_string(a), "u" + std::to_string(b),
                            dot / std::sqrt(na * nb)});
  }
  return fx;
}

TEST(SemanticScore, PerfectAndNegatedJudgments) {
  for (auto mode : {PoolMode::kMean, PoolMode::kMax}) {
    auto fx = MakeFixture(40, 120, mode, 4);
    EXPECT_NEAR(SemanticScore(fx.judgments, fx.store, mode), 100.0, 1e-9);
    for (auto& j : fx.judgments) j.human_score = -j.human_score;
    EXPECT_NEAR(SemanticScore(fx.judgments, fx.store, mode, 3), -100.0, 1e-9);
  }
}

TEST(SemanticScore, ShuffledJudgmentsBelowPermutationQuantile) {
  auto fx = MakeFixture(80, 200, PoolMode::kMax, 5);
  std::vector<double> model;
  for (const auto& j : fx.judgments) model.push_back(j.human_score);
  std::vector<double> human = model;
  std::mt19937_64 rng(6);
  std::shuffle(human.begin(), human.end(), rng);
  for (std::size_t i = 0; i < human.size(); ++i) fx.judgments[i].human_score = human[i];
  const double score = SemanticScore(fx.judgments, fx.store, PoolMode::kMax);

  // Null distribution of |rho| from fresh permutations.
  std::vector<double> null;
  for (int r = 0; r < 999; ++r) {
    std::shuffle(human.begin(), human.end(), rng);
    null.push_back(std::abs(NaiveSpearman(model, human)));
  }
  std::sort(null.begin(), null.end());
  EXPECT_LT(std::abs(score) / 100.0, null[989]);
}

TEST(SemanticScore, MissingFeature) {
  auto fx = MakeFixture(5, 4, PoolMode::kMean, 7);
  fx.judgments.push_back({"u0", "ghost", 0.5});
  EXPECT_EQ(CodeOf([&] { SemanticScore(fx.judgments, fx.store, PoolMode::kMean); }),
            ErrorCode::kMissingFeature);
}

TEST(Judgments, ParseAndReject) {
  const auto j = ParseJudgments(R"({"id_1":"a","id_2":"b","human_score":3.5}
{"id_1":"a","id_2":"c","human_score":-1})");
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[1].human_score, -1.0);
  EXPECT_THROW(ParseJudgments(R"({"id_1":"a","id_2":"b","human_score":1}
{"id_1":"b","id_2":"a","human_score":2})"),
               Error);
  EXPECT_THROW(ParseJudgments(R"({"id_1":"a","human_score":1})"), Error);
}

TEST(Pool, EmptySequenceRejected) {
  // FeatureMatrix cannot be empty, so the error surfaces at construction.
  EXPECT_THROW(Pool(FeatureMatrix(0, 2, {}), PoolMode::kMean), Error);
}

}  // namespace
}  // namespace vgs
