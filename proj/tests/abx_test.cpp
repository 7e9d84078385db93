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
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "vgskit/abx.hpp"
#include "vgskit/error.hpp"

namespace vgs {
namespace {

FeatureMatrix Random(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return FeatureMatrix(n, d, testing::GaussianFloats(n * d, rng));
}

double Cos(const FeatureMatrix& x, std::size_t i, const FeatureMatrix& y, std::size_t j) {
  long double dot = 0, nx = 0, ny = 0;
  for (std::size_t k = 0; k < x.cols(); ++k) {
    dot += static_cast<long double>(x(i, k)) * y(j, k);
    nx += static_cast<long double>(x(i, k)) * x(i, k);
    ny += static_cast<long double>(y(j, k)) * y(j, k);
  }
  return static_cast<double>(1 - dot / std::sqrt(nx * ny));
}

// Walks every monotone path from (0,0) to the far corner. Keeps the cheapest
// total, shortest on ties, and returns its mean cost.
double BruteForceDtw(const FeatureMatrix& x, const FeatureMatrix& y) {
  double best_cost = std::numeric_limits<double>::infinity();
  std::size_t best_len = 0;
  const std::size_t n = x.rows(), m = y.rows();
  auto walk = [&](auto&& self, std::size_t i, std::size_t j, double cost, std::size_t len) -> void {
    cost += Cos(x, i, y, j);
    ++len;
    if (i + 1 == n && j + 1 == m) {
      if (cost < best_cost - 1e-12 || (std::abs(cost - best_cost) <= 1e-12 && len < best_len)) {
        best_cost = cost;
        best_len = len;
      }
      return;
    }
    if (i + 1 < n) self(self, i + 1, j, cost, len);
    if (j + 1 < m) self(self, i, j + 1, cost, len);
    if (i + 1 < n && j + 1 < m) self(self, i + 1, j + 1, cost, len);
  };
  walk(walk, 0, 0, 0.0, 0);
  return best_cost / static_cast<double>(best_len);
}

FrameSequence Seq(FeatureMatrix m, std::string id) {
  return FrameSequence(std::move(m), 50.0, std::move(id));
}

TEST(Dtw, IdenticalSequencesAreZero) {
  const auto x = Random(12, 8, 1);
  EXPECT_NEAR(DtwDistance(x, x), 0.0, 1e-12);
  EXPECT_GE(DtwDistance(x, x), 0.0);
}

TEST(Dtw, OrthogonalSingleFrames) {
  EXPECT_DOUBLE_EQ(DtwDistance(FeatureMatrix(1, 2, {1, 0}), FeatureMatrix(1, 2, {0, 1})), 1.0);
}

TEST(Dtw, MatchesExhaustivePathEnumeration) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto x = Random(4, 6, 100 + seed), y = Random(5, 6, 200 + seed);
    EXPECT_NEAR(DtwDistance(x, y), BruteForceDtw(x, y), 1e-9) << "seed " << seed;
  }
  // Uneven shapes too.
  const auto a = Random(1, 3, 7), b = Random(6, 3, 8), c = Random(3, 3, 9);
  EXPECT_NEAR(DtwDistance(a, b), BruteForceDtw(a, b), 1e-9);
  EXPECT_NEAR(DtwDistance(b, c), BruteForceDtw(b, c), 1e-9);
}

TEST(Dtw, Symmetric) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto x = Random(7, 5, seed), y = Random(11, 5, seed + 50);
    EXPECT_NEAR(DtwDistance(x, y), DtwDistance(y, x), 1e-12);
  }
}

TEST(Dtw, InvariantToPositiveFrameScaling) {
  const auto x = Random(6, 4, 10), y = Random(9, 4, 11);
  std::vector<float> scaled(x.values().begin(), x.values().end());
  for (std::size_t r = 0; r < 6; ++r)
    for (std::size_t k = 0; k < 4; ++k) scaled[r * 4 + k] *= static_cast<float>(r + 1) * 3.0f;
  EXPECT_NEAR(DtwDistance(FeatureMatrix(6, 4, scaled), y), DtwDistance(x, y), 1e-6);
}

TEST(Dtw, TemporalUpsamplingOfIdenticalPair) {
  const auto x = Random(10, 6, 12);
  std::vector<float> doubled;
  for (std::size_t r = 0; r < 10; ++r)
    for (int rep = 0; rep < 2; ++rep) doubled.insert(doubled.end(), x.row(r).begin(), x.row(r).end());
  EXPECT_LE(std::abs(DtwDistance(FeatureMatrix(20, 6, doubled), x) - DtwDistance(x, x)), 1e-6);
}

TEST(Dtw, Errors) {
  try {
    DtwDistance(Random(2, 3, 1), Random(2, 4, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimMismatch);
  }
  try {
    DtwDistance(FeatureMatrix(2, 2, {1, 0, 0, 0}), Random(2, 2, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroNormFrame);
  }
}

TEST(AbxScore, TieIsHalf) {
  EXPECT_EQ(AbxTripleScore(0.1, 0.2), 0.0);
  EXPECT_EQ(AbxTripleScore(0.3, 0.2), 1.0);
  EXPECT_EQ(AbxTripleScore(0.2, 0.2), 0.5);
}

// Category c tokens are a constant vector e_c repeated for 2 + token frames.
FeatureStore ConstantCategories(std::size_t categories, std::size_t tokens, std::size_t dim) {
  FeatureStore store;
  for (std::size_t c = 0; c < categories; ++c) {
    for (std::size_t t = 0; t < tokens; ++t) {
      const std::size_t len = 2 + t;
      std::vector<float> v(len * dim, 0.0f);
      for (std::size_t r = 0; r < len; ++r) {
        v[r * dim + c] = 1.0f;
        v[r * dim + (c + 1) % dim] = 0.5f;
      }
      const std::string id = "c" + std::to_string(c) + "t" + std::to_string(t);
      store.emplace(id, Seq(FeatureMatrix(len, dim, v), id));
    }
  }
  return store;
}

std::vector<AbxTriplet> CategoryTriplets(std::size_t categories, std::size_t tokens) {
  std::vector<AbxTriplet> out;
  auto id = [](std::size_t c, std::size_t t) {
    return "c" + std::to_string(c) + "t" + std::to_string(t);
  };
  for (std::size_t ca = 0; ca < categories; ++ca)
    for (std::size_t cb = 0; cb < categories; ++cb) {
      if (ca == cb) continue;
      for (std::size_t t = 0; t + 1 < tokens; ++t) {
        out.push_back({id(ca, t), id(cb, t), id(ca, t + 1), ca < 2 ? "within" : "across"});
      }
    }
  return out;
}

TEST(AbxError, IdenticalCategoryMembersGiveZero) {
  const auto store = ConstantCategories(4, 5, 6);
  const auto triplets = CategoryTriplets(4, 5);
  const auto report = AbxError(triplets, store);
  EXPECT_EQ(report.overall, 0.0);
  ASSERT_EQ(report.groups.size(), 2u);
  EXPECT_EQ(report.groups[0].group_key, "across");
  EXPECT_EQ(report.groups[1].group_key, "within");
  for (const auto& g : report.groups) EXPECT_EQ(g.error, 0.0);
  EXPECT_EQ(report.triples, triplets.size());
}

TEST(AbxError, SwappedPairsGiveOne) {
  const auto store = ConstantCategories(4, 5, 6);
  auto triplets = CategoryTriplets(4, 5);
  for (auto& t : triplets) std::swap(t.a_id, t.b_id);
  EXPECT_EQ(AbxError(triplets, store).overall, 1.0);
}

TEST(AbxError, UnweightedAndWeightedAggregation) {
  const auto store = ConstantCategories(3, 3, 4);
  // Group "g1": one correct triple. Group "g2": one correct, two swapped.
  const std::vector<AbxTriplet> t = {
      {"c0t0", "c1t0", "c0t1", "g1"},
      {"c0t0", "c1t0", "c0t1", "g2"},
      {"c1t0", "c0t0", "c0t1", "g2"},
      {"c2t0", "c0t0", "c0t2", "g2"},
  };
  const auto u = AbxError(t, store, AbxAggregation::kUnweighted);
  EXPECT_DOUBLE_EQ(u.groups[1].error, 2.0 / 3.0);
  EXPECT_EQ(u.groups[1].triples, 3u);
  EXPECT_DOUBLE_EQ(u.overall, (0.0 + 2.0 / 3.0) / 2.0);
  EXPECT_DOUBLE_EQ(AbxError(t, store, AbxAggregation::kWeighted).overall, 0.5);
}

TEST(AbxError, OrderAndThreadsDoNotMatter) {
  const auto task = MakeSyntheticAbxTask({.num_triplets = 300, .seed = 5});
  auto shuffled = task.triplets;
  std::mt19937_64 rng(1);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto a = AbxError(task.triplets, task.features);
  const auto b = AbxError(shuffled, task.features, AbxAggregation::kUnweighted, 4);
  EXPECT_DOUBLE_EQ(a.overall, b.overall);
  ASSERT_EQ(a.groups.size(), b.groups.size());
  for (std::size_t i = 0; i < a.groups.size(); ++i) EXPECT_DOUBLE_EQ(a.groups[i].error, b.groups[i].error);
}

TEST(AbxError, SyntheticCategoriesAreSeparable) {
  const auto task = MakeSyntheticAbxTask({});
  const auto report = AbxError(task.triplets, task.features);
  EXPECT_LT(report.overall, 0.05);
  for (const auto& g : report.groups) {
    EXPECT_GE(g.error, 0.0);
    EXPECT_LE(g.error, 1.0);
  }
}

TEST(AbxError, IidFeaturesNearChance) {
  const auto task = MakeSyntheticAbxTask(
      {.tokens_per_category = 500, .num_triplets = 2000, .seed = 7, .iid = true});
  const auto report = AbxError(task.triplets, task.features, AbxAggregation::kWeighted, 2);
  EXPECT_EQ(report.triples, 2000u);
  EXPECT_NEAR(report.overall, 0.5, 0.03);
}

TEST(AbxError, MissingFeature) {
  const auto store = ConstantCategories(2, 2, 3);
  const std::vector<AbxTriplet> t = {{"c0t0", "nope", "c0t1", "g"}};
  try {
    AbxError(t, store);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingFeature);
  }
}

TEST(Triplets, ParseAndReject) {
  const auto t = ParseTriplets(R"({"a_id":"a","b_id":"b","x_id":"x","group_key":"within"})");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].x_id, "x");
  EXPECT_THROW(ParseTriplets(R"({"a_id":"a","b_id":"b","x_id":"x","group_key":""})"), Error);
  EXPECT_THROW(ParseTriplets(R"({"a_id":"a","b_id":"b","group_key":"g"})"), Error);
}

}  // namespace
}  // namespace vgs
