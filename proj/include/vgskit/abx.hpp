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

// Phonetic ABX discriminability.
//
// For a triple (A, B, X) where X shares A's category, the triple is an error
// when X is closer to B than to A under frame-level DTW. Errors are averaged
// per group key (context / speaker condition) and the overall score is the
// mean over groups.

#ifndef VGSKIT_ABX_HPP_
#define VGSKIT_ABX_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "vgskit/featstore.hpp"

namespace vgs {

// 1 - cos(a, b). Throws ZeroNormFrame when either frame is all zeros.
double CosineDistance(std::span<const float> a, std::span<const float> b);

// DTW over the full lattice with steps (1,0), (0,1), (1,1) and frame cost
// 1 - cos. The optimal path minimises accumulated cost (exact ties go to the
// shorter path); the result is that cost divided by the path length.
double DtwDistance(const FeatureMatrix& x, const FeatureMatrix& y);
double DtwDistance(const FrameSequence& x, const FrameSequence& y);

struct AbxTriplet {
  std::string a_id;
  std::string b_id;
  std::string x_id;
  std::string group_key;
};

// Line records {"a_id", "b_id", "x_id", "group_key"}.
std::vector<AbxTriplet> ParseTriplets(std::string_view text);
std::vector<AbxTriplet> ReadTriplets(const std::filesystem::path& path);

// 0 when d(A,X) < d(B,X), 1 when greater, 0.5 on an exact tie.
double AbxTripleScore(double dist_ax, double dist_bx);

enum class AbxAggregation {
  kUnweighted,  // overall = plain mean of group errors
  kWeighted,    // overall = mean over all triples
};

struct AbxGroupResult {
  std::string group_key;
  double error = 0.0;
  std::size_t triples = 0;
};

struct AbxReport {
  std::vector<AbxGroupResult> groups;  // sorted by group key
  double overall = 0.0;
  std::size_t triples = 0;
};

AbxReport AbxError(std::span<const AbxTriplet> triplets, const FeatureStore& features,
                   AbxAggregation aggregation = AbxAggregation::kUnweighted,
                   std::size_t threads = 1);

// Synthetic categories for exercising the evaluation: every category has a
// random prototype direction, tokens are the prototype plus Gaussian noise of
// the given scale on every frame. Triplets pick A and X from one category, B
// from another; group keys cycle through "within" and "across".
struct SyntheticAbxTask {
  FeatureStore features;
  std::vector<AbxTriplet> triplets;
};

struct SyntheticAbxOptions {
  std::size_t categories = 4;
  std::size_t tokens_per_category = 6;
  std::size_t min_frames = 3;
  std::size_t max_frames = 8;
  std::size_t dim = 16;
  double noise = 0.1;
  std::size_t num_triplets = 200;
  std::uint64_t seed = 42;
  // When set, tokens ignore categories and are iid random unit vectors.
  bool iid = false;
};

SyntheticAbxTask MakeSyntheticAbxTask(const SyntheticAbxOptions& opts);

}  // namespace vgs

#endif  // VGSKIT_ABX_HPP_
