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

// Semantic similarity evaluation: utterances are pooled over time, compared
// by cosine, and the model similarities are rank-correlated with human
// judgments. Scores are Spearman's rho x 100.

#ifndef VGSKIT_SEMEVAL_HPP_
#define VGSKIT_SEMEVAL_HPP_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vgskit/featstore.hpp"

namespace vgs {

enum class PoolMode { kMean, kMax };

struct PooledVector {
  std::vector<double> values;
  PoolMode mode = PoolMode::kMean;
};

// Coordinate-wise mean or max over frames.
PooledVector Pool(const FeatureMatrix& frames, PoolMode mode);
PooledVector Pool(const FrameSequence& frames, PoolMode mode);

// Cosine similarity; ZeroVector when either side is all zeros.
double ModelSimilarity(const PooledVector& a, const PooledVector& b);

// 1-based ranks, tied values share the average of their positions.
std::vector<double> AverageRanks(std::span<const double> xs);

// Pearson correlation of the average-rank vectors.
double Spearman(std::span<const double> xs, std::span<const double> ys);

struct Judgment {
  std::string id_1;
  std::string id_2;
  double human_score = 0.0;
};

// Line records {"id_1", "id_2", "human_score"}; a pair may appear once in
// either orientation.
std::vector<Judgment> ParseJudgments(std::string_view text);
std::vector<Judgment> ReadJudgments(const std::filesystem::path& path);

double SemanticScore(std::span<const Judgment> judgments, const FeatureStore& features,
                     PoolMode mode, std::size_t threads = 1);

}  // namespace vgs

#endif  // VGSKIT_SEMEVAL_HPP_
