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

// Product-codebook assignment and k-means unit discovery.

#ifndef VGSKIT_QUANTIZER_HPP_
#define VGSKIT_QUANTIZER_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "vgskit/featstore.hpp"
#include "vgskit/losses.hpp"
#include "vgskit/matrix.hpp"

namespace vgs {

// G groups of V codewords, each of dimension d.
class Codebook {
 public:
  Codebook(std::size_t groups, std::size_t entries, std::size_t dim,
           std::vector<double> codewords);

  std::size_t groups() const noexcept { return groups_; }
  std::size_t entries() const noexcept { return entries_; }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const double> codeword(std::size_t g, std::size_t v) const {
    return {codewords_.data() + (g * entries_ + v) * dim_, dim_};
  }

 private:
  std::size_t groups_;
  std::size_t entries_;
  std::size_t dim_;
  std::vector<double> codewords_;
};

enum class AssignMode { kHard, kGumbel };

struct CodebookAssignment {
  Matrix<std::uint32_t> indices;  // T x G
  Tensor3 probs;                  // T x G x V, softmax(logits), never noisy
  RealMatrix codes;               // T x (G * d), selected codewords concatenated
};

// Hard mode picks the per-group argmax of the logits; gumbel mode the argmax
// of logits plus Gumbel(0, 1) noise drawn from seed. Ties go to the lowest
// entry index.
CodebookAssignment CodebookAssign(const Codebook& codebook, const Tensor3& logits,
                                  AssignMode mode, double temperature,
                                  std::uint64_t seed);

// Mean over timesteps of the soft assignment probabilities.
CodeDistribution BatchCodeDistribution(const Tensor3& probs);

// Same, estimated from hard assignment counts.
CodeDistribution HardCodeDistribution(const Matrix<std::uint32_t>& indices,
                                      std::size_t entries);

struct KMeansModel {
  RealMatrix centroids;  // k x D
  std::vector<double> inertia_history;
  std::uint64_t seed = 0;
  std::size_t iterations = 0;

  std::size_t k() const noexcept { return centroids.rows(); }
  std::size_t dim() const noexcept { return centroids.cols(); }
};

// k-means++ seeding followed by Lloyd iterations until the assignment stops
// changing or max_iters updates have run. inertia_history[0] is the inertia
// against the seeds; each later entry follows one centroid update and is
// never larger than the one before it.
KMeansModel KMeansFit(const FeatureMatrix& data, std::size_t k,
                      std::size_t max_iters, std::uint64_t seed);

// Nearest centroid by squared Euclidean distance, ties to the lower index.
std::uint32_t NearestCentroid(const KMeansModel& model, std::span<const float> x);

double KMeansInertia(const KMeansModel& model, const FeatureMatrix& data);

// Writes the k x D centroids as FVF1 at path and a one-line JSON record
// {"k", "dim", "seed", "iters"} at path + ".meta".
void SaveKMeans(const KMeansModel& model, const std::filesystem::path& path);
KMeansModel LoadKMeans(const std::filesystem::path& path);

class UnitSequence {
 public:
  UnitSequence(std::vector<std::uint32_t> units, std::string utterance_id,
               std::size_t vocab_size);

  const std::vector<std::uint32_t>& units() const noexcept { return units_; }
  const std::string& utterance_id() const noexcept { return id_; }
  std::size_t size() const noexcept { return units_.size(); }

 private:
  std::vector<std::uint32_t> units_;
  std::string id_;
};

UnitSequence KMeansQuantize(const KMeansModel& model, const FrameSequence& frames);

// Line records {"utterance_id": ..., "units": "3 17 4"}. vocab_size 0 means
// no bound check beyond the 32-bit range.
std::vector<UnitSequence> ParseUnitSequences(std::string_view text,
                                             std::size_t vocab_size = 0);
std::vector<UnitSequence> ReadUnitSequences(const std::filesystem::path& path,
                                            std::size_t vocab_size = 0);
std::string FormatUnitSequence(const UnitSequence& seq);

}  // namespace vgs

#endif  // VGSKIT_QUANTIZER_HPP_
