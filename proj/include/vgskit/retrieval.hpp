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

// Coarse-to-fine retrieval.
//
// The coarse pass scores every target with a dot product and keeps the Kc
// best; only those Kc candidates are handed to the (expensive) fine scorer,
// whose scores decide the final top-N. With Kc equal to the number of
// targets this is exactly exhaustive fine ranking.

#ifndef VGSKIT_RETRIEVAL_HPP_
#define VGSKIT_RETRIEVAL_HPP_

#include <atomic>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "vgskit/featstore.hpp"
#include "vgskit/matrix.hpp"

namespace vgs {

// S(i, j) = <query_i, target_j>.
RealMatrix CoarseScores(const FeatureMatrix& queries, const FeatureMatrix& targets);

// Indices of the k largest scores, best first, ties to the lower index.
// Returns every index when k >= scores.size().
std::vector<std::size_t> TopK(std::span<const double> scores, std::size_t k);

class FineScorer {
 public:
  virtual ~FineScorer() = default;

  double Score(std::size_t query, std::size_t candidate) {
    calls_.fetch_add(1, std::memory_order_relaxed);
    return DoScore(query, candidate);
  }
  std::uint64_t call_count() const noexcept {
    return calls_.load(std::memory_order_relaxed);
  }
  void reset_call_count() noexcept { calls_.store(0); }

  // Serial-only scorers are never called from more than one thread.
  virtual bool concurrent_safe() const { return true; }

 protected:
  virtual double DoScore(std::size_t query, std::size_t candidate) = 0;

 private:
  std::atomic<std::uint64_t> calls_{0};
};

// Precomputed queries x targets table of fine scores.
class TableFineScorer final : public FineScorer {
 public:
  explicit TableFineScorer(RealMatrix table);
  const RealMatrix& table() const noexcept { return table_; }

 protected:
  double DoScore(std::size_t query, std::size_t candidate) override;

 private:
  RealMatrix table_;
};

// Wraps an arbitrary callable, e.g. an adapter to an external model.
class CallbackFineScorer final : public FineScorer {
 public:
  using Fn = std::function<double(std::size_t query, std::size_t candidate)>;
  CallbackFineScorer(Fn fn, bool concurrent_safe)
      : fn_(std::move(fn)), concurrent_(concurrent_safe) {}
  bool concurrent_safe() const override { return concurrent_; }

 protected:
  double DoScore(std::size_t query, std::size_t candidate) override {
    return fn_(query, candidate);
  }

 private:
  Fn fn_;
  bool concurrent_;
};

struct RankedList {
  std::size_t query = 0;
  std::vector<std::size_t> candidates;  // best first
  std::vector<double> scores;           // non-increasing
};

// Coarse top-Kc per query, then the Kc fine scores pick the top N. The fine
// scorer is called exactly queries x min(Kc, targets) times. threads = 0 uses
// the hardware concurrency.
std::vector<RankedList> CtfRetrieve(const FeatureMatrix& queries,
                                    const FeatureMatrix& targets, FineScorer& fine,
                                    std::size_t kc, std::size_t n,
                                    std::size_t threads = 1);

// Ranks every column of each row, keeping the top n.
std::vector<RankedList> RankAll(const RealMatrix& scores, std::size_t n);

enum class RetrievalDirection { kSpeechToImage, kImageToSpeech };

// Fraction of queries with a ground-truth match among their first n
// candidates. Speech-to-image queries are caption indices and candidates image
// indices; image-to-speech is the reverse, where any of an image's captions
// counts as a match.
double RecallAtN(std::span<const RankedList> ranked, const PairManifest& manifest,
                 std::size_t n, RetrievalDirection direction);

}  // namespace vgs

#endif  // VGSKIT_RETRIEVAL_HPP_
