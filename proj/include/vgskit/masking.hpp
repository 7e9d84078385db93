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

// Span masks for masked prediction. Each timestep independently starts a
// span with probability p; spans cover span_len frames, truncated at the end
// of the utterance, and overlapping spans merge.
//
// kBatchMinCrop reproduces the batch behaviour of the fairseq masking
// routine: every utterance keeps only as many span starts as the utterance
// with the fewest, so short utterances end up proportionally more masked.

#ifndef VGSKIT_MASKING_HPP_
#define VGSKIT_MASKING_HPP_

#include <cstdint>
#include <span>
#include <vector>

namespace vgs {

enum class MaskMode { kPerUtterance, kBatchMinCrop };

// Defaults follow the wav2vec2.0 recipe.
struct MaskSpec {
  double p = 0.065;
  std::size_t span_len = 10;
  MaskMode mode = MaskMode::kPerUtterance;
  std::uint64_t seed = 42;
};

struct Mask {
  std::vector<std::uint8_t> flags;  // 1 = masked
  std::vector<std::size_t> starts;  // span starts that produced the flags

  std::size_t length() const noexcept { return flags.size(); }
  std::size_t masked_count() const noexcept;
  double masked_fraction() const noexcept;
};

Mask SampleMask(std::size_t length, const MaskSpec& spec);

// Utterance i uses seed spec.seed ^ i.
std::vector<Mask> BatchMasks(std::span<const std::size_t> lengths,
                             const MaskSpec& spec);

// Mean masked fraction of each utterance over seeds spec.seed,
// spec.seed + 1, ..., spec.seed + num_seeds - 1.
std::vector<double> MeanMaskedFraction(std::span<const std::size_t> lengths,
                                       const MaskSpec& spec, std::size_t num_seeds);

// 1 - (1 - p)^span_len, the masked fraction far from the utterance start.
double ExpectedMaskedFraction(const MaskSpec& spec);

}  // namespace vgs

#endif  // VGSKIT_MASKING_HPP_
