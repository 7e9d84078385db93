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

#include "vgskit/masking.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>
#include <random>

#include "vgskit/error.hpp"

namespace vgs {

namespace {

void Validate(const MaskSpec& spec) {
  if (!(spec.p >= 0.0 && spec.p <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "mask probability must lie in [0, 1]");
  }
  if (spec.span_len < 1) throw Error(ErrorCode::kInvalidArgument, "span_len must be >= 1");
}

std::vector<std::size_t> DrawStarts(std::size_t length, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution start(p);
  std::vector<std::size_t> starts;
  for (std::size_t t = 0; t < length; ++t) {
    if (start(rng)) starts.push_back(t);
  }
  return starts;
}

Mask Expand(std::size_t length, std::vector<std::size_t> starts, std::size_t span) {
  Mask m{std::vector<std::uint8_t>(length, 0), std::move(starts)};
  for (std::size_t s : m.starts) {
    const std::size_t end = std::min(length, s + span);
    std::fill(m.flags.begin() + static_cast<std::ptrdiff_t>(s),
              m.flags.begin() + static_cast<std::ptrdiff_t>(end), 1);
  }
  return m;
}

}  // namespace

std::size_t Mask::masked_count() const noexcept {
  return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), 1));
}

double Mask::masked_fraction() const noexcept {
  return flags.empty() ? 0.0
                       : static_cast<double>(masked_count()) /
                             static_cast<double>(flags.size());
}

Mask SampleMask(std::size_t length, const MaskSpec& spec) {
  Validate(spec);
  if (length < 1) throw Error(ErrorCode::kInvalidArgument, "length must be >= 1");
  std::mt19937_64 rng(spec.seed);
  return Expand(length, DrawStarts(length, spec.p, rng), spec.span_len);
}

std::vector<Mask> BatchMasks(std::span<const std::size_t> lengths,
                             const MaskSpec& spec) {
  Validate(spec);
  if (lengths.empty()) throw Error(ErrorCode::kEmptyBatch, "no utterances");
  for (std::size_t t : lengths) {
    if (t < 1) throw Error(ErrorCode::kInvalidArgument, "utterance length must be >= 1");
  }

  std::vector<std::mt19937_64> rngs;
  std::vector<std::vector<std::size_t>> starts;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    rngs.emplace_back(spec.seed ^ static_cast<std::uint64_t>(i));
    starts.push_back(DrawStarts(lengths[i], spec.p, rngs.back()));
  }

  if (spec.mode == MaskMode::kBatchMinCrop) {
    std::size_t min_count = starts.front().size();
    for (const auto& s : starts) min_count = std::min(min_count, s.size());
    for (std::size_t i = 0; i < starts.size(); ++i) {
      if (starts[i].size() == min_count) continue;
      std::vector<std::size_t> kept;
      kept.reserve(min_count);
      std::sample(starts[i].begin(), starts[i].end(), std::back_inserter(kept),
                  min_count, rngs[i]);
      starts[i] = std::move(kept);
    }
  }

  std::vector<Mask> masks;
  masks.reserve(lengths.size());
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    masks.push_back(Expand(lengths[i], std::move(starts[i]), spec.span_len));
  }
  return masks;
}

std::vector<double> MeanMaskedFraction(std::span<const std::size_t> lengths,
                                       const MaskSpec& spec, std::size_t num_seeds) {
  if (num_seeds < 1) throw Error(ErrorCode::kInvalidArgument, "num_seeds must be >= 1");
  std::vector<double> sums(lengths.size(), 0.0);
  MaskSpec s = spec;
  for (std::size_t r = 0; r < num_seeds; ++r) {
    s.seed = spec.seed + r;
    const auto masks = BatchMasks(lengths, s);
    for (std::size_t i = 0; i < masks.size(); ++i) sums[i] += masks[i].masked_fraction();
  }
  for (double& v : sums) v /= static_cast<double>(num_seeds);
  return sums;
}

double ExpectedMaskedFraction(const MaskSpec& spec) {
  return 1.0 - std::pow(1.0 - spec.p, static_cast<double>(spec.span_len));
}

}  // namespace vgs
