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

// Lexical / syntactic scoring over discrete unit sequences.
//
// A sequence's pseudo-log-probability is the sum of the log-probabilities of
// randomly sampled spans (lengths ~ round(Normal(mean, std)), sampled until
// the spans jointly cover the target fraction of the sequence; spans may
// overlap). Any UnitLM can score the spans; NGramLM is the in-tree model and
// scores a span by left-context chain probability.

#ifndef VGSKIT_UNITLM_HPP_
#define VGSKIT_UNITLM_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <vector>

#include "vgskit/quantizer.hpp"

namespace vgs {

struct SpanSpec {
  double mean = 5.0;
  double std = 5.0;
  double coverage_target = 0.5;
  std::uint64_t seed = 42;
};

struct Span {
  std::size_t start = 0;
  std::size_t len = 0;

  bool operator==(const Span&) const = default;
};

std::vector<Span> SpanSample(std::size_t length, const SpanSpec& spec);

// Fraction of [0, length) covered by the union of the spans.
double UnionCoverage(std::span<const Span> spans, std::size_t length);

class UnitLM {
 public:
  virtual ~UnitLM() = default;
  virtual std::size_t vocab_size() const = 0;
  // log P(units[start .. start+len)) given the rest of the sequence.
  virtual double LogProbSpan(std::span<const std::uint32_t> units, std::size_t start,
                             std::size_t len) const = 0;
};

// Interpolated add-k n-gram model:
//   P(w | h) = sum_m weight[m-1] * (c(h_m, w) + k) / (c(h_m) + k V)
// over orders m = 1..n, where h_m is the last m-1 units of the history
// (left-padded with a begin-of-sequence symbol). Every per-order estimate is a
// proper distribution over the V units, so the mixture is too.
class NGramLM final : public UnitLM {
 public:
  static constexpr std::uint32_t kBos = 0xFFFFFFFFu;

  // weights empty = uniform 1/order.
  static NGramLM Train(std::span<const UnitSequence> corpus, std::size_t order,
                       double add_k, std::size_t vocab_size,
                       std::vector<double> weights = {});

  std::size_t order() const noexcept { return order_; }
  double add_k() const noexcept { return add_k_; }
  std::size_t vocab_size() const override { return vocab_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  // history holds the preceding units, most recent last; only the last
  // order-1 are used and missing positions are padded with kBos.
  double Prob(std::span<const std::uint32_t> history, std::uint32_t unit) const;

  double LogProbSpan(std::span<const std::uint32_t> units, std::size_t start,
                     std::size_t len) const override;

  // Chain-rule log-probability of the whole sequence.
  double SequenceLogProb(std::span<const std::uint32_t> units) const;

  // Full-length (order-1) contexts seen in training, kBos-padded.
  std::vector<std::vector<std::uint32_t>> ObservedContexts() const;

  std::vector<std::uint8_t> Serialize() const;
  static NGramLM Deserialize(std::span<const std::uint8_t> bytes);
  void Save(const std::filesystem::path& path) const;
  static NGramLM Load(const std::filesystem::path& path);

 private:
  struct ContextCounts {
    std::uint64_t total = 0;
    std::map<std::uint32_t, std::uint64_t> next;
  };
  using OrderTable = std::map<std::vector<std::uint32_t>, ContextCounts>;

  NGramLM(std::size_t order, double add_k, std::size_t vocab, std::vector<double> weights);

  std::size_t order_;
  double add_k_;
  std::size_t vocab_;
  std::vector<double> weights_;
  std::vector<OrderTable> tables_;  // tables_[m-1] keyed by contexts of length m-1
};

// Sum of span log-probabilities. With repeats > 1, repetition r samples spans
// with seed spec.seed + r and the mean over repetitions is returned.
double PseudoLogProb(const UnitLM& lm, std::span<const std::uint32_t> units,
                     const SpanSpec& spec, std::size_t repeats = 1);

// Fraction of pairs with pos > neg; ties count one half.
double PairedAccuracy(std::span<const double> pos, std::span<const double> neg);

}  // namespace vgs

#endif  // VGSKIT_UNITLM_HPP_
