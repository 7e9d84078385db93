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

#include "vgskit/unitlm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <random>

#include "json.hpp"
#include "vgskit/error.hpp"

namespace vgs {

namespace {

constexpr const char* kFormatTag = "vgskit-ngram";
constexpr int kFormatVersion = 1;

void ValidateSpec(const SpanSpec& spec) {
  if (!(spec.mean > 0.0) || !std::isfinite(spec.mean)) {
    throw Error(ErrorCode::kInvalidArgument, "span mean must be positive");
  }
  if (!(spec.std >= 0.0) || !std::isfinite(spec.std)) {
    throw Error(ErrorCode::kInvalidArgument, "span std must be >= 0");
  }
  if (!(spec.coverage_target > 0.0 && spec.coverage_target <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "coverage target must lie in (0, 1]");
  }
}

std::vector<double> NormalizedWeights(std::vector<double> w, std::size_t order) {
  if (w.empty()) return std::vector<double>(order, 1.0 / static_cast<double>(order));
  if (w.size() != order) {
    throw Error(ErrorCode::kInvalidArgument, "need one interpolation weight per order");
  }
  double sum = 0.0;
  for (double v : w) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, "interpolation weights must be >= 0");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "interpolation weights must sum to 1");
  }
  return w;
}

}  // namespace

std::vector<Span> SpanSample(std::size_t length, const SpanSpec& spec) {
  ValidateSpec(spec);
  if (length < 1) throw Error(ErrorCode::kInvalidArgument, "length must be >= 1");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(spec.mean, spec.std > 0.0 ? spec.std : 1.0);
  const double need = spec.coverage_target * static_cast<double>(length);
  const auto max_len = static_cast<long long>(length);

  std::vector<std::uint8_t> covered(length, 0);
  std::size_t covered_count = 0;
  std::vector<Span> spans;
  while (static_cast<double>(covered_count) < need) {
    const double draw = spec.std > 0.0 ? normal(rng) : spec.mean;
    const long long len = std::clamp(std::llround(draw), 1LL, max_len);
    std::uniform_int_distribution<long long> start_dist(0, max_len - len);
    const auto start = static_cast<std::size_t>(start_dist(rng));
    const auto ulen = static_cast<std::size_t>(len);
    for (std::size_t t = start; t < start + ulen; ++t) {
      if (!covered[t]) {
        covered[t] = 1;
        ++covered_count;
      }
    }
    spans.push_back({start, ulen});
  }
  return spans;
}

double UnionCoverage(std::span<const Span> spans, std::size_t length) {
  if (length == 0) return 0.0;
  std::vector<std::uint8_t> covered(length, 0);
  for (const auto& s : spans) {
    for (std::size_t t = s.start; t < std::min(length, s.start + s.len); ++t) covered[t] = 1;
  }
  return static_cast<double>(std::count(covered.begin(), covered.end(), 1)) /
         static_cast<double>(length);
}

NGramLM::NGramLM(std::size_t order, double add_k, std::size_t vocab,
                 std::vector<double> weights)
    : order_(order), add_k_(add_k), vocab_(vocab), weights_(std::move(weights)),
      tables_(order) {}

NGramLM NGramLM::Train(std::span<const UnitSequence> corpus, std::size_t order,
                       double add_k, std::size_t vocab_size, std::vector<double> weights) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "no training sequences");
  if (order < 1) throw Error(ErrorCode::kInvalidArgument, "order must be >= 1");
  if (!(add_k > 0.0) || !std::isfinite(add_k)) {
    throw Error(ErrorCode::kInvalidArgument, "add_k must be positive");
  }
  if (vocab_size < 1) throw Error(ErrorCode::kInvalidArgument, "vocabulary must be nonempty");

  NGramLM lm(order, add_k, vocab_size, NormalizedWeights(std::move(weights), order));
  std::vector<std::uint32_t> padded;
  for (const auto& seq : corpus) {
    padded.assign(order - 1, kBos);
    for (auto u : seq.units()) {
      if (u >= vocab_size) {
        throw Error(ErrorCode::kInvalidArgument, "unit " + std::to_string(u) +
                                                     " outside vocabulary");
      }
      padded.push_back(u);
    }
    for (std::size_t t = order - 1; t < padded.size(); ++t) {
      for (std::size_t m = 1; m <= order; ++m) {
        std::vector<std::uint32_t> ctx(padded.begin() + static_cast<std::ptrdiff_t>(t - (m - 1)),
                                       padded.begin() + static_cast<std::ptrdiff_t>(t));
        auto& cc = lm.tables_[m - 1][ctx];
        ++cc.total;
        ++cc.next[padded[t]];
      }
    }
  }
  return lm;
}

double NGramLM::Prob(std::span<const std::uint32_t> history, std::uint32_t unit) const {
  if (unit >= vocab_) throw Error(ErrorCode::kInvalidArgument, "unit outside vocabulary");
  std::vector<std::uint32_t> ctx(order_ - 1, kBos);
  const std::size_t take = std::min(history.size(), order_ - 1);
  std::copy(history.end() - static_cast<std::ptrdiff_t>(take), history.end(),
            ctx.end() - static_cast<std::ptrdiff_t>(take));

  const double kv = add_k_ * static_cast<double>(vocab_);
  double p = 0.0;
  for (std::size_t m = 1; m <= order_; ++m) {
    const std::vector<std::uint32_t> h(ctx.end() - static_cast<std::ptrdiff_t>(m - 1), ctx.end());
    double count = 0.0, total = 0.0;
    const auto& table = tables_[m - 1];
    if (auto it = table.find(h); it != table.end()) {
      total = static_cast<double>(it->second.total);
      if (auto jt = it->second.next.find(unit); jt != it->second.next.end()) {
        count = static_cast<double>(jt->second);
      }
    }
    p += weights_[m - 1] * (count + add_k_) / (total + kv);
  }
  return p;
}

double NGramLM::LogProbSpan(std::span<const std::uint32_t> units, std::size_t start,
                            std::size_t len) const {
  if (start + len > units.size()) {
    throw Error(ErrorCode::kInvalidArgument, "span runs past the sequence");
  }
  double lp = 0.0;
  for (std::size_t t = start; t < start + len; ++t) {
    lp += std::log(Prob(units.first(t), units[t]));
  }
  return lp;
}

double NGramLM::SequenceLogProb(std::span<const std::uint32_t> units) const {
  return LogProbSpan(units, 0, units.size());
}

std::vector<std::vector<std::uint32_t>> NGramLM::ObservedContexts() const {
  std::vector<std::vector<std::uint32_t>> out;
  for (const auto& [ctx, counts] : tables_.back()) out.push_back(ctx);
  return out;
}

std::vector<std::uint8_t> NGramLM::Serialize() const {
  nlohmann::json tables = nlohmann::json::array();
  for (const auto& table : tables_) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [ctx, cc] : table) {
      nlohmann::json next = nlohmann::json::array();
      for (const auto& [u, c] : cc.next) next.push_back({u, c});
      entries.push_back({{"ctx", ctx}, {"total", cc.total}, {"next", std::move(next)}});
    }
    tables.push_back(std::move(entries));
  }
  const nlohmann::json doc = {{"format", kFormatTag},  {"version", kFormatVersion},
                              {"order", order_},       {"add_k", add_k_},
                              {"vocab", vocab_},       {"weights", weights_},
                              {"tables", std::move(tables)}};
  return nlohmann::json::to_cbor(doc);
}

NGramLM NGramLM::Deserialize(std::span<const std::uint8_t> bytes) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::from_cbor(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kBadMagic, std::string("not an n-gram model: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", "") != kFormatTag) {
    throw Error(ErrorCode::kBadMagic, "not an n-gram model");
  }
  try {
    if (doc.at("version").get<int>() != kFormatVersion) {
      throw Error(ErrorCode::kBadMagic, "unsupported n-gram model version");
    }
    const auto order = doc.at("order").get<std::size_t>();
    const auto add_k = doc.at("add_k").get<double>();
    const auto vocab = doc.at("vocab").get<std::size_t>();
    if (order < 1 || !(add_k > 0.0) || vocab < 1) {
      throw Error(ErrorCode::kInvalidArgument, "invalid n-gram hyper-parameters");
    }
    NGramLM lm(order, add_k, vocab,
               NormalizedWeights(doc.at("weights").get<std::vector<double>>(), order));
    const auto& tables = doc.at("tables");
    if (tables.size() != order) {
      throw Error(ErrorCode::kTruncatedFile, "model has the wrong number of count tables");
    }
    for (std::size_t m = 0; m < order; ++m) {
      for (const auto& e : tables[m]) {
        auto& cc = lm.tables_[m][e.at("ctx").get<std::vector<std::uint32_t>>()];
        cc.total = e.at("total").get<std::uint64_t>();
        for (const auto& n : e.at("next")) {
          cc.next[n.at(0).get<std::uint32_t>()] = n.at(1).get<std::uint64_t>();
        }
      }
    }
    return lm;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kTruncatedFile, std::string("malformed n-gram model: ") + e.what());
  }
}

void NGramLM::Save(const std::filesystem::path& path) const {
  const auto bytes = Serialize();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed for " + path.string());
}

NGramLM NGramLM::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return Deserialize(bytes);
}

double PseudoLogProb(const UnitLM& lm, std::span<const std::uint32_t> units,
                     const SpanSpec& spec, std::size_t repeats) {
  if (units.empty()) throw Error(ErrorCode::kEmptySequence, "empty unit sequence");
  if (repeats < 1) throw Error(ErrorCode::kInvalidArgument, "repeats must be >= 1");
  double total = 0.0;
  SpanSpec s = spec;
  for (std::size_t r = 0; r < repeats; ++r) {
    s.seed = spec.seed + r;
    double lp = 0.0;
    for (const auto& span : SpanSample(units.size(), s)) {
      lp += lm.LogProbSpan(units, span.start, span.len);
    }
    total += lp;
  }
  return total / static_cast<double>(repeats);
}

double PairedAccuracy(std::span<const double> pos, std::span<const double> neg) {
  if (pos.size() != neg.size()) {
    throw Error(ErrorCode::kLengthMismatch, std::to_string(pos.size()) + " positive vs " +
                                                std::to_string(neg.size()) + " negative scores");
  }
  if (pos.empty()) throw Error(ErrorCode::kLengthMismatch, "no score pairs");
  double wins = 0.0;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (pos[i] > neg[i]) {
      wins += 1.0;
    } else if (pos[i] == neg[i]) {
      wins += 0.5;
    }
  }
  return wins / static_cast<double>(pos.size());
}

}  // namespace vgs
