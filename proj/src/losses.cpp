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

#include "vgskit/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "vgskit/error.hpp"

namespace vgs {

namespace {

// One log-softmax term: the positive logit against its masked-in negatives.
struct LseTerm {
  double value = 0.0;      // -positive + logsumexp
  double max_logit = 0.0;  // shift used for the exponentials
  double partition = 0.0;  // sum of shifted exponentials
};

void ValidateMatching(const ScoreMatrix& scores, const MatchingLossConfig& cfg) {
  const auto& s = scores.values;
  if (s.rows() == 0 || s.rows() != s.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "score matrix must be square and nonempty");
  }
  if (cfg.mask.rows() != s.rows() || cfg.mask.cols() != s.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "mask shape differs from score shape");
  }
  for (double v : s.values()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFiniteValue, "score is not finite");
  }
  for (auto m : cfg.mask.values()) {
    if (m > 1) throw Error(ErrorCode::kShapeMismatch, "mask entries must be 0 or 1");
  }
  if (!std::isfinite(cfg.delta) || cfg.delta < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "delta must be finite and >= 0");
  }
}

// Positive index along a line of the mask: the diagonal when it is a match,
// otherwise the first zero.
std::size_t PositiveIndex(const Matrix<std::uint8_t>& mask, std::size_t line,
                          bool by_row) {
  auto m = [&](std::size_t k) { return by_row ? mask(line, k) : mask(k, line); };
  if (m(line) == 0) return line;
  for (std::size_t k = 0; k < mask.rows(); ++k) {
    if (m(k) == 0) return k;
  }
  throw Error(ErrorCode::kMaskRowAllOnes,
              std::string(by_row ? "row " : "column ") + std::to_string(line) +
                  " of the mask has no positive");
}

// Evaluates one direction on line `line`. `score(k)` and `mask(k)` address the
// k-th element along the line.
template <typename ScoreAt, typename MaskAt>
LseTerm EvalLine(std::size_t n, std::size_t pos, double delta, ScoreAt score,
                 MaskAt mask) {
  const double positive = score(pos) - delta;
  double mx = positive;
  for (std::size_t k = 0; k < n; ++k) {
    if (mask(k)) mx = std::max(mx, score(k));
  }
  double z = std::exp(positive - mx);
  for (std::size_t k = 0; k < n; ++k) {
    if (mask(k)) z += std::exp(score(k) - mx);
  }
  return {-positive + mx + std::log(z), mx, z};
}

struct Direction {
  std::vector<double> terms;
  std::vector<std::size_t> positives;
  std::vector<LseTerm> lse;
};

Direction EvalDirection(const ScoreMatrix& scores, const MatchingLossConfig& cfg,
                        bool by_row) {
  const auto& s = scores.values;
  const std::size_t n = s.rows();
  Direction d;
  d.terms.reserve(n);
  for (std::size_t line = 0; line < n; ++line) {
    const std::size_t pos = PositiveIndex(cfg.mask, line, by_row);
    auto score = [&](std::size_t k) { return by_row ? s(line, k) : s(k, line); };
    auto mask = [&](std::size_t k) {
      return (by_row ? cfg.mask(line, k) : cfg.mask(k, line)) != 0;
    };
    LseTerm t = EvalLine(n, pos, cfg.delta, score, mask);
    d.terms.push_back(t.value);
    d.positives.push_back(pos);
    d.lse.push_back(t);
  }
  return d;
}

template <typename Real>
Real Norm(std::span<const Real> v) {
  Real s = 0;
  for (Real x : v) s += x * x;
  return std::sqrt(s);
}

template <typename Real>
Real Dot(std::span<const Real> a, std::span<const Real> b) {
  Real s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Forward pass of the contrastive loss. Candidate 0 is the positive.
template <typename Real>
struct W2V2Forward {
  Real loss = 0;
  Real c_norm = 0;
  std::vector<Real> norms;
  std::vector<Real> cosines;
  std::vector<Real> weights;  // softmax over candidates
};

template <typename Real>
W2V2Forward<Real> RunW2V2Forward(std::span<const Real> context,
                                 const std::vector<std::span<const Real>>& cands,
                                 Real kappa) {
  W2V2Forward<Real> f;
  f.c_norm = Norm(context);
  if (f.c_norm == 0) throw Error(ErrorCode::kZeroVector, "context vector is zero");
  std::vector<Real> logits;
  for (auto q : cands) {
    const Real qn = Norm(q);
    if (qn == 0) throw Error(ErrorCode::kZeroVector, "candidate vector is zero");
    f.norms.push_back(qn);
    f.cosines.push_back(Dot(context, q) / (f.c_norm * qn));
    logits.push_back(f.cosines.back() / kappa);
  }
  const auto top = std::max_element(logits.begin(), logits.end());
  const Real mx = *top;
  // Mass off the maximum, kept apart so log1p stays accurate when one
  // candidate dominates.
  Real rest = 0;
  for (auto it = logits.begin(); it != logits.end(); ++it) {
    if (it != top) rest += std::exp(*it - mx);
  }
  const Real z = 1 + rest;
  f.loss = (mx - logits[0]) + std::log1p(rest);
  for (Real l : logits) f.weights.push_back(std::exp(l - mx) / z);
  return f;
}

void ValidateW2V2(const W2V2LossInput& in) {
  if (!(in.kappa > 0.0) || !std::isfinite(in.kappa)) {
    throw Error(ErrorCode::kNonPositiveTemperature, "kappa must be positive");
  }
  const std::size_t dim = in.context.size();
  if (dim == 0 || in.positive.size() != dim) {
    throw Error(ErrorCode::kShapeMismatch, "context and positive must share a nonzero size");
  }
  for (const auto& q : in.distractors) {
    if (q.size() != dim) throw Error(ErrorCode::kShapeMismatch, "distractor size differs");
  }
}

// Max over coordinates of |analytic - fd| / max(1e-12, |fd|), fd from the
// fourth-order central stencil on value(x) evaluated in Real precision.
template <typename Real, typename Value>
double MaxRelativeError(Value&& value, std::span<const double> x0,
                        std::span<const double> analytic, double eps) {
  std::vector<Real> x(x0.begin(), x0.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(analytic[i])) {
      throw Error(ErrorCode::kNonFiniteEvaluation,
                  "analytic gradient not finite at " + std::to_string(i));
    }
    const Real saved = x[i];
    auto at = [&](Real h) {
      x[i] = saved + h;
      const Real v = value(std::span<const Real>(x));
      x[i] = saved;
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kNonFiniteEvaluation,
                    "f not finite near coordinate " + std::to_string(i));
      }
      return v;
    };
    const Real h = eps;
    const double fd = static_cast<double>(
        (8 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12 * h));
    worst = std::max(worst, std::abs(analytic[i] - fd) / std::max(1e-12, std::abs(fd)));
  }
  return worst;
}

}  // namespace

MatchingLossTerms ComputeMatchingLossTerms(const ScoreMatrix& scores,
                                           const MatchingLossConfig& cfg) {
  ValidateMatching(scores, cfg);
  return {EvalDirection(scores, cfg, true).terms,
          EvalDirection(scores, cfg, false).terms};
}

LossAndGrad MatchingLoss(const ScoreMatrix& scores, const MatchingLossConfig& cfg) {
  ValidateMatching(scores, cfg);
  const auto& s = scores.values;
  const std::size_t n = s.rows();
  const double scale =
      cfg.reduction == Reduction::kBatchMean ? 1.0 / static_cast<double>(n) : 1.0;

  LossAndGrad out{0.0, RealMatrix(n, n, 0.0)};
  for (bool by_row : {true, false}) {
    const Direction d = EvalDirection(scores, cfg, by_row);
    double sum = 0.0;
    for (double t : d.terms) sum += t;
    out.loss += scale * sum;

    for (std::size_t line = 0; line < n; ++line) {
      const LseTerm& t = d.lse[line];
      const std::size_t pos = d.positives[line];
      auto grad = [&](std::size_t k) -> double& {
        return by_row ? out.grad(line, k) : out.grad(k, line);
      };
      const double pos_logit = (by_row ? s(line, pos) : s(pos, line)) - cfg.delta;
      grad(pos) += scale * (std::exp(pos_logit - t.max_logit) / t.partition - 1.0);
      for (std::size_t k = 0; k < n; ++k) {
        const bool negative = (by_row ? cfg.mask(line, k) : cfg.mask(k, line)) != 0;
        if (!negative) continue;
        const double v = by_row ? s(line, k) : s(k, line);
        grad(k) += scale * std::exp(v - t.max_logit) / t.partition;
      }
    }
  }
  return out;
}

double CosineSimilarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kShapeMismatch, "cosine of vectors with different sizes");
  }
  const double na = Norm(a);
  const double nb = Norm(b);
  if (na == 0.0 || nb == 0.0) throw Error(ErrorCode::kZeroVector, "cosine undefined");
  return Dot(a, b) / (na * nb);
}

W2V2LossResult W2V2ContrastiveLoss(const W2V2LossInput& in) {
  ValidateW2V2(in);
  const std::size_t dim = in.context.size();
  std::vector<std::span<const double>> cands;
  cands.reserve(in.distractors.size() + 1);
  cands.emplace_back(in.positive);
  for (const auto& q : in.distractors) cands.emplace_back(q);
  const auto fw = RunW2V2Forward<double>(in.context, cands, in.kappa);

  W2V2LossResult out;
  out.loss = fw.loss;
  out.grad_context.assign(dim, 0.0);
  out.grad_positive.assign(dim, 0.0);
  out.grad_distractors.assign(in.distractors.size(), std::vector<double>(dim, 0.0));

  const double c_norm = fw.c_norm;
  for (std::size_t k = 0; k < cands.size(); ++k) {
    // d loss / d logit_k
    const double g = fw.weights[k] - (k == 0 ? 1.0 : 0.0);
    const double coef = g / in.kappa;
    auto q = cands[k];
    std::vector<double>& gq = k == 0 ? out.grad_positive : out.grad_distractors[k - 1];
    const double inv = 1.0 / (c_norm * fw.norms[k]);
    for (std::size_t i = 0; i < dim; ++i) {
      out.grad_context[i] +=
          coef * (q[i] * inv - fw.cosines[k] * in.context[i] / (c_norm * c_norm));
      gq[i] += coef * (in.context[i] * inv - fw.cosines[k] * q[i] / (fw.norms[k] * fw.norms[k]));
    }
  }
  return out;
}

CodeDistribution::CodeDistribution(RealMatrix p_bar) : p_(std::move(p_bar)) {
  if (p_.rows() == 0 || p_.cols() == 0) {
    throw Error(ErrorCode::kInvalidDistribution, "distribution must be nonempty");
  }
  for (std::size_t g = 0; g < p_.rows(); ++g) {
    double sum = 0.0;
    for (double v : p_.row(g)) {
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        throw Error(ErrorCode::kInvalidDistribution,
                    "row " + std::to_string(g) + " has an entry outside [0, 1]");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kDistributionTolerance) {
      throw Error(ErrorCode::kInvalidDistribution,
                  "row " + std::to_string(g) + " sums to " + std::to_string(sum));
    }
  }
}

LossAndGrad DiversityLoss(const CodeDistribution& dist, bool negate) {
  return DiversityLossKernel(dist.p_bar(), negate);
}

LossAndGrad DiversityLossKernel(const RealMatrix& p, bool negate) {
  if (p.rows() == 0 || p.cols() == 0) {
    throw Error(ErrorCode::kInvalidDistribution, "distribution must be nonempty");
  }
  const double scale =
      (negate ? -1.0 : 1.0) / static_cast<double>(p.rows() * p.cols());
  LossAndGrad out{0.0, RealMatrix(p.rows(), p.cols(), 0.0)};
  double sum = 0.0;
  for (std::size_t g = 0; g < p.rows(); ++g) {
    for (std::size_t v = 0; v < p.cols(); ++v) {
      const double x = p(g, v);
      if (!(x >= 0.0)) {
        throw Error(ErrorCode::kInvalidDistribution, "negative or NaN probability");
      }
      if (x > 0.0) {
        sum += x * std::log(x);
        out.grad(g, v) = scale * (std::log(x) + 1.0);
      } else {
        out.grad(g, v) = -scale * std::numeric_limits<double>::infinity();
      }
    }
  }
  out.loss = scale * sum;
  return out;
}

double TotalObjective(double lc, double lf, double lw, double ld,
                      const LossWeights& w, Objective objective) {
  double total = w.coarse * lc + w.fine * lf;
  if (objective == Objective::kFastVgsPlus) total += w.w2v2 * lw + w.diversity * ld;
  return total;
}

double FiniteDifferenceCheck(const GradientFunction& f, std::span<const double> x0,
                             double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "eps must be positive");
  std::vector<double> analytic(x0.size(), 0.0);
  std::vector<double> scratch(x0.size(), 0.0);
  const double f0 = f(x0, analytic);
  if (!std::isfinite(f0)) throw Error(ErrorCode::kNonFiniteEvaluation, "f(x0) is not finite");
  return MaxRelativeError<double>([&](std::span<const double> x) { return f(x, scratch); },
                                  x0, analytic, eps);
}

GradientSuiteResult RunGradientSuite(const GradientSuiteOptions& opts) {
  if (opts.max_batch < 2 || opts.max_dim < 2 || opts.max_groups < 1 ||
      opts.max_entries < 2 || opts.max_distractors < 1) {
    throw Error(ErrorCode::kInvalidArgument, "gradient suite bounds too small");
  }
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto uniform_int = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  GradientSuiteResult r;
  for (std::size_t inst = 0; inst < opts.instances; ++inst) {
    // Matching loss: a batch of (caption, image) pairs where images may
    // repeat, so M has zeros on the diagonal and at duplicate images.
    {
      const std::size_t b = uniform_int(2, opts.max_batch);
      std::vector<std::size_t> image(b);
      for (auto& im : image) im = uniform_int(0, b - 1);
      MatchingLossConfig cfg;
      cfg.delta = uniform(0.0, 2.0);
      cfg.reduction = inst % 2 == 0 ? Reduction::kSum : Reduction::kBatchMean;
      cfg.mask = Matrix<std::uint8_t>(b, b, 1);
      for (std::size_t i = 0; i < b; ++i) {
        for (std::size_t j = 0; j < b; ++j) cfg.mask(i, j) = image[i] == image[j] ? 0 : 1;
      }
      std::vector<double> x0(b * b);
      for (double& v : x0) v = gauss(rng);
      auto f = [&](std::span<const double> x, std::span<double> grad) {
        ScoreMatrix s{RealMatrix(b, b, std::vector<double>(x.begin(), x.end()))};
        auto out = MatchingLoss(s, cfg);
        std::copy(out.grad.values().begin(), out.grad.values().end(), grad.begin());
        return out.loss;
      };
      r.matching_max_error =
          std::max(r.matching_max_error, FiniteDifferenceCheck(f, x0, opts.eps));
    }
    // Contrastive loss: flat layout [c | q | distractors...]. At small kappa
    // distractor gradients span many decades below an O(1) loss, under the
    // rounding of a double-valued loss, so the difference quotients are
    // taken on the same forward pass in long double.
    {
      const std::size_t d = uniform_int(2, opts.max_dim);
      const std::size_t k = uniform_int(1, opts.max_distractors);
      const double kappa = uniform(0.1, 1.0);
      std::vector<double> x0((k + 2) * d);
      for (double& v : x0) v = gauss(rng);

      W2V2LossInput in;
      in.kappa = kappa;
      in.context.assign(x0.begin(), x0.begin() + static_cast<std::ptrdiff_t>(d));
      in.positive.assign(x0.begin() + static_cast<std::ptrdiff_t>(d),
                         x0.begin() + static_cast<std::ptrdiff_t>(2 * d));
      for (std::size_t j = 0; j < k; ++j) {
        auto first = x0.begin() + static_cast<std::ptrdiff_t>((2 + j) * d);
        in.distractors.emplace_back(first, first + static_cast<std::ptrdiff_t>(d));
      }
      const auto out = W2V2ContrastiveLoss(in);
      std::vector<double> analytic;
      analytic.insert(analytic.end(), out.grad_context.begin(), out.grad_context.end());
      analytic.insert(analytic.end(), out.grad_positive.begin(), out.grad_positive.end());
      for (const auto& g : out.grad_distractors) {
        analytic.insert(analytic.end(), g.begin(), g.end());
      }

      auto value = [&](std::span<const long double> x) {
        std::vector<std::span<const long double>> cands;
        for (std::size_t j = 1; j < k + 2; ++j) cands.push_back(x.subspan(j * d, d));
        return RunW2V2Forward<long double>(x.subspan(0, d), cands, kappa).loss;
      };
      r.w2v2_max_error = std::max(
          r.w2v2_max_error, MaxRelativeError<long double>(value, x0, analytic, opts.eps));
    }
    // Diversity loss on softmax-normalised random rows.
    {
      const std::size_t g = uniform_int(1, opts.max_groups);
      const std::size_t v = uniform_int(2, opts.max_entries);
      std::vector<double> x0(g * v);
      for (std::size_t row = 0; row < g; ++row) {
        double z = 0.0;
        for (std::size_t e = 0; e < v; ++e) z += (x0[row * v + e] = std::exp(gauss(rng)));
        for (std::size_t e = 0; e < v; ++e) x0[row * v + e] /= z;
      }
      const bool negate = inst % 2 == 1;
      auto f = [&](std::span<const double> x, std::span<double> grad) {
        auto out = DiversityLossKernel(RealMatrix(g, v, std::vector<double>(x.begin(), x.end())),
                                       negate);
        std::copy(out.grad.values().begin(), out.grad.values().end(), grad.begin());
        return out.loss;
      };
      r.diversity_max_error =
          std::max(r.diversity_max_error, FiniteDifferenceCheck(f, x0, opts.eps));
    }
  }
  return r;
}

}  // namespace vgs
