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

// Slow reference implementations. Nothing here calls into the library
// beyond reading FeatureMatrix values.

#ifndef VGSKIT_TESTS_ORACLES_HPP_
#define VGSKIT_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "vgskit/featstore.hpp"

namespace vgs::oracle {

inline double CosineDistance(const FeatureMatrix& x, std::size_t i, const FeatureMatrix& y,
                             std::size_t j) {
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
inline double BruteForceDtw(const FeatureMatrix& x, const FeatureMatrix& y) {
  double best_cost = std::numeric_limits<double>::infinity();
  std::size_t best_len = 0;
  const std::size_t n = x.rows(), m = y.rows();
  auto walk = [&](auto&& self, std::size_t i, std::size_t j, double cost,
                  std::size_t len) -> void {
    cost += CosineDistance(x, i, y, j);
    ++len;
    if (i + 1 == n && j + 1 == m) {
      if (cost < best_cost - 1e-12 ||
          (std::abs(cost - best_cost) <= 1e-12 && len < best_len)) {
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

// O(n^2) ranks: 1 + (#smaller) + (#equal - 1) / 2.
inline std::vector<double> NaiveRanks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (double w : v) {
      less += w < v[i];
      equal += w == v[i];
    }
    r[i] = 1 + less + (equal - 1) / 2;
  }
  return r;
}

inline double NaivePearson(const std::vector<double>& x, const std::vector<double>& y) {
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= x.size();
  my /= y.size();
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

inline double NaiveSpearman(const std::vector<double>& x, const std::vector<double>& y) {
  return NaivePearson(NaiveRanks(x), NaiveRanks(y));
}

// Stable full sort, descending, lower index first on ties.
inline std::vector<std::size_t> SortDescending(const std::vector<double>& s) {
  std::vector<std::size_t> idx(s.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return s[a] > s[b]; });
  return idx;
}

// Index of the closest centroid by an explicit distance list; first wins ties.
inline std::uint32_t NearestByScan(std::span<const float> x, const std::vector<double>& centroids,
                                   std::size_t dim) {
  std::vector<double> dist;
  for (std::size_t c = 0; c * dim < centroids.size(); ++c) {
    double s = 0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double d = x[k] - centroids[c * dim + k];
      s += d * d;
    }
    dist.push_back(s);
  }
  return static_cast<std::uint32_t>(std::min_element(dist.begin(), dist.end()) - dist.begin());
}

// Best 2-partition of at most ~24 points by exhaustive search. Bit i of the
// result is point i's side; point 0 is always on side 0.
inline std::uint32_t BestTwoPartition(const FeatureMatrix& data, double* sse_out = nullptr) {
  const std::size_t n = data.rows(), d = data.cols();
  auto sse = [&](std::uint32_t bits) {
    std::vector<double> sum(2 * d, 0.0);
    double cnt[2] = {0, 0};
    for (std::size_t i = 0; i < n; ++i) {
      const int s = (bits >> i) & 1;
      cnt[s] += 1;
      for (std::size_t k = 0; k < d; ++k) sum[s * d + k] += data(i, k);
    }
    if (cnt[0] == 0 || cnt[1] == 0) return std::numeric_limits<double>::infinity();
    double e = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const int s = (bits >> i) & 1;
      for (std::size_t k = 0; k < d; ++k) {
        const double diff = data(i, k) - sum[s * d + k] / cnt[s];
        e += diff * diff;
      }
    }
    return e;
  };
  std::uint32_t best = 0;
  double best_sse = std::numeric_limits<double>::infinity();
  for (std::uint32_t bits = 0; bits < (1u << n); bits += 2) {
    const double e = sse(bits);
    if (e < best_sse) best_sse = e, best = bits;
  }
  if (sse_out) *sse_out = best_sse;
  return best;
}

}  // namespace vgs::oracle

#endif  // VGSKIT_TESTS_ORACLES_HPP_
