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

#ifndef VGSKIT_MATRIX_HPP_
#define VGSKIT_MATRIX_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace vgs {

// Dense row-major matrix. No invariants beyond size consistency; the typed
// wrappers (FeatureMatrix, score matrices) validate their own contents.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }
  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using RealMatrix = Matrix<double>;

// Dense steps x groups x entries array, used for per-timestep code logits
// and probabilities.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(std::size_t steps, std::size_t groups, std::size_t entries,
          double fill = 0.0)
      : steps_(steps), groups_(groups), entries_(entries),
        data_(steps * groups * entries, fill) {}

  std::size_t steps() const noexcept { return steps_; }
  std::size_t groups() const noexcept { return groups_; }
  std::size_t entries() const noexcept { return entries_; }

  double& operator()(std::size_t t, std::size_t g, std::size_t v) {
    return data_[(t * groups_ + g) * entries_ + v];
  }
  double operator()(std::size_t t, std::size_t g, std::size_t v) const {
    return data_[(t * groups_ + g) * entries_ + v];
  }
  std::span<double> slice(std::size_t t, std::size_t g) {
    return {data_.data() + (t * groups_ + g) * entries_, entries_};
  }
  std::span<const double> slice(std::size_t t, std::size_t g) const {
    return {data_.data() + (t * groups_ + g) * entries_, entries_};
  }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

 private:
  std::size_t steps_ = 0;
  std::size_t groups_ = 0;
  std::size_t entries_ = 0;
  std::vector<double> data_;
};

}  // namespace vgs

#endif  // VGSKIT_MATRIX_HPP_
