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

// Feature and manifest I/O.
//
// FVF1 layout (all integers little-endian):
//   bytes 0-3   ASCII "FVF1"
//   byte  4     rank, 1 or 2
//   rank x u64  dimension sizes
//   payload     row-major float32
// A rank-1 file of length n loads as a 1 x n matrix. Writers always emit
// rank 2.

#ifndef VGSKIT_FEATSTORE_HPP_
#define VGSKIT_FEATSTORE_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vgskit/matrix.hpp"

namespace vgs {

// Dense float32 matrix, rows = items or frames. Always at least 1 x 1 and
// finite; every constructor path validates.
class FeatureMatrix {
 public:
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<float> values);
  explicit FeatureMatrix(Matrix<float> m);

  std::size_t rows() const noexcept { return m_.rows(); }
  std::size_t cols() const noexcept { return m_.cols(); }
  float operator()(std::size_t r, std::size_t c) const { return m_(r, c); }
  std::span<const float> row(std::size_t r) const { return m_.row(r); }
  std::span<const float> values() const { return m_.values(); }
  const Matrix<float>& matrix() const noexcept { return m_; }

  bool operator==(const FeatureMatrix&) const = default;

 private:
  Matrix<float> m_;
};

struct FrameSequence {
  FrameSequence(FeatureMatrix frames, double frame_rate_hz,
                std::string utterance_id);

  FeatureMatrix frames;
  double frame_rate_hz;
  std::string utterance_id;

  std::size_t length() const noexcept { return frames.rows(); }
  std::size_t dim() const noexcept { return frames.cols(); }
};

FeatureMatrix ReadFeatures(const std::filesystem::path& path);
void WriteFeatures(const FeatureMatrix& m, const std::filesystem::path& path);

// Serialised FVF1 bytes; WriteFeatures writes exactly this.
std::vector<std::uint8_t> EncodeFeatures(const FeatureMatrix& m);
FeatureMatrix DecodeFeatures(std::span<const std::uint8_t> bytes);

struct PairRecord {
  std::string caption_id;
  std::string image_id;
  std::optional<std::string> speaker_id;
  std::optional<std::string> feature_path;
};

// Caption/image pairing. Caption order is record order; image order is order
// of first appearance. These orders define the rows and columns of every
// score matrix built from the manifest.
class PairManifest {
 public:
  explicit PairManifest(std::vector<PairRecord> records);

  std::size_t num_captions() const noexcept { return records_.size(); }
  std::size_t num_images() const noexcept { return image_ids_.size(); }
  const std::vector<PairRecord>& records() const noexcept { return records_; }
  const std::vector<std::string>& image_ids() const noexcept {
    return image_ids_;
  }
  // Column index of caption i's image.
  std::size_t image_of_caption(std::size_t caption) const {
    return caption_image_[caption];
  }
  std::optional<std::size_t> find_caption(std::string_view id) const;
  std::optional<std::size_t> find_image(std::string_view id) const;

 private:
  std::vector<PairRecord> records_;
  std::vector<std::string> image_ids_;
  std::vector<std::size_t> caption_image_;
  std::map<std::string, std::size_t, std::less<>> caption_index_;
  std::map<std::string, std::size_t, std::less<>> image_index_;
};

PairManifest ParsePairManifest(std::string_view jsonl);
PairManifest ReadPairManifest(const std::filesystem::path& path);

// M[i][j] = 0 iff caption i describes image j, 1 otherwise.
Matrix<std::uint8_t> BuildPositiveMask(const PairManifest& manifest);

// Maps utterance id to its frames.
using FeatureStore = std::map<std::string, FrameSequence, std::less<>>;

// Loads every *.fvf file in dir; the id is the file stem.
FeatureStore LoadFeatureDir(const std::filesystem::path& dir,
                            double frame_rate_hz = 50.0);

std::string ReadTextFile(const std::filesystem::path& path);

}  // namespace vgs

#endif  // VGSKIT_FEATSTORE_HPP_
