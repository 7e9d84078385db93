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

#include "vgskit/featstore.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "jsonl.hpp"
#include "vgskit/error.hpp"

namespace vgs {

namespace {

constexpr char kMagic[4] = {'F', 'V', 'F', '1'};
constexpr std::size_t kMaxDim = std::size_t{1} << 40;

void CheckFinite(std::span<const float> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(ErrorCode::kNonFiniteValue,
                  "value at flat index " + std::to_string(i) + " is not finite");
    }
  }
}

void PutU64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

std::uint64_t GetU64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int b = 7; b >= 0; --b) v = (v << 8) | p[b];
  return v;
}

}  // namespace

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols,
                             std::vector<float> values)
    : FeatureMatrix(Matrix<float>(rows, cols, std::move(values))) {}

FeatureMatrix::FeatureMatrix(Matrix<float> m) : m_(std::move(m)) {
  if (m_.rows() == 0 || m_.cols() == 0) {
    throw Error(ErrorCode::kShapeMismatch, "feature matrix must be at least 1x1");
  }
  if (m_.size() != m_.rows() * m_.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "value count does not match shape");
  }
  CheckFinite(m_.values());
}

FrameSequence::FrameSequence(FeatureMatrix f, double rate, std::string id)
    : frames(std::move(f)), frame_rate_hz(rate), utterance_id(std::move(id)) {
  if (!std::isfinite(frame_rate_hz) || frame_rate_hz <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "frame rate must be finite and positive");
  }
}

std::vector<std::uint8_t> EncodeFeatures(const FeatureMatrix& m) {
  std::vector<std::uint8_t> out;
  out.reserve(4 + 1 + 16 + 4 * m.values().size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  out.push_back(2);
  PutU64(out, m.rows());
  PutU64(out, m.cols());
  for (float v : m.values()) {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
  }
  return out;
}

FeatureMatrix DecodeFeatures(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 5 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic, "missing FVF1 header");
  }
  const unsigned rank = bytes[4];
  if (rank != 1 && rank != 2) {
    throw Error(ErrorCode::kBadMagic, "unsupported rank " + std::to_string(rank));
  }
  const std::size_t header = 5 + 8 * rank;
  if (bytes.size() < header) {
    throw Error(ErrorCode::kTruncatedFile, "header shorter than declared rank");
  }
  std::uint64_t dims[2] = {1, 1};
  for (unsigned r = 0; r < rank; ++r) dims[2 - rank + r] = GetU64(bytes.data() + 5 + 8 * r);
  if (dims[0] == 0 || dims[1] == 0 || dims[0] > kMaxDim || dims[1] > kMaxDim ||
      dims[0] * dims[1] > kMaxDim) {
    throw Error(ErrorCode::kShapeMismatch, "invalid dimensions in header");
  }
  const std::size_t count = dims[0] * dims[1];
  if (bytes.size() - header < 4 * count) {
    throw Error(ErrorCode::kTruncatedFile,
                "payload has " + std::to_string((bytes.size() - header) / 4) +
                    " values, header declares " + std::to_string(count));
  }
  std::vector<float> values(count);
  const std::uint8_t* p = bytes.data() + header;
  for (std::size_t i = 0; i < count; ++i, p += 4) {
    const std::uint32_t bits = std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) |
                               (std::uint32_t{p[2]} << 16) |
                               (std::uint32_t{p[3]} << 24);
    values[i] = std::bit_cast<float>(bits);
  }
  return FeatureMatrix(dims[0], dims[1], std::move(values));
}

FeatureMatrix ReadFeatures(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return DecodeFeatures(bytes);
}

void WriteFeatures(const FeatureMatrix& m, const std::filesystem::path& path) {
  const auto bytes = EncodeFeatures(m);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed for " + path.string());
}

PairManifest::PairManifest(std::vector<PairRecord> records)
    : records_(std::move(records)) {
  if (records_.empty()) throw Error(ErrorCode::kEmptyManifest, "no records");
  caption_image_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& rec = records_[i];
    if (rec.image_id.empty()) {
      throw Error(ErrorCode::kInvalidManifest,
                  "caption '" + rec.caption_id + "' has an empty image_id");
    }
    if (!caption_index_.emplace(rec.caption_id, i).second) {
      throw Error(ErrorCode::kInvalidManifest,
                  "duplicate caption_id '" + rec.caption_id + "'");
    }
    auto [it, inserted] = image_index_.emplace(rec.image_id, image_ids_.size());
    if (inserted) image_ids_.push_back(rec.image_id);
    caption_image_.push_back(it->second);
  }
}

std::optional<std::size_t> PairManifest::find_caption(std::string_view id) const {
  auto it = caption_index_.find(id);
  if (it == caption_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> PairManifest::find_image(std::string_view id) const {
  auto it = image_index_.find(id);
  if (it == image_index_.end()) return std::nullopt;
  return it->second;
}

PairManifest ParsePairManifest(std::string_view text) {
  constexpr auto kBad = ErrorCode::kInvalidManifest;
  std::vector<PairRecord> records;
  jsonl::ForEachRecord(text, kBad, [&](const jsonl::Json& rec, std::size_t line) {
    records.push_back({jsonl::RequireString(rec, "caption_id", line, kBad),
                       jsonl::RequireString(rec, "image_id", line, kBad),
                       jsonl::OptionalString(rec, "speaker_id", line, kBad),
                       jsonl::OptionalString(rec, "feature_path", line, kBad)});
  });
  return PairManifest(std::move(records));
}

PairManifest ReadPairManifest(const std::filesystem::path& path) {
  return ParsePairManifest(ReadTextFile(path));
}

Matrix<std::uint8_t> BuildPositiveMask(const PairManifest& manifest) {
  Matrix<std::uint8_t> mask(manifest.num_captions(), manifest.num_images(), 1);
  for (std::size_t i = 0; i < manifest.num_captions(); ++i) {
    mask(i, manifest.image_of_caption(i)) = 0;
  }
  return mask;
}

FeatureStore LoadFeatureDir(const std::filesystem::path& dir,
                            double frame_rate_hz) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::kIoFailure, dir.string() + " is not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".fvf") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  FeatureStore store;
  for (const auto& f : files) {
    std::string id = f.stem().string();
    store.emplace(id, FrameSequence(ReadFeatures(f), frame_rate_hz, id));
  }
  return store;
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace vgs
