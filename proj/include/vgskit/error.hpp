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

#ifndef VGSKIT_ERROR_HPP_
#define VGSKIT_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace vgs {

// Numeric values are mirrored by vgs_status in vgskit.h; keep them in sync.
enum class ErrorCode : int {
  kIoFailure = 1,
  kBadMagic = 2,
  kTruncatedFile = 3,
  kNonFiniteValue = 4,
  kEmptyManifest = 5,
  kInvalidManifest = 6,
  kShapeMismatch = 7,
  kMaskRowAllOnes = 8,
  kZeroVector = 9,
  kNonPositiveTemperature = 10,
  kInvalidDistribution = 11,
  kNonFiniteEvaluation = 12,
  kTooFewPoints = 13,
  kDimMismatch = 14,
  kEmptyBatch = 15,
  kKcSmallerThanN = 16,
  kUnknownQuery = 17,
  kZeroNormFrame = 18,
  kMissingFeature = 19,
  kEmptySequence = 20,
  kDegenerateInput = 21,
  kEmptyCorpus = 22,
  kLengthMismatch = 23,
  kInvalidArgument = 24,
};

const char* ErrorCodeName(ErrorCode code);

// True for codes that come from the filesystem or a malformed file rather
// than from a bad argument.
bool IsIoError(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace vgs

#endif  // VGSKIT_ERROR_HPP_
