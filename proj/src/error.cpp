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

#include "vgskit/error.hpp"

namespace vgs {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kEmptyManifest: return "EmptyManifest";
    case ErrorCode::kInvalidManifest: return "InvalidManifest";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kMaskRowAllOnes: return "MaskRowAllOnes";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kNonPositiveTemperature: return "NonPositiveTemperature";
    case ErrorCode::kInvalidDistribution: return "InvalidDistribution";
    case ErrorCode::kNonFiniteEvaluation: return "NonFiniteEvaluation";
    case ErrorCode::kTooFewPoints: return "TooFewPoints";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kEmptyBatch: return "EmptyBatch";
    case ErrorCode::kKcSmallerThanN: return "KcSmallerThanN";
    case ErrorCode::kUnknownQuery: return "UnknownQuery";
    case ErrorCode::kZeroNormFrame: return "ZeroNormFrame";
    case ErrorCode::kMissingFeature: return "MissingFeature";
    case ErrorCode::kEmptySequence: return "EmptySequence";
    case ErrorCode::kDegenerateInput: return "DegenerateInput";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

bool IsIoError(ErrorCode code) {
  return code == ErrorCode::kIoFailure || code == ErrorCode::kBadMagic ||
         code == ErrorCode::kTruncatedFile;
}

}  // namespace vgs
