// Copyright 2026 The citetrend Authors
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

#include "citetrend/error.hpp"

namespace citetrend {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kUnknownEndpoint: return "UnknownEndpoint";
    case ErrorKind::kSelfCitation: return "SelfCitation";
    case ErrorKind::kAnticausalEdge: return "AnticausalEdge";
    case ErrorKind::kDuplicateEdge: return "DuplicateEdge";
    case ErrorKind::kDuplicateNode: return "DuplicateNode";
    case ErrorKind::kNegativeCitationCount: return "NegativeCitationCount";
    case ErrorKind::kYearOutOfRange: return "YearOutOfRange";
    case ErrorKind::kEmptyTargetYear: return "EmptyTargetYear";
    case ErrorKind::kEmptyCorpus: return "EmptyCorpus";
    case ErrorKind::kYearOutOfWindow: return "YearOutOfWindow";
    case ErrorKind::kShapeMismatch: return "ShapeMismatch";
    case ErrorKind::kEmptySoftmaxRow: return "EmptySoftmaxRow";
    case ErrorKind::kNotScalarLoss: return "NotScalarLoss";
    case ErrorKind::kCausalityViolation: return "CausalityViolation";
    case ErrorKind::kCacheShapeMismatch: return "CacheShapeMismatch";
    case ErrorKind::kCacheMissing: return "CacheMissing";
    case ErrorKind::kUnknownCitedNode: return "UnknownCitedNode";
    case ErrorKind::kParameterParity: return "ParameterParity";
    case ErrorKind::kCheckpointFormat: return "CheckpointFormat";
    case ErrorKind::kDivergence: return "Divergence";
    case ErrorKind::kEmptyEvaluationSet: return "EmptyEvaluationSet";
    case ErrorKind::kManifestMismatch: return "ManifestMismatch";
    case ErrorKind::kParseError: return "ParseError";
    case ErrorKind::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace citetrend
