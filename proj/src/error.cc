// Copyright 2026 The OriginRank Authors.
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

#include "originrank/error.h"

namespace originrank {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kNotFound: return "NotFound";
    case Errc::kMalformedHeader: return "MalformedHeader";
    case Errc::kUnsupported: return "Unsupported";
    case Errc::kIoError: return "IoError";
    case Errc::kOutOfRange: return "OutOfRange";
    case Errc::kParseError: return "ParseError";
    case Errc::kDuplicateId: return "DuplicateId";
    case Errc::kMissingFile: return "MissingFile";
    case Errc::kLabelMismatch: return "LabelMismatch";
    case Errc::kInvalidConfig: return "InvalidConfig";
    case Errc::kTooShort: return "TooShort";
    case Errc::kTooFewFrames: return "TooFewFrames";
    case Errc::kDimMismatch: return "DimMismatch";
    case Errc::kTooFewSamples: return "TooFewSamples";
    case Errc::kMissingClass: return "MissingClass";
    case Errc::kEmptyOrderedSet: return "EmptyOrderedSet";
    case Errc::kGuardExceeded: return "GuardExceeded";
    case Errc::kDegeneratePopulation: return "DegeneratePopulation";
    case Errc::kBoundsUnset: return "BoundsUnset";
    case Errc::kKTooLarge: return "KTooLarge";
    case Errc::kTooFewItems: return "TooFewItems";
    case Errc::kLengthMismatch: return "LengthMismatch";
    case Errc::kTooFew: return "TooFew";
    case Errc::kEmptyClass: return "EmptyClass";
    case Errc::kDegenerateData: return "DegenerateData";
    case Errc::kPerplexityTooLarge: return "PerplexityTooLarge";
    case Errc::kNumericFailure: return "NumericFailure";
  }
  return "Unknown";
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::kInvalidConfig:
    case Errc::kPerplexityTooLarge:
    case Errc::kKTooLarge:
    case Errc::kGuardExceeded:
      return 2;
    case Errc::kNumericFailure:
    case Errc::kDegenerateData:
    case Errc::kDegeneratePopulation:
      return 4;
    default:
      return 3;
  }
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what),
      code_(code),
      message_(what) {}

}  // namespace originrank
