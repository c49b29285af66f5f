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

#ifndef ORIGINRANK_ERROR_H_
#define ORIGINRANK_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace originrank {

enum class Errc {
  // I/O and corpus.
  kNotFound,
  kMalformedHeader,
  kUnsupported,
  kIoError,
  kOutOfRange,
  kParseError,
  kDuplicateId,
  kMissingFile,
  kLabelMismatch,
  kInvalidConfig,
  // Features.
  kTooShort,
  kTooFewFrames,
  // Models.
  kDimMismatch,
  kTooFewSamples,
  kMissingClass,
  kEmptyOrderedSet,
  kGuardExceeded,
  kDegeneratePopulation,
  kBoundsUnset,
  // Selection and metrics.
  kKTooLarge,
  kTooFewItems,
  kLengthMismatch,
  kTooFew,
  kEmptyClass,
  // Projections.
  kDegenerateData,
  kPerplexityTooLarge,
  kNumericFailure,
};

std::string_view errc_name(Errc code);

// Process exit code for a failure of this kind: 2 config, 3 data, 4 numeric.
int exit_code_for(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }
  // The message without the error-kind prefix carried by what().
  const std::string& message() const noexcept { return message_; }

 private:
  Errc code_;
  std::string message_;
};

// Throws Error(code, message) unless cond holds.
inline void require(bool cond, Errc code, const std::string& message) {
  if (!cond) throw Error(code, message);
}

}  // namespace originrank

#endif  // ORIGINRANK_ERROR_H_
