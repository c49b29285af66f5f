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

#ifndef ORIGINRANK_CORPUS_H_
#define ORIGINRANK_CORPUS_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace originrank {

enum class Label { kRecorded, kSynthetic };

std::string_view label_name(Label label);
// Accepts "recorded" / "synthetic"; anything else is a ParseError.
Label parse_label(std::string_view text);

// One manifest line. A synthetic utterance produced by the simulator also
// names the clean base signal it was degraded from, so distortion metrics
// can be computed on a time-aligned pair.
struct UtteranceRecord {
  std::string id;
  Label label = Label::kRecorded;
  std::string path;
  int sample_rate = 0;
  std::optional<double> degradation;
  std::optional<std::string> base_id;
  std::optional<std::string> base_path;
};

struct CorpusIndex {
  std::vector<UtteranceRecord> records;
  std::filesystem::path root;

  std::size_t count(Label label) const;
  bool has_both_classes() const {
    return count(Label::kRecorded) > 0 && count(Label::kSynthetic) > 0;
  }
  std::filesystem::path resolve(const std::string& relative) const {
    return root / relative;
  }
  // Index of the record with this id, or npos.
  std::size_t find(std::string_view id) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

// Parses a JSON-lines manifest. Paths are resolved against the manifest's
// directory and must exist.
CorpusIndex scan_corpus(const std::filesystem::path& manifest_path);

// Checks every CorpusIndex invariant except file existence.
void validate_records(const std::vector<UtteranceRecord>& records);

std::string manifest_line(const UtteranceRecord& record);
void write_manifest(const CorpusIndex& index,
                    const std::filesystem::path& manifest_path);

}  // namespace originrank

#endif  // ORIGINRANK_CORPUS_H_
