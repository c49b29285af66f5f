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

#ifndef ORIGINRANK_SELECTION_H_
#define ORIGINRANK_SELECTION_H_

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "originrank/corpus.h"
#include "originrank/rank_svm.h"

namespace originrank {

struct SelectionPolicy {
  enum class Mode { kTopK, kTopFraction, kThreshold };
  Mode mode = Mode::kTopFraction;
  std::size_t k = 1;
  double fraction = 0.5;
  double threshold = 0.5;

  static SelectionPolicy top_k(std::size_t k);
  static SelectionPolicy top_fraction(double fraction);
  static SelectionPolicy threshold_at(double tau);

  void validate() const;
  std::string describe() const;
};

struct SelectionEntry {
  std::string id;
  Label label = Label::kRecorded;
  double originality = 0.0;
  bool selected = false;
};

struct SelectionManifest {
  std::vector<SelectionEntry> entries;  // sorted by (-originality, id)
  SelectionPolicy policy;
  std::string model_hash;

  std::size_t selected_count(Label label) const;
};

// Orders by descending originality, then ascending id.
bool originality_order(const ScoredUtterance& a, const ScoredUtterance& b);

SelectionManifest select(std::span<const ScoredUtterance> scored, const SelectionPolicy& policy,
                         const std::string& model_hash = "");
// Re-applies a policy to an existing manifest's entries.
SelectionManifest select(const SelectionManifest& manifest, const SelectionPolicy& policy);

// Top and bottom ceil(fraction * n) synthetic items by originality.
std::pair<std::vector<ScoredUtterance>, std::vector<ScoredUtterance>> split_extremes(
    std::span<const ScoredUtterance> synthetic, double fraction);

// CSV with header id,label,originality,selected.
std::string selection_to_csv(const SelectionManifest& manifest);
std::string selection_sidecar_json(const SelectionManifest& manifest);

}  // namespace originrank

#endif  // ORIGINRANK_SELECTION_H_
