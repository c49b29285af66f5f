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

#include "originrank/selection.h"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "originrank/error.h"
#include "originrank/io_util.h"

namespace originrank {

SelectionPolicy SelectionPolicy::top_k(std::size_t k) {
  SelectionPolicy p;
  p.mode = Mode::kTopK;
  p.k = k;
  return p;
}

SelectionPolicy SelectionPolicy::top_fraction(double fraction) {
  SelectionPolicy p;
  p.mode = Mode::kTopFraction;
  p.fraction = fraction;
  return p;
}

SelectionPolicy SelectionPolicy::threshold_at(double tau) {
  SelectionPolicy p;
  p.mode = Mode::kThreshold;
  p.threshold = tau;
  return p;
}

void SelectionPolicy::validate() const {
  switch (mode) {
    case Mode::kTopK:
      require(k >= 1, Errc::kInvalidConfig, "top_k needs k >= 1");
      break;
    case Mode::kTopFraction:
      require(fraction > 0.0 && fraction <= 1.0, Errc::kInvalidConfig,
              "top_fraction needs a fraction in (0, 1]");
      break;
    case Mode::kThreshold:
      require(threshold >= 0.0 && threshold <= 1.0, Errc::kInvalidConfig,
              "threshold must lie in [0, 1]");
      break;
  }
}

std::string SelectionPolicy::describe() const {
  switch (mode) {
    case Mode::kTopK:
      return "top_k(" + std::to_string(k) + ")";
    case Mode::kTopFraction:
      return "top_fraction(" + format_double(fraction) + ")";
    default:
      return "threshold(" + format_double(threshold) + ")";
  }
}

std::size_t SelectionManifest::selected_count(Label label) const {
  return static_cast<std::size_t>(std::count_if(
      entries.begin(), entries.end(),
      [&](const SelectionEntry& e) { return e.label == label && e.selected; }));
}

bool originality_order(const ScoredUtterance& a, const ScoredUtterance& b) {
  if (a.originality != b.originality) return a.originality > b.originality;
  return a.id < b.id;
}

SelectionManifest select(std::span<const ScoredUtterance> scored, const SelectionPolicy& policy,
                         const std::string& model_hash) {
  policy.validate();
  std::vector<ScoredUtterance> sorted(scored.begin(), scored.end());
  for (const auto& s : sorted) {
    require(s.originality >= 0.0 && s.originality <= 1.0, Errc::kOutOfRange,
            "originality of " + s.id + " is outside [0, 1]");
  }
  std::sort(sorted.begin(), sorted.end(), originality_order);
  const auto n_syn = static_cast<std::size_t>(std::count_if(
      sorted.begin(), sorted.end(),
      [](const ScoredUtterance& s) { return s.label == Label::kSynthetic; }));

  std::size_t quota = n_syn;
  if (policy.mode == SelectionPolicy::Mode::kTopK) {
    require(policy.k <= n_syn, Errc::kKTooLarge,
            "k = " + std::to_string(policy.k) + " exceeds " + std::to_string(n_syn) +
                " synthetic items");
    quota = policy.k;
  } else if (policy.mode == SelectionPolicy::Mode::kTopFraction) {
    quota = static_cast<std::size_t>(std::ceil(policy.fraction * static_cast<double>(n_syn)));
  }

  SelectionManifest out;
  out.policy = policy;
  out.model_hash = model_hash;
  std::size_t taken = 0;
  for (const auto& s : sorted) {
    bool keep = true;
    if (s.label == Label::kSynthetic) {
      if (policy.mode == SelectionPolicy::Mode::kThreshold) {
        keep = s.originality >= policy.threshold;
      } else {
        keep = taken < quota;
        if (keep) ++taken;
      }
    }
    out.entries.push_back({s.id, s.label, s.originality, keep});
  }
  return out;
}

SelectionManifest select(const SelectionManifest& manifest, const SelectionPolicy& policy) {
  std::vector<ScoredUtterance> scored;
  scored.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) {
    scored.push_back({e.id, e.label, 0.0, e.originality});
  }
  return select(scored, policy, manifest.model_hash);
}

std::pair<std::vector<ScoredUtterance>, std::vector<ScoredUtterance>> split_extremes(
    std::span<const ScoredUtterance> synthetic, double fraction) {
  require(fraction > 0.0 && fraction <= 0.5, Errc::kInvalidConfig,
          "extreme fraction must lie in (0, 0.5]");
  const std::size_t n = synthetic.size();
  const auto group = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
  const auto minimum = static_cast<std::size_t>(std::ceil(1.0 / fraction - 1e-12));
  require(n >= minimum && 2 * group <= n, Errc::kTooFewItems,
          "split_extremes needs at least " + std::to_string(std::max(minimum, 2 * group)) +
              " items, got " + std::to_string(n));
  std::vector<ScoredUtterance> sorted(synthetic.begin(), synthetic.end());
  std::sort(sorted.begin(), sorted.end(), originality_order);
  std::vector<ScoredUtterance> high(sorted.begin(),
                                    sorted.begin() + static_cast<std::ptrdiff_t>(group));
  std::vector<ScoredUtterance> low(sorted.end() - static_cast<std::ptrdiff_t>(group),
                                   sorted.end());
  return {std::move(high), std::move(low)};
}

std::string selection_to_csv(const SelectionManifest& manifest) {
  std::string out = "id,label,originality,selected\n";
  for (const auto& e : manifest.entries) {
    out += e.id + "," + std::string(label_name(e.label)) + "," + format_double(e.originality) +
           "," + (e.selected ? "1" : "0") + "\n";
  }
  return out;
}

std::string selection_sidecar_json(const SelectionManifest& manifest) {
  nlohmann::ordered_json j;
  j["policy"] = manifest.policy.describe();
  j["rank_model_hash"] = manifest.model_hash;
  j["selected_recorded"] = manifest.selected_count(Label::kRecorded);
  j["selected_synthetic"] = manifest.selected_count(Label::kSynthetic);
  j["total"] = manifest.entries.size();
  return j.dump(1) + "\n";
}

}  // namespace originrank
