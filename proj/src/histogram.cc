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

#include "originrank/histogram.h"

#include <algorithm>
#include <cmath>

#include "originrank/error.h"
#include "originrank/io_util.h"

namespace originrank {

Histogram histogram(std::span<const NamedScores> scores_by_class, int bins) {
  require(bins >= 2, Errc::kInvalidConfig, "histogram needs at least 2 bins");
  Histogram h;
  h.bins = bins;
  h.width = 1.0 / bins;
  for (const auto& [name, scores] : scores_by_class) {
    require(!scores.empty(), Errc::kEmptyClass, "class '" + name + "' has no scores");
    ClassHistogram c;
    c.name = name;
    c.counts.assign(static_cast<std::size_t>(bins), 0);
    for (double s : scores) {
      require(s >= 0.0 && s <= 1.0, Errc::kOutOfRange,
              "score " + format_double(s) + " is outside [0, 1]");
      const int b = std::min(bins - 1, static_cast<int>(std::floor(s * bins)));
      ++c.counts[static_cast<std::size_t>(b)];
    }
    const double total = static_cast<double>(scores.size());
    c.density.resize(c.counts.size());
    for (std::size_t b = 0; b < c.counts.size(); ++b) {
      c.density[b] = static_cast<double>(c.counts[b]) / (total * h.width);
    }
    h.classes.push_back(std::move(c));
  }
  return h;
}

std::string histogram_csv(const Histogram& h) {
  std::string out = "class,bin_lo,bin_hi,count,density\n";
  for (const auto& c : h.classes) {
    for (int b = 0; b < h.bins; ++b) {
      const auto k = static_cast<std::size_t>(b);
      out += c.name + "," + format_double(h.bin_lo(b)) + "," + format_double(h.bin_hi(b)) +
             "," + std::to_string(c.counts[k]) + "," + format_double(c.density[k]) + "\n";
    }
  }
  return out;
}

}  // namespace originrank
