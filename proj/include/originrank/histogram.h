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

#ifndef ORIGINRANK_HISTOGRAM_H_
#define ORIGINRANK_HISTOGRAM_H_

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace originrank {

struct ClassHistogram {
  std::string name;
  std::vector<std::size_t> counts;
  std::vector<double> density;  // integrates to 1 over [0, 1]
};

struct Histogram {
  int bins = 0;
  double width = 0.0;
  std::vector<ClassHistogram> classes;

  double bin_lo(int b) const { return b * width; }
  double bin_hi(int b) const { return b == bins - 1 ? 1.0 : (b + 1) * width; }
};

using NamedScores = std::pair<std::string, std::vector<double>>;

// Equal-width bins over [0, 1]; the last bin is closed on the right.
Histogram histogram(std::span<const NamedScores> scores_by_class, int bins);

// Rows (class, bin_lo, bin_hi, count, density).
std::string histogram_csv(const Histogram& h);

}  // namespace originrank

#endif  // ORIGINRANK_HISTOGRAM_H_
