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

#include <random>

#include "test_util.h"

namespace originrank {
namespace {

double integral(const Histogram& h, std::size_t c) {
  double s = 0.0;
  for (int b = 0; b < h.bins; ++b) s += h.classes[c].density[static_cast<std::size_t>(b)] * (h.bin_hi(b) - h.bin_lo(b));
  return s;
}

TEST_CASE("constant scores fall into one bin") {
  const std::vector<NamedScores> in = {{"synthetic", std::vector<double>(7, 0.5)}};
  const Histogram h = histogram(in, 10);
  REQUIRE(h.classes.size() == 1);
  for (int b = 0; b < 10; ++b) {
    CHECK(h.classes[0].density[static_cast<std::size_t>(b)] == doctest::Approx(b == 5 ? 10.0 : 0.0));
  }
}

TEST_CASE("edges") {
  const std::vector<NamedScores> in = {{"a", {0.0, 1.0, 0.1, 0.999999}}};
  const Histogram h = histogram(in, 10);
  CHECK(h.classes[0].counts[0] == 1);
  CHECK(h.classes[0].counts[1] == 1);
  CHECK(h.classes[0].counts[9] == 2);
  CHECK(h.bin_hi(9) == 1.0);
  CHECK_ERRC(histogram(std::vector<NamedScores>{{"a", {}}}, 10), Errc::kEmptyClass);
  CHECK_ERRC(histogram(std::vector<NamedScores>{{"a", {1.01}}}, 10), Errc::kOutOfRange);
  CHECK_ERRC(histogram(in, 1), Errc::kInvalidConfig);
}

TEST_CASE("densities integrate to one") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> a(static_cast<std::size_t>(1 + t * 3));
    std::vector<double> b(static_cast<std::size_t>(2 + t));
    for (double& v : a) v = unit(rng) * unit(rng);
    for (double& v : b) v = unit(rng);
    const std::vector<NamedScores> in = {{"recorded", a}, {"synthetic", b}};
    for (int bins : {2, 7, 20, 64}) {
      const Histogram h = histogram(in, bins);
      REQUIRE(h.classes.size() == 2);
      for (std::size_t c = 0; c < 2; ++c) {
        CHECK(std::abs(integral(h, c) - 1.0) <= 1e-9);
        std::size_t total = 0;
        for (std::size_t k = 0; k < h.classes[c].counts.size(); ++k) {
          CHECK(h.classes[c].density[k] >= 0.0);
          total += h.classes[c].counts[k];
        }
        CHECK(total == in[c].second.size());
      }
    }
  }
}

TEST_CASE("uniform samples give flat densities") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> s(100000);
  for (double& v : s) v = unit(rng);
  const Histogram h = histogram(std::vector<NamedScores>{{"u", s}}, 20);
  for (double d : h.classes[0].density) CHECK(std::abs(d - 1.0) <= 0.1);
}

TEST_CASE("csv rows") {
  const Histogram h = histogram(std::vector<NamedScores>{{"recorded", {0.2, 0.9}}, {"synthetic", {0.1}}}, 4);
  const std::string csv = histogram_csv(h);
  CHECK(csv.rfind("class,bin_lo,bin_hi,count,density\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
  CHECK(csv.find("recorded,0,0.25,1,2\n") != std::string::npos);
  CHECK(csv.find("synthetic,0.75,1,0,0\n") != std::string::npos);
}

}  // namespace
}  // namespace originrank
