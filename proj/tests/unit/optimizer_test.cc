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

#include "originrank/optimizer.h"

#include <cmath>
#include <vector>

#include "test_util.h"

namespace originrank {
namespace {

TEST_CASE("first adam step moves each coordinate by about lr against the gradient sign") {
  Optimizer opt(OptimizerKind::kAdam, 0.01);
  std::vector<double> p = {1.0, -2.0, 0.5};
  const std::vector<double> g = {3.0, -0.1, 1e-3};
  opt.step(p, g);
  CHECK(p[0] == doctest::Approx(1.0 - 0.01 * 3.0 / (3.0 + 1e-8)));
  CHECK(p[1] == doctest::Approx(-2.0 + 0.01 * 0.1 / (0.1 + 1e-8)));
  CHECK(p[2] == doctest::Approx(0.5 - 0.01 * 1e-3 / (1e-3 + 1e-8)));
  CHECK(opt.steps_taken() == 1);
}

TEST_CASE("adam matches a hand-unrolled recursion") {
  Optimizer opt(OptimizerKind::kAdam, 0.05, 0.8, 0.9, 1e-6);
  double p = 2.0;
  double m = 0.0;
  double v = 0.0;
  std::vector<double> param = {2.0};
  for (int t = 1; t <= 20; ++t) {
    const double g = std::sin(t) + 0.3 * p;
    opt.step(param, std::vector<double>{g});
    m = 0.8 * m + 0.2 * g;
    v = 0.9 * v + 0.1 * g * g;
    p -= 0.05 * (m / (1 - std::pow(0.8, t))) / (std::sqrt(v / (1 - std::pow(0.9, t))) + 1e-6);
    CHECK(param[0] == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("rectified adam warms up with plain momentum steps") {
  Optimizer opt(OptimizerKind::kRectifiedAdam, 0.1);
  std::vector<double> p = {0.0};
  opt.step(p, std::vector<double>{2.0});
  // rho_1 = 1 <= 4: un-adapted step lr * m_hat with m_hat = g.
  CHECK(p[0] == doctest::Approx(-0.2));
  double rho_inf = 2.0 / (1.0 - 0.999) - 1.0;
  int first_adaptive = 0;
  for (int t = 1; t < 20 && first_adaptive == 0; ++t) {
    const double b = std::pow(0.999, t);
    if (rho_inf - 2.0 * t * b / (1.0 - b) > 4.0) first_adaptive = t;
  }
  CHECK(first_adaptive == 5);
}

TEST_CASE("both variants minimize a convex quadratic") {
  for (OptimizerKind kind : {OptimizerKind::kAdam, OptimizerKind::kRectifiedAdam}) {
    Optimizer opt(kind, 0.05);
    std::vector<double> p = {3.0, -4.0};
    for (int t = 0; t < 3000; ++t) {
      const std::vector<double> g = {2.0 * (p[0] - 1.0), 8.0 * (p[1] + 0.5)};
      opt.step(p, g);
    }
    CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(p[1] == doctest::Approx(-0.5).epsilon(1e-3));
  }
}

TEST_CASE("zero learning rate leaves parameters unchanged") {
  Optimizer opt(OptimizerKind::kAdam, 0.0);
  std::vector<double> p = {1.0, 2.0};
  opt.step(p, std::vector<double>{5.0, -5.0});
  CHECK(p == std::vector<double>{1.0, 2.0});
}

TEST_CASE("names and errors") {
  CHECK(parse_optimizer("adam") == OptimizerKind::kAdam);
  CHECK(parse_optimizer("radam") == OptimizerKind::kRectifiedAdam);
  CHECK(optimizer_name(OptimizerKind::kRectifiedAdam) == "radam");
  CHECK_ERRC(parse_optimizer("sgd"), Errc::kInvalidConfig);
  CHECK_ERRC(Optimizer(OptimizerKind::kAdam, -1.0), Errc::kInvalidConfig);
  Optimizer opt(OptimizerKind::kAdam, 0.1);
  std::vector<double> p(2);
  CHECK_ERRC(opt.step(p, std::vector<double>(3)), Errc::kDimMismatch);
}

}  // namespace
}  // namespace originrank
