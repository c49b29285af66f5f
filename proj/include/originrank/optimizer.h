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

#ifndef ORIGINRANK_OPTIMIZER_H_
#define ORIGINRANK_OPTIMIZER_H_

#include <span>
#include <string_view>
#include <vector>

namespace originrank {

enum class OptimizerKind { kAdam, kRectifiedAdam };

std::string_view optimizer_name(OptimizerKind kind);
OptimizerKind parse_optimizer(std::string_view text);

// Adam with bias correction, optionally with the variance rectification of
// Liu et al. (RAdam). State is sized on the first step.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double learning_rate, double beta1 = 0.9,
            double beta2 = 0.999, double epsilon = 1e-8);

  void step(std::span<double> params, std::span<const double> grad);
  long long steps_taken() const { return t_; }

 private:
  OptimizerKind kind_;
  double lr_;
  double beta1_;
  double beta2_;
  double eps_;
  long long t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

}  // namespace originrank

#endif  // ORIGINRANK_OPTIMIZER_H_
