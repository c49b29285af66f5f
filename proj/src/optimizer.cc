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
#include <string>

#include "originrank/error.h"

namespace originrank {

std::string_view optimizer_name(OptimizerKind kind) {
  return kind == OptimizerKind::kAdam ? "adam" : "radam";
}

OptimizerKind parse_optimizer(std::string_view text) {
  if (text == "adam") return OptimizerKind::kAdam;
  if (text == "radam") return OptimizerKind::kRectifiedAdam;
  throw Error(Errc::kInvalidConfig, "unknown optimizer '" + std::string(text) + "'");
}

Optimizer::Optimizer(OptimizerKind kind, double learning_rate, double beta1, double beta2,
                     double epsilon)
    : kind_(kind), lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {
  require(learning_rate >= 0.0, Errc::kInvalidConfig, "learning rate must be >= 0");
  require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0,
          Errc::kInvalidConfig, "optimizer betas must lie in [0, 1)");
}

void Optimizer::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != grad.size()) {
    throw Error(Errc::kDimMismatch, "optimizer: gradient size mismatch");
  }
  if (m_.empty()) {
    m_.assign(params.size(), 0.0);
    v_.assign(params.size(), 0.0);
  }
  ++t_;
  const double t = static_cast<double>(t_);
  const double bc1 = 1.0 - std::pow(beta1_, t);
  const double bc2 = 1.0 - std::pow(beta2_, t);

  bool adaptive = true;
  double rect = 1.0;
  if (kind_ == OptimizerKind::kRectifiedAdam) {
    const double rho_inf = 2.0 / (1.0 - beta2_) - 1.0;
    const double beta2_t = std::pow(beta2_, t);
    const double rho_t = rho_inf - 2.0 * t * beta2_t / (1.0 - beta2_t);
    if (rho_t > 4.0) {
      rect = std::sqrt((rho_t - 4.0) * (rho_t - 2.0) * rho_inf /
                       ((rho_inf - 4.0) * (rho_inf - 2.0) * rho_t));
    } else {
      adaptive = false;
    }
  }

  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    const double m_hat = m_[i] / bc1;
    if (adaptive) {
      const double v_hat = v_[i] / bc2;
      params[i] -= lr_ * rect * m_hat / (std::sqrt(v_hat) + eps_);
    } else {
      params[i] -= lr_ * m_hat;
    }
  }
}

}  // namespace originrank
