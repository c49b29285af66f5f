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

#ifndef ORIGINRANK_PROJECTION_H_
#define ORIGINRANK_PROJECTION_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "originrank/kernels.h"
#include "originrank/matrix.h"

namespace originrank {

enum class ProjectionMethod { kPca, kTsne };

std::string_view projection_name(ProjectionMethod method);

struct Projection2D {
  std::vector<std::string> ids;
  RowMatrix points;  // n x 2
  ProjectionMethod method = ProjectionMethod::kPca;
  double final_kl = 0.0;    // t-SNE only
  double initial_kl = 0.0;  // t-SNE only, at the first iteration
  std::size_t unconverged_points = 0;  // t-SNE bandwidth searches that missed tolerance
  double variance[2] = {0.0, 0.0};     // PCA only, eigenvalues of the covariance
};

struct PrincipalAxes {
  Eigen::VectorXd mean;
  Eigen::VectorXd axis[2];
  double eigenvalue[2] = {0.0, 0.0};
};

// Top two eigenpairs of the sample covariance by power iteration with
// deflation; each axis is signed so its largest-magnitude loading is positive.
PrincipalAxes principal_axes(const RowMatrix& features, double tol = 1e-10);

Projection2D pca_project(const RowMatrix& features, std::vector<std::string> ids);

struct TsneConfig {
  double perplexity = 15.0;
  int iterations = 1000;
  double learning_rate = 100.0;
  double early_exaggeration = 4.0;
  int exaggeration_iters = 100;
  int momentum_switch_iter = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  std::uint64_t seed = 0;

  void validate() const;
};

constexpr int kPerplexitySearchSteps = 50;
constexpr double kPerplexityTolerance = 1e-4;

// Row-stochastic conditional probabilities p_{j|i} whose entropy (bits)
// matches log2(perplexity). Returns the number of rows that missed the
// tolerance after the search budget.
std::size_t conditional_affinities(const RowMatrix& features, double perplexity,
                                   std::vector<double>& p, Exec exec = Exec::kParallel);

// Symmetrized joint affinities (p_{j|i} + p_{i|j}) / 2n.
std::vector<double> joint_affinities(const RowMatrix& features, double perplexity,
                                     std::size_t* unconverged = nullptr,
                                     Exec exec = Exec::kParallel);

Projection2D tsne_project(const RowMatrix& features, std::vector<std::string> ids,
                          const TsneConfig& config, Exec exec = Exec::kParallel);

// Header id,label,method,x,y; labels align with projection.ids.
std::string projection_csv(const Projection2D& projection,
                           std::span<const std::string> labels);

}  // namespace originrank

#endif  // ORIGINRANK_PROJECTION_H_
