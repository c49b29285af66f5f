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

#include "originrank/projection.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "originrank/error.h"
#include "originrank/io_util.h"

namespace originrank {

namespace {

constexpr int kPowerMaxIterations = 100000;

void sign_fix(Eigen::VectorXd& v) {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v[arg] < 0.0) v = -v;
}

// Dominant eigenvector of the symmetric PSD matrix c restricted to the
// complement of `against` (if given).
Eigen::VectorXd power_iterate(const Eigen::MatrixXd& c, const Eigen::VectorXd* against,
                              double tol, double scale) {
  const Eigen::Index d = c.rows();
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = 1.0 + 0.1 * static_cast<double>(i);
  auto project = [&](Eigen::VectorXd& x) {
    if (against != nullptr) x -= against->dot(x) * (*against);
  };
  project(v);
  v.normalize();
  for (int it = 0; it < kPowerMaxIterations; ++it) {
    Eigen::VectorXd next = c * v;
    project(next);
    const double norm = next.norm();
    if (norm <= 1e-14 * scale) return v;  // null space: any orthogonal unit vector
    next /= norm;
    if (next.dot(v) < 0.0) next = -next;
    const double change = (next - v).norm();
    v = next;
    if (change < tol) break;
  }
  return v;
}

}  // namespace

std::string_view projection_name(ProjectionMethod method) {
  return method == ProjectionMethod::kPca ? "pca" : "tsne";
}

PrincipalAxes principal_axes(const RowMatrix& features, double tol) {
  require(features.rows() >= 3, Errc::kTooFewSamples, "PCA needs at least 3 points");
  require(features.cols() >= 2, Errc::kDimMismatch, "PCA needs at least 2 dimensions");
  PrincipalAxes out;
  out.mean = features.colwise().mean().transpose();
  const Eigen::MatrixXd centered = features.rowwise() - out.mean.transpose();
  const Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(features.rows() - 1);
  const double scale = cov.trace();
  require(std::isfinite(scale), Errc::kNumericFailure, "non-finite covariance");
  require(scale > 0.0, Errc::kDegenerateData, "data has zero variance");

  out.axis[0] = power_iterate(cov, nullptr, tol, scale);
  out.eigenvalue[0] = out.axis[0].dot(cov * out.axis[0]);
  const Eigen::MatrixXd deflated =
      cov - out.eigenvalue[0] * out.axis[0] * out.axis[0].transpose();
  out.axis[1] = power_iterate(deflated, &out.axis[0], tol, scale);
  out.eigenvalue[1] = std::max(0.0, out.axis[1].dot(cov * out.axis[1]));
  sign_fix(out.axis[0]);
  sign_fix(out.axis[1]);
  return out;
}

Projection2D pca_project(const RowMatrix& features, std::vector<std::string> ids) {
  require(ids.size() == static_cast<std::size_t>(features.rows()), Errc::kDimMismatch,
          "ids do not match the feature rows");
  const PrincipalAxes axes = principal_axes(features);
  Projection2D p;
  p.ids = std::move(ids);
  p.method = ProjectionMethod::kPca;
  p.points.resize(features.rows(), 2);
  const Eigen::MatrixXd centered = features.rowwise() - axes.mean.transpose();
  p.points.col(0) = centered * axes.axis[0];
  p.points.col(1) = centered * axes.axis[1];
  p.variance[0] = axes.eigenvalue[0];
  p.variance[1] = axes.eigenvalue[1];
  return p;
}

void TsneConfig::validate() const {
  require(perplexity > 0.0, Errc::kInvalidConfig, "perplexity must be positive");
  require(iterations >= 1, Errc::kInvalidConfig, "t-SNE iterations must be >= 1");
  require(learning_rate > 0.0, Errc::kInvalidConfig, "t-SNE learning rate must be positive");
  require(early_exaggeration >= 1.0, Errc::kInvalidConfig, "early exaggeration must be >= 1");
  require(exaggeration_iters >= 0 && momentum_switch_iter >= 0, Errc::kInvalidConfig,
          "t-SNE schedule iterations must be >= 0");
}

std::size_t conditional_affinities(const RowMatrix& features, double perplexity,
                                   std::vector<double>& p, Exec exec) {
  const auto n = static_cast<std::size_t>(features.rows());
  const auto dim = static_cast<std::size_t>(features.cols());
  std::vector<double> d2(n * n);
  pairwise_sq_dists({features.data(), n * dim}, dim, d2, exec);
  p.assign(n * n, 0.0);
  const double target = std::log2(perplexity);
  std::vector<std::uint8_t> missed(n, 0);

  parallel_for(n, exec, [&](std::size_t i) {
    const double* row = d2.data() + i * n;
    double* out = p.data() + i * n;
    double shift = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) shift = std::min(shift, row[j]);
    }
    double beta = 1.0;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    bool ok = false;
    for (int step = 0; step < kPerplexitySearchSteps; ++step) {
      double sum = 0.0;
      double weighted = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) {
          out[j] = 0.0;
          continue;
        }
        const double e = std::exp(-beta * (row[j] - shift));
        out[j] = e;
        sum += e;
        weighted += e * (row[j] - shift);
      }
      // Entropy in bits of p_{j|i} = e_j / sum.
      const double entropy = (std::log(sum) + beta * weighted / sum) / std::log(2.0);
      for (std::size_t j = 0; j < n; ++j) out[j] /= sum;
      const double diff = entropy - target;
      if (std::abs(diff) < kPerplexityTolerance) {
        ok = true;
        break;
      }
      if (diff > 0.0) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = 0.5 * (beta + lo);
      }
    }
    missed[i] = ok ? 0 : 1;
  });
  std::size_t count = 0;
  for (auto m : missed) count += m;
  return count;
}

std::vector<double> joint_affinities(const RowMatrix& features, double perplexity,
                                     std::size_t* unconverged, Exec exec) {
  std::vector<double> cond;
  const std::size_t missed = conditional_affinities(features, perplexity, cond, exec);
  if (unconverged != nullptr) *unconverged = missed;
  const auto n = static_cast<std::size_t>(features.rows());
  std::vector<double> p(n * n);
  const double scale = 1.0 / (2.0 * static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      p[i * n + j] = (cond[i * n + j] + cond[j * n + i]) * scale;
    }
  }
  return p;
}

Projection2D tsne_project(const RowMatrix& features, std::vector<std::string> ids,
                          const TsneConfig& config, Exec exec) {
  config.validate();
  const auto n = static_cast<std::size_t>(features.rows());
  require(ids.size() == n, Errc::kDimMismatch, "ids do not match the feature rows");
  require(n >= 10, Errc::kTooFewSamples, "t-SNE needs at least 10 points");
  const double limit = (static_cast<double>(n) - 1.0) / 3.0;
  if (!(config.perplexity < limit)) {
    throw Error(Errc::kPerplexityTooLarge, "perplexity " + format_double(config.perplexity) +
                                               " must be below (n - 1) / 3 = " +
                                               format_double(limit));
  }

  Projection2D out;
  out.method = ProjectionMethod::kTsne;
  const std::vector<double> p = joint_affinities(features, config.perplexity,
                                                 &out.unconverged_points, exec);

  // PCA start, scaled so the first coordinate has standard deviation 1e-4.
  std::vector<double> y(2 * n);
  {
    Projection2D init;
    try {
      init = pca_project(features, ids);
    } catch (const Error& e) {
      if (e.code() != Errc::kDegenerateData) throw;
      std::mt19937_64 rng(config.seed);
      std::normal_distribution<double> gauss(0.0, 1.0);
      init.points.resize(static_cast<Eigen::Index>(n), 2);
      for (Eigen::Index i = 0; i < init.points.size(); ++i) init.points.data()[i] = gauss(rng);
    }
    const Eigen::VectorXd c0 = init.points.col(0);
    const double sd = std::sqrt((c0.array() - c0.mean()).square().sum() /
                                static_cast<double>(n));
    const double s = sd > 0.0 ? 1e-4 / sd : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      y[2 * i] = init.points(static_cast<Eigen::Index>(i), 0) * s;
      y[2 * i + 1] = init.points(static_cast<Eigen::Index>(i), 1) * s;
    }
  }

  std::vector<double> grad(2 * n);
  std::vector<double> update(2 * n, 0.0);
  std::vector<double> gains(2 * n, 1.0);
  out.initial_kl = tsne_kl(p, y, exec);
  for (int it = 0; it < config.iterations; ++it) {
    const double exaggeration = it < config.exaggeration_iters ? config.early_exaggeration : 1.0;
    const double momentum =
        it < config.momentum_switch_iter ? config.initial_momentum : config.final_momentum;
    tsne_gradient(p, y, exaggeration, grad, exec);
    for (std::size_t k = 0; k < y.size(); ++k) {
      const bool same_sign = (grad[k] > 0.0) == (update[k] > 0.0);
      gains[k] = same_sign ? std::max(gains[k] * 0.8, 0.01) : gains[k] + 0.2;
      update[k] = momentum * update[k] - config.learning_rate * gains[k] * grad[k];
      y[k] += update[k];
    }
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mx += y[2 * i];
      my += y[2 * i + 1];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[2 * i] -= mx;
      y[2 * i + 1] -= my;
    }
  }
  for (double v : y) require(std::isfinite(v), Errc::kNumericFailure, "t-SNE diverged");
  out.final_kl = tsne_kl(p, y, exec);
  out.ids = std::move(ids);
  out.points.resize(static_cast<Eigen::Index>(n), 2);
  std::copy(y.begin(), y.end(), out.points.data());
  return out;
}

std::string projection_csv(const Projection2D& projection,
                           std::span<const std::string> labels) {
  require(labels.size() == projection.ids.size(), Errc::kDimMismatch,
          "labels do not match the projection");
  std::string out = "id,label,method,x,y\n";
  const std::string method(projection_name(projection.method));
  for (std::size_t i = 0; i < projection.ids.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out += projection.ids[i] + "," + labels[i] + "," + method + "," +
           format_double(projection.points(r, 0)) + "," +
           format_double(projection.points(r, 1)) + "\n";
  }
  return out;
}

}  // namespace originrank
