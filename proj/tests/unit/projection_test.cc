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
#include <numbers>
#include <random>

#include "test_util.h"

namespace originrank {
namespace {

RowMatrix gaussian_rows(Eigen::Index n, Eigen::Index d, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, scale);
  RowMatrix m(n, d);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

std::vector<std::string> ids_for(Eigen::Index n) {
  std::vector<std::string> ids;
  for (Eigen::Index i = 0; i < n; ++i) ids.push_back("u" + std::to_string(i));
  return ids;
}

// Eigenvalues of a symmetric 3x3 matrix from its characteristic polynomial,
// in descending order.
std::array<double, 3> cubic_eigenvalues(const Eigen::Matrix3d& a) {
  const double c2 = -a.trace();
  const double c1 = a(0, 0) * a(1, 1) + a(0, 0) * a(2, 2) + a(1, 1) * a(2, 2) -
                    a(0, 1) * a(1, 0) - a(0, 2) * a(2, 0) - a(1, 2) * a(2, 1);
  const double c0 = -a.determinant();
  // Depressed cubic t^3 + p t + q with x = t - c2 / 3.
  const double p = c1 - c2 * c2 / 3.0;
  const double q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
  const double r = 2.0 * std::sqrt(-p / 3.0);
  const double phi = std::acos(std::clamp(3.0 * q / (p * r), -1.0, 1.0)) / 3.0;
  std::array<double, 3> out;
  for (int k = 0; k < 3; ++k) {
    out[static_cast<std::size_t>(k)] = r * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0) - c2 / 3.0;
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

Eigen::Vector3d null_vector(const Eigen::Matrix3d& a, double lambda) {
  const Eigen::Matrix3d m = a - lambda * Eigen::Matrix3d::Identity();
  Eigen::Vector3d best = Eigen::Vector3d::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const Eigen::Vector3d c = m.row(i).transpose().cross(m.row(j).transpose());
      if (c.norm() > best.norm()) best = c;
    }
  }
  return best.normalized();
}

TEST_CASE("principal axes against a characteristic-polynomial oracle") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RowMatrix x = gaussian_rows(5, 3, seed);
    x.col(0) *= 3.0;
    x.col(2) *= 0.5;
    const Eigen::RowVector3d mean = x.colwise().mean();
    const Eigen::MatrixXd c = x.rowwise() - mean;
    const Eigen::Matrix3d cov = c.transpose() * c / 4.0;
    const auto ev = cubic_eigenvalues(cov);
    const PrincipalAxes axes = principal_axes(x, 1e-13);
    CHECK(axes.eigenvalue[0] == doctest::Approx(ev[0]).epsilon(1e-8));
    CHECK(axes.eigenvalue[1] == doctest::Approx(ev[1]).epsilon(1e-8));
    for (int k = 0; k < 2; ++k) {
      const Eigen::Vector3d v = null_vector(cov, ev[static_cast<std::size_t>(k)]);
      CHECK(std::abs(std::abs(v.dot(axes.axis[k])) - 1.0) < 1e-8);
      Eigen::Index arg = 0;
      axes.axis[k].cwiseAbs().maxCoeff(&arg);
      CHECK(axes.axis[k](arg) > 0.0);
    }
    // Residual after projecting onto two axes equals (n - 1) times the smallest eigenvalue.
    const Projection2D p = pca_project(x, ids_for(5));
    const Eigen::MatrixXd recon = p.points.col(0) * axes.axis[0].transpose() +
                                  p.points.col(1) * axes.axis[1].transpose();
    const double err = (c - recon).squaredNorm();
    CHECK(std::abs(err - 4.0 * ev[2]) < 1e-8 * std::max(1.0, c.squaredNorm()));
    CHECK(p.variance[0] >= p.variance[1]);
  }
}

TEST_CASE("pca on collinear data and error cases") {
  RowMatrix line(30, 4);
  for (int i = 0; i < 30; ++i) {
    for (int j = 0; j < 4; ++j) line(i, j) = (i - 7.5) * (j + 1.0);
  }
  const Projection2D p = pca_project(line, ids_for(30));
  CHECK(p.variance[1] <= 1e-9 * p.variance[0]);
  const double var2 = p.points.col(1).squaredNorm() / 29.0;
  CHECK(var2 <= 1e-9 * p.variance[0]);
  CHECK_ERRC(pca_project(RowMatrix::Constant(5, 3, 2.0), ids_for(5)), Errc::kDegenerateData);
  CHECK_ERRC(pca_project(gaussian_rows(2, 3, 1), ids_for(2)), Errc::kTooFewSamples);
  CHECK_ERRC(pca_project(gaussian_rows(5, 3, 1), ids_for(4)), Errc::kDimMismatch);
}

TEST_CASE("conditional affinities match the target perplexity") {
  const RowMatrix x = gaussian_rows(60, 5, 3);
  std::vector<double> p;
  for (double perp : {5.0, 15.0}) {
    CHECK(conditional_affinities(x, perp, p, Exec::kSerial) == 0);
    for (int i = 0; i < 60; ++i) {
      double sum = 0.0;
      double h = 0.0;
      for (int j = 0; j < 60; ++j) {
        const double v = p[static_cast<std::size_t>(i * 60 + j)];
        if (i == j) CHECK(v == 0.0);
        sum += v;
        if (v > 0.0) h -= v * std::log2(v);
      }
      CHECK(std::abs(sum - 1.0) < 1e-12);
      CHECK(std::abs(h - std::log2(perp)) < 1e-4);
    }
  }
  const std::vector<double> joint = joint_affinities(x, 15.0);
  double total = 0.0;
  for (int i = 0; i < 60; ++i) {
    for (int j = 0; j < 60; ++j) {
      total += joint[static_cast<std::size_t>(i * 60 + j)];
      CHECK(joint[static_cast<std::size_t>(i * 60 + j)] == joint[static_cast<std::size_t>(j * 60 + i)]);
    }
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("t-SNE separates two clusters") {
  RowMatrix x = gaussian_rows(60, 8, 4);
  for (int i = 0; i < 30; ++i) x(i, 0) += 10.0;
  TsneConfig cfg;
  cfg.iterations = 500;
  cfg.seed = 5;
  const Projection2D p = tsne_project(x, ids_for(60), cfg);
  CHECK(p.final_kl < p.initial_kl);
  CHECK(p.unconverged_points == 0);

  // Lloyd's 2-means seeded at the two points farthest apart.
  Eigen::Index a = 0;
  Eigen::Index b = 0;
  double far = -1.0;
  for (Eigen::Index i = 0; i < 60; ++i) {
    for (Eigen::Index j = i + 1; j < 60; ++j) {
      const double d = (p.points.row(i) - p.points.row(j)).squaredNorm();
      if (d > far) {
        far = d;
        a = i;
        b = j;
      }
    }
  }
  Eigen::RowVector2d ca = p.points.row(a);
  Eigen::RowVector2d cb = p.points.row(b);
  std::vector<int> assign(60);
  for (int iter = 0; iter < 50; ++iter) {
    Eigen::RowVector2d sa = Eigen::RowVector2d::Zero();
    Eigen::RowVector2d sb = Eigen::RowVector2d::Zero();
    int na = 0;
    for (int i = 0; i < 60; ++i) {
      assign[static_cast<std::size_t>(i)] =
          (p.points.row(i) - ca).squaredNorm() <= (p.points.row(i) - cb).squaredNorm() ? 0 : 1;
      if (assign[static_cast<std::size_t>(i)] == 0) {
        sa += p.points.row(i);
        ++na;
      } else {
        sb += p.points.row(i);
      }
    }
    if (na == 0 || na == 60) break;
    ca = sa / na;
    cb = sb / (60 - na);
  }
  int agree = 0;
  for (int i = 0; i < 60; ++i) agree += assign[static_cast<std::size_t>(i)] == (i < 30 ? 0 : 1);
  CHECK(std::max(agree, 60 - agree) >= 57);

  const Projection2D again = tsne_project(x, ids_for(60), cfg);
  CHECK(again.points == p.points);
  const Projection2D serial = tsne_project(x, ids_for(60), cfg, Exec::kSerial);
  CHECK(serial.points == p.points);
}

TEST_CASE("t-SNE preconditions") {
  TsneConfig cfg;
  cfg.iterations = 10;
  CHECK_ERRC(tsne_project(gaussian_rows(9, 3, 1), ids_for(9), cfg), Errc::kTooFewSamples);
  cfg.perplexity = 10.0;
  CHECK_ERRC(tsne_project(gaussian_rows(31, 3, 1), ids_for(31), cfg), Errc::kPerplexityTooLarge);
  CHECK_NOTHROW(tsne_project(gaussian_rows(32, 3, 1), ids_for(32), cfg));
  cfg.learning_rate = 0.0;
  CHECK_ERRC(tsne_project(gaussian_rows(40, 3, 1), ids_for(40), cfg), Errc::kInvalidConfig);
  // Identical points fall back to a random start.
  cfg = TsneConfig{};
  cfg.iterations = 20;
  cfg.perplexity = 3.0;
  const Projection2D p = tsne_project(RowMatrix::Constant(12, 3, 1.0), ids_for(12), cfg);
  CHECK(p.points.allFinite());
}

TEST_CASE("projection csv") {
  const Projection2D p = pca_project(gaussian_rows(4, 3, 6), ids_for(4));
  const std::vector<std::string> labels = {"recorded", "recorded", "synthetic", "synthetic"};
  const std::string csv = projection_csv(p, labels);
  CHECK(csv.rfind("id,label,method,x,y\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(csv.find("u2,synthetic,pca,") != std::string::npos);
  CHECK_ERRC(projection_csv(p, std::vector<std::string>{"recorded"}), Errc::kDimMismatch);
}

}  // namespace
}  // namespace originrank
