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

#include "originrank/kernels.h"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "originrank/simulator.h"
#include "test_util.h"

namespace originrank {
namespace {

std::vector<double> random_values(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (double& x : v) x = g(rng);
  return v;
}

std::vector<double> random_affinities(std::size_t n, unsigned seed) {
  const std::vector<double> raw = random_values(n * n, seed);
  std::vector<double> p(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      p[i * n + j] = i == j ? 0.0 : std::abs(raw[i * n + j]) + std::abs(raw[j * n + i]);
    }
  }
  double total = 0.0;
  for (double v : p) total += v;
  for (double& v : p) v /= total;
  return p;
}

struct ThreadScope {
  explicit ThreadScope(int n) { set_num_threads(n); }
  ~ThreadScope() { set_num_threads(0); }
};

TEST_CASE("parallel_for visits every index once and rethrows") {
  ThreadScope threads(4);
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), Exec::kParallel, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(100, Exec::kParallel,
                               [](std::size_t i) {
                                 if (i == 37) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}

TEST_CASE("score batch equals direct dot products on both paths") {
  ThreadScope threads(4);
  const std::vector<double> w = random_values(7, 1);
  const std::vector<double> x = random_values(7 * 301, 2);
  const std::vector<double> serial = score_batch(w, x, Exec::kSerial);
  const std::vector<double> parallel = score_batch(w, x, Exec::kParallel);
  CHECK(serial == parallel);
  for (std::size_t i = 0; i < 301; ++i) {
    double acc = 0.0;
    for (std::size_t d = 0; d < 7; ++d) acc += w[d] * x[i * 7 + d];
    CHECK(serial[i] == doctest::Approx(acc).epsilon(1e-12));
  }
  CHECK_ERRC(score_batch(w, std::vector<double>(8), Exec::kSerial), Errc::kDimMismatch);
}

TEST_CASE("pairwise distances") {
  ThreadScope threads(3);
  const std::size_t n = 57;
  const std::size_t dim = 5;
  const std::vector<double> x = random_values(n * dim, 3);
  std::vector<double> a(n * n);
  std::vector<double> b(n * n);
  pairwise_sq_dists(x, dim, a, Exec::kSerial);
  pairwise_sq_dists(x, dim, b, Exec::kParallel);
  CHECK(a == b);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(a[i * n + i] == 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double d = x[i * dim + k] - x[j * dim + k];
        d2 += d * d;
      }
      CHECK(a[i * n + j] == doctest::Approx(d2).epsilon(1e-12));
      CHECK(a[i * n + j] == a[j * n + i]);
    }
  }
}

// Direct evaluation of KL(P||Q) for finite differences.
double kl_direct(const std::vector<double>& p, const std::vector<double>& y, double exag) {
  const std::size_t n = y.size() / 2;
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double dx = y[2 * i] - y[2 * j];
      const double dy = y[2 * i + 1] - y[2 * j + 1];
      z += 1.0 / (1.0 + dx * dx + dy * dy);
    }
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || p[i * n + j] == 0.0) continue;
      const double dx = y[2 * i] - y[2 * j];
      const double dy = y[2 * i + 1] - y[2 * j + 1];
      const double q = 1.0 / (1.0 + dx * dx + dy * dy) / z;
      const double pij = exag * p[i * n + j];
      kl += pij * std::log(pij / q);
    }
  }
  return kl;
}

TEST_CASE("t-SNE gradient is the derivative of the KL divergence") {
  ThreadScope threads(4);
  const std::size_t n = 23;
  const std::vector<double> p = random_affinities(n, 4);
  std::vector<double> y = random_values(n * 2, 5);
  std::vector<double> gs(n * 2);
  std::vector<double> gp(n * 2);
  const double zs = tsne_gradient(p, y, 1.0, gs, Exec::kSerial);
  const double zp = tsne_gradient(p, y, 1.0, gp, Exec::kParallel);
  CHECK(zs == zp);
  CHECK(gs == gp);
  CHECK(tsne_kl(p, y, Exec::kSerial) == tsne_kl(p, y, Exec::kParallel));
  CHECK(tsne_kl(p, y, Exec::kSerial) == doctest::Approx(kl_direct(p, y, 1.0)).epsilon(1e-10));
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double h = 1e-6;
    const double orig = y[k];
    y[k] = orig + h;
    const double up = kl_direct(p, y, 1.0);
    y[k] = orig - h;
    const double down = kl_direct(p, y, 1.0);
    y[k] = orig;
    CHECK(gs[k] == doctest::Approx((up - down) / (2 * h)).epsilon(1e-5).scale(1e-3));
  }
  // Exaggeration scales only the attractive part: the difference of the two
  // gradients equals (a - 1) times the attractive term.
  std::vector<double> g4(n * 2);
  tsne_gradient(p, y, 4.0, g4, Exec::kSerial);
  for (std::size_t i = 0; i < n; ++i) {
    double ax = 0.0;
    double ay = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double dx = y[2 * i] - y[2 * j];
      const double dy = y[2 * i + 1] - y[2 * j + 1];
      const double num = 1.0 / (1.0 + dx * dx + dy * dy);
      ax += 4.0 * p[i * n + j] * num * dx;
      ay += 4.0 * p[i * n + j] * num * dy;
    }
    CHECK(g4[2 * i] - gs[2 * i] == doctest::Approx(3.0 * ax).epsilon(1e-9).scale(1e-6));
    CHECK(g4[2 * i + 1] - gs[2 * i + 1] == doctest::Approx(3.0 * ay).epsilon(1e-9).scale(1e-6));
  }
}

TEST_CASE("feature extraction and pooling are identical on both paths") {
  ThreadScope threads(4);
  SimConfig sim;
  sim.n_recorded = 3;
  sim.n_synthetic = 3;
  sim.duration_min = 0.3;
  sim.duration_max = 0.5;
  std::vector<Waveform> waves;
  for (const auto& u : simulate_utterances(sim, 6)) waves.push_back(u.waveform);
  const FeatureConfig c;
  const std::vector<FrameFeatures> a = extract_batch(waves, c, Exec::kSerial);
  const std::vector<FrameFeatures> b = extract_batch(waves, c, Exec::kParallel);
  CHECK(a == b);
  for (std::size_t i = 0; i < waves.size(); ++i) CHECK(a[i] == extract_features(waves[i], c));
  CHECK(pool_batch(a, Exec::kSerial) == pool_batch(a, Exec::kParallel));
  CHECK(max_threads() >= 1);
}

}  // namespace
}  // namespace originrank
