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

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "originrank/error.h"

namespace originrank {

namespace {

std::size_t rows_of(std::span<const double> y) { return y.size() / 2; }

}  // namespace

void set_num_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

int max_threads() { return omp_get_max_threads(); }

std::vector<FrameFeatures> extract_batch(std::span<const Waveform> waveforms,
                                         const FeatureConfig& config, Exec exec) {
  std::vector<FrameFeatures> out(waveforms.size());
  if (waveforms.empty()) return out;
  const int sr = waveforms.front().sample_rate;
  const FeatureExtractor shared(config, sr);
  parallel_for(waveforms.size(), exec, [&](std::size_t i) {
    if (waveforms[i].sample_rate == sr) {
      out[i] = shared.extract(waveforms[i]);
    } else {
      out[i] = extract_features(waveforms[i], config);
    }
  });
  return out;
}

std::vector<PooledVector> pool_batch(std::span<const FrameFeatures> features, Exec exec) {
  std::vector<PooledVector> out(features.size());
  parallel_for(features.size(), exec,
                 [&](std::size_t i) { out[i] = pool_utterance(features[i]); });
  return out;
}

std::vector<double> score_batch(std::span<const double> w, std::span<const double> x,
                                Exec exec) {
  const std::size_t d = w.size();
  if (d == 0 || x.size() % d != 0) {
    throw Error(Errc::kDimMismatch, "score_batch: feature matrix does not match w");
  }
  std::vector<double> out(x.size() / d);
  parallel_for(out.size(), exec, [&](std::size_t i) {
    const double* row = x.data() + i * d;
    double acc = 0.0;
    for (std::size_t k = 0; k < d; ++k) acc += w[k] * row[k];
    out[i] = acc;
  });
  return out;
}

void pairwise_sq_dists(std::span<const double> x, std::size_t dim, std::span<double> out,
                       Exec exec) {
  if (dim == 0 || x.size() % dim != 0) {
    throw Error(Errc::kDimMismatch, "pairwise_sq_dists: bad dimension");
  }
  const std::size_t n = x.size() / dim;
  if (out.size() != n * n) throw Error(Errc::kDimMismatch, "pairwise_sq_dists: bad output");
  parallel_for(n, exec, [&](std::size_t i) {
    const double* xi = x.data() + i * dim;
    for (std::size_t j = 0; j < n; ++j) {
      const double* xj = x.data() + j * dim;
      double acc = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double diff = xi[k] - xj[k];
        acc += diff * diff;
      }
      out[i * n + j] = acc;
    }
  });
}

double tsne_gradient(std::span<const double> p, std::span<const double> y,
                     double exaggeration, std::span<double> grad, Exec exec) {
  const std::size_t n = rows_of(y);
  if (p.size() != n * n || grad.size() != y.size()) {
    throw Error(Errc::kDimMismatch, "tsne_gradient: size mismatch");
  }
  std::vector<double> row_z(n, 0.0);
  parallel_for(n, exec, [&](std::size_t i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dx = y[2 * i] - y[2 * j];
      const double dy = y[2 * i + 1] - y[2 * j + 1];
      acc += 1.0 / (1.0 + dx * dx + dy * dy);
    }
    row_z[i] = acc;
  });
  const double z = std::accumulate(row_z.begin(), row_z.end(), 0.0);
  const double inv_z = 1.0 / z;
  parallel_for(n, exec, [&](std::size_t i) {
    double gx = 0.0;
    double gy = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dx = y[2 * i] - y[2 * j];
      const double dy = y[2 * i + 1] - y[2 * j + 1];
      const double num = 1.0 / (1.0 + dx * dx + dy * dy);
      const double coeff = (exaggeration * p[i * n + j] - num * inv_z) * num;
      gx += coeff * dx;
      gy += coeff * dy;
    }
    grad[2 * i] = 4.0 * gx;
    grad[2 * i + 1] = 4.0 * gy;
  });
  return z;
}

double tsne_kl(std::span<const double> p, std::span<const double> y, Exec exec) {
  const std::size_t n = rows_of(y);
  if (p.size() != n * n) throw Error(Errc::kDimMismatch, "tsne_kl: size mismatch");
  std::vector<double> row_z(n, 0.0);
  std::vector<double> row_kl(n, 0.0);
  parallel_for(n, exec, [&](std::size_t i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dx = y[2 * i] - y[2 * j];
      const double dy = y[2 * i + 1] - y[2 * j + 1];
      acc += 1.0 / (1.0 + dx * dx + dy * dy);
    }
    row_z[i] = acc;
  });
  const double z = std::accumulate(row_z.begin(), row_z.end(), 0.0);
  parallel_for(n, exec, [&](std::size_t i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double pij = p[i * n + j];
      if (j == i || pij <= 0.0) continue;
      const double dx = y[2 * i] - y[2 * j];
      const double dy = y[2 * i + 1] - y[2 * j + 1];
      const double q = 1.0 / (1.0 + dx * dx + dy * dy) / z;
      acc += pij * std::log(pij / std::max(q, 1e-300));
    }
    row_kl[i] = acc;
  });
  return std::accumulate(row_kl.begin(), row_kl.end(), 0.0);
}

}  // namespace originrank
