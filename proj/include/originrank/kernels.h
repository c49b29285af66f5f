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

#ifndef ORIGINRANK_KERNELS_H_
#define ORIGINRANK_KERNELS_H_

#include <exception>
#include <span>
#include <vector>

#include "originrank/features.h"
#include "originrank/wav.h"

namespace originrank {

// Every kernel has a serial reference path and an OpenMP path. Work is split
// so each output element is computed by exactly one thread in the same order
// as the serial loop, and reductions are finished serially; the two paths
// therefore return bit-identical results.
enum class Exec { kSerial, kParallel };

// Runs body(i) for i in [0, n), serially or with a static OpenMP schedule.
// The first exception thrown by any iteration is rethrown on the caller.
template <typename Body>
void parallel_for(std::size_t n, Exec exec, Body&& body) {
  if (exec == Exec::kSerial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(originrank_parallel_for_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

// Sets the thread count used by kParallel kernels (0 keeps the runtime default).
void set_num_threads(int n);
int max_threads();

std::vector<FrameFeatures> extract_batch(std::span<const Waveform> waveforms,
                                         const FeatureConfig& config,
                                         Exec exec = Exec::kParallel);

std::vector<PooledVector> pool_batch(std::span<const FrameFeatures> features,
                                     Exec exec = Exec::kParallel);

// out[i] = w . x_i for row-major x (n x w.size()).
std::vector<double> score_batch(std::span<const double> w, std::span<const double> x,
                                Exec exec = Exec::kParallel);

// Squared Euclidean distances between the rows of x (n x dim); out is n x n.
void pairwise_sq_dists(std::span<const double> x, std::size_t dim,
                       std::span<double> out, Exec exec = Exec::kParallel);

// Gradient of KL(P || Q) for a 2-D embedding y (n x 2) with Student-t
// similarities, P scaled by exaggeration. Returns the normalizer
// sum_{i != j} 1 / (1 + |y_i - y_j|^2). grad is n x 2.
double tsne_gradient(std::span<const double> p, std::span<const double> y,
                     double exaggeration, std::span<double> grad,
                     Exec exec = Exec::kParallel);

// KL(P || Q) for the same embedding, with unexaggerated P.
double tsne_kl(std::span<const double> p, std::span<const double> y,
               Exec exec = Exec::kParallel);

}  // namespace originrank

#endif  // ORIGINRANK_KERNELS_H_
