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

#ifndef ORIGINRANK_RANK_SVM_H_
#define ORIGINRANK_RANK_SVM_H_

#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "originrank/corpus.h"
#include "originrank/kernels.h"
#include "originrank/matrix.h"

namespace originrank {

using IndexPair = std::pair<std::size_t, std::size_t>;

// Ordered pairs are (recorded, synthetic); similar pairs share a class.
struct PairSet {
  std::vector<IndexPair> ordered;
  std::vector<IndexPair> similar;
  RowMatrix features;  // n x D
};

struct RankTrainConfig {
  double lambda = 1e-3;
  double mu_s = 0.1;
  long long iterations = 20000;
  int batch_pairs = 16;
  std::uint64_t seed = 0;
  bool projection = true;
  // Fraction of the final iterates averaged into the returned weights;
  // 0 returns the last iterate.
  double tail_average = 0.5;

  void validate() const;
};

struct RankModel {
  std::vector<double> w;
  double lambda = 1e-3;
  double mu_s = 0.1;
  bool bounds_set = false;
  double score_min = 0.0;
  double score_max = 0.0;

  std::size_t feature_dim() const { return w.size(); }
};

constexpr std::size_t kAllPairs = std::numeric_limits<std::size_t>::max();

// Samples without replacement (selection sampling) from the recorded x
// synthetic grid and from the within-class pairs.
PairSet build_pairs(const RowMatrix& features, std::span<const Label> labels,
                    std::size_t max_ordered, std::size_t max_similar, std::uint64_t seed);

// Checks index ranges and pair orientation against labels.
void validate_pairs(const PairSet& pairs, std::span<const Label> labels);

double objective(std::span<const double> w, const PairSet& pairs, double lambda,
                 double mu_s);
std::vector<double> objective_gradient(std::span<const double> w, const PairSet& pairs,
                                       double lambda, double mu_s);

// Stochastic steps of size 1 / (lambda t) on minibatches drawn uniformly
// from the ordered and similar pairs, with optional projection onto the
// ball of radius 1 / sqrt(lambda). Bounds are left unset.
// If trace is non-null it receives the iterate norm after every step.
RankModel train_sgd(const PairSet& pairs, const RankTrainConfig& config,
                    std::vector<double>* trace = nullptr);

constexpr std::size_t kExactPairLimit = 10000;

// Full-batch nonlinear conjugate gradients with exact line minimization
// until the gradient norm drops below tol.
std::vector<double> train_exact(const PairSet& pairs, double lambda, double mu_s,
                                double tol = 1e-8);

double score(const RankModel& model, std::span<const double> x);
std::vector<double> score_rows(const RankModel& model, const RowMatrix& x,
                               Exec exec = Exec::kParallel);

// Min-max bounds over the scored population.
RankModel normalize_fit(const RankModel& model, std::span<const double> population);

double originality_of_score(const RankModel& model, double raw_score);
double originality(const RankModel& model, std::span<const double> x);

// Fraction of ordered pairs scored in the right order; ties count one half.
double pairwise_accuracy(std::span<const double> w, const PairSet& pairs);
double pairwise_accuracy(const RankModel& model, const PairSet& pairs);

std::string rank_to_json(const RankModel& model);
RankModel rank_from_json(const std::string& text);
void save_rank(const RankModel& model, const std::filesystem::path& path);
RankModel load_rank(const std::filesystem::path& path);

struct ScoredUtterance {
  std::string id;
  Label label = Label::kRecorded;
  double raw_score = 0.0;
  double originality = 0.0;
};

// CSV with header id,label,raw_score,originality.
std::string scores_to_csv(std::span<const ScoredUtterance> rows);
std::vector<ScoredUtterance> scores_from_csv(const std::string& text);

}  // namespace originrank

#endif  // ORIGINRANK_RANK_SVM_H_
