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

#include "originrank/rank_svm.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "json.hpp"
#include "originrank/error.h"
#include "originrank/io_util.h"

namespace originrank {

using Json = nlohmann::ordered_json;

namespace {

constexpr const char* kRankVersion = "rank-1";
constexpr long long kExactMaxIterations = 100000;

// Picks `want` of `total` positions in increasing order, each subset
// equally likely (Knuth's Algorithm S).
template <typename Emit>
void selection_sample(std::size_t total, std::size_t want, std::mt19937_64& rng, Emit&& emit) {
  if (want >= total) {
    for (std::size_t t = 0; t < total; ++t) emit(t);
    return;
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t chosen = 0;
  for (std::size_t t = 0; t < total && chosen < want; ++t) {
    const double u = unit(rng);
    if (static_cast<double>(total - t) * u < static_cast<double>(want - chosen)) {
      emit(t);
      ++chosen;
    }
  }
}

double margin(std::span<const double> w, const RowMatrix& x, const IndexPair& p) {
  const double* a = x.data() + static_cast<Eigen::Index>(p.first) * x.cols();
  const double* b = x.data() + static_cast<Eigen::Index>(p.second) * x.cols();
  double acc = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * (a[k] - b[k]);
  return acc;
}

void add_difference(std::span<double> out, const RowMatrix& x, const IndexPair& p,
                    double scale) {
  const double* a = x.data() + static_cast<Eigen::Index>(p.first) * x.cols();
  const double* b = x.data() + static_cast<Eigen::Index>(p.second) * x.cols();
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += scale * (a[k] - b[k]);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

void check_dims(std::span<const double> w, const PairSet& pairs) {
  require(w.size() == static_cast<std::size_t>(pairs.features.cols()), Errc::kDimMismatch,
          "weight vector has dimension " + std::to_string(w.size()) + ", features have " +
              std::to_string(pairs.features.cols()));
}

// Derivative along d of J at w + alpha d.
double directional(std::span<const double> w, std::span<const double> d, double alpha,
                   const PairSet& pairs, double lambda, double mu_s) {
  std::vector<double> at(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) at[k] = w[k] + alpha * d[k];
  return dot(objective_gradient(at, pairs, lambda, mu_s), d);
}

// Minimizes the convex piecewise quadratic J along d by locating the root of
// its (monotone) directional derivative.
double line_minimum(std::span<const double> w, std::span<const double> d, double slope0,
                    const PairSet& pairs, double lambda, double mu_s) {
  double lo = 0.0;
  double f_lo = slope0;
  double hi = 1.0;
  double f_hi = directional(w, d, hi, pairs, lambda, mu_s);
  for (int i = 0; i < 200 && f_hi < 0.0; ++i) {
    lo = hi;
    f_lo = f_hi;
    hi *= 2.0;
    f_hi = directional(w, d, hi, pairs, lambda, mu_s);
  }
  if (f_hi < 0.0) throw Error(Errc::kNumericFailure, "line search failed to bracket");
  int side = 0;
  for (int i = 0; i < 200; ++i) {
    // Illinois variant of regula falsi.
    const double mid = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
    const double f_mid = directional(w, d, mid, pairs, lambda, mu_s);
    if (f_mid == 0.0 || hi - lo <= 1e-15 * std::max(1.0, hi)) return mid;
    if (f_mid < 0.0) {
      lo = mid;
      f_lo = f_mid;
      if (side == -1) f_hi *= 0.5;
      side = -1;
    } else {
      hi = mid;
      f_hi = f_mid;
      if (side == 1) f_lo *= 0.5;
      side = 1;
    }
    if (std::abs(f_mid) <= 1e-15 * std::abs(slope0)) return mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

void RankTrainConfig::validate() const {
  require(lambda > 0.0 && std::isfinite(lambda), Errc::kInvalidConfig, "lambda must be > 0");
  require(mu_s >= 0.0 && std::isfinite(mu_s), Errc::kInvalidConfig, "mu_s must be >= 0");
  require(iterations >= 1, Errc::kInvalidConfig, "iterations must be >= 1");
  require(batch_pairs >= 1, Errc::kInvalidConfig, "batch_pairs must be >= 1");
  require(tail_average >= 0.0 && tail_average <= 1.0, Errc::kInvalidConfig,
          "tail_average must lie in [0, 1]");
}

PairSet build_pairs(const RowMatrix& features, std::span<const Label> labels,
                    std::size_t max_ordered, std::size_t max_similar, std::uint64_t seed) {
  require(static_cast<std::size_t>(features.rows()) == labels.size(), Errc::kDimMismatch,
          "features and labels differ in length");
  std::vector<std::size_t> rec;
  std::vector<std::size_t> syn;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    (labels[i] == Label::kRecorded ? rec : syn).push_back(i);
  }
  require(!rec.empty(), Errc::kMissingClass, "no recorded utterances to pair");
  require(!syn.empty(), Errc::kMissingClass, "no synthetic utterances to pair");

  PairSet pairs;
  pairs.features = features;
  std::mt19937_64 rng(seed);
  const std::size_t n_ord = rec.size() * syn.size();
  selection_sample(n_ord, max_ordered, rng, [&](std::size_t t) {
    pairs.ordered.emplace_back(rec[t / syn.size()], syn[t % syn.size()]);
  });

  // Within-class pairs (a < b) of the recorded class, then the synthetic class.
  auto within = [](std::size_t n) { return n * (n - 1) / 2; };
  const std::size_t n_rec_pairs = within(rec.size());
  const std::size_t n_sim = n_rec_pairs + within(syn.size());
  std::size_t row = 0;
  std::size_t row_start = 0;
  const std::vector<std::size_t>* group = &rec;
  selection_sample(n_sim, max_similar, rng, [&](std::size_t t) {
    if (t >= n_rec_pairs && group == &rec) {
      group = &syn;
      row = 0;
      row_start = n_rec_pairs;
    }
    // Advance the (row, column) walk to position t; positions only increase.
    const std::size_t n = group->size();
    while (t >= row_start + (n - 1 - row)) {
      row_start += n - 1 - row;
      ++row;
    }
    const std::size_t col = row + 1 + (t - row_start);
    pairs.similar.emplace_back((*group)[row], (*group)[col]);
  });
  return pairs;
}

void validate_pairs(const PairSet& pairs, std::span<const Label> labels) {
  const auto n = static_cast<std::size_t>(pairs.features.rows());
  require(labels.size() == n, Errc::kDimMismatch, "labels do not match the feature rows");
  for (const auto& [i, j] : pairs.ordered) {
    require(i < n && j < n && i != j, Errc::kOutOfRange, "ordered pair index out of range");
    require(labels[i] == Label::kRecorded && labels[j] == Label::kSynthetic,
            Errc::kLabelMismatch, "ordered pair must be (recorded, synthetic)");
  }
  for (const auto& [i, j] : pairs.similar) {
    require(i < n && j < n && i != j, Errc::kOutOfRange, "similar pair index out of range");
    require(labels[i] == labels[j], Errc::kLabelMismatch, "similar pair crosses classes");
  }
}

double objective(std::span<const double> w, const PairSet& pairs, double lambda, double mu_s) {
  check_dims(w, pairs);
  require(!pairs.ordered.empty(), Errc::kEmptyOrderedSet, "objective needs ordered pairs");
  double hinge = 0.0;
  for (const auto& p : pairs.ordered) {
    const double slack = std::max(0.0, 1.0 - margin(w, pairs.features, p));
    hinge += slack * slack;
  }
  double sim = 0.0;
  for (const auto& p : pairs.similar) {
    const double m = margin(w, pairs.features, p);
    sim += m * m;
  }
  const double n_sim = static_cast<double>(std::max<std::size_t>(pairs.similar.size(), 1));
  return 0.5 * lambda * dot(w, w) + hinge / static_cast<double>(pairs.ordered.size()) +
         mu_s * sim / n_sim;
}

std::vector<double> objective_gradient(std::span<const double> w, const PairSet& pairs,
                                       double lambda, double mu_s) {
  check_dims(w, pairs);
  require(!pairs.ordered.empty(), Errc::kEmptyOrderedSet, "objective needs ordered pairs");
  std::vector<double> g(w.begin(), w.end());
  for (double& v : g) v *= lambda;
  const double inv_o = 1.0 / static_cast<double>(pairs.ordered.size());
  for (const auto& p : pairs.ordered) {
    const double slack = 1.0 - margin(w, pairs.features, p);
    if (slack > 0.0) add_difference(g, pairs.features, p, -2.0 * slack * inv_o);
  }
  const double scale =
      2.0 * mu_s / static_cast<double>(std::max<std::size_t>(pairs.similar.size(), 1));
  for (const auto& p : pairs.similar) {
    add_difference(g, pairs.features, p, scale * margin(w, pairs.features, p));
  }
  return g;
}

RankModel train_sgd(const PairSet& pairs, const RankTrainConfig& config,
                    std::vector<double>* trace) {
  config.validate();
  require(!pairs.ordered.empty(), Errc::kEmptyOrderedSet, "no ordered pairs to train on");
  const auto dim = static_cast<std::size_t>(pairs.features.cols());
  RankModel model;
  model.lambda = config.lambda;
  model.mu_s = config.mu_s;
  model.w.assign(dim, 0.0);

  const std::size_t n_ord = pairs.ordered.size();
  const std::size_t n_sim = pairs.similar.size();
  const std::size_t total = n_ord + n_sim;
  const double batch = static_cast<double>(config.batch_pairs);
  // Importance weights that make the minibatch gradient unbiased for J.
  const double w_ord = static_cast<double>(total) / (static_cast<double>(n_ord) * batch);
  const double w_sim =
      n_sim > 0 ? config.mu_s * static_cast<double>(total) / (static_cast<double>(n_sim) * batch)
                : 0.0;
  const double radius = 1.0 / std::sqrt(config.lambda);

  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<std::size_t> pick(0, total - 1);
  const long long tail = static_cast<long long>(
      std::floor(config.tail_average * static_cast<double>(config.iterations)));
  const long long average_from = config.iterations - tail + 1;
  std::vector<double> average(dim, 0.0);
  std::vector<double> g(dim);
  if (trace != nullptr) trace->clear();
  for (long long t = 1; t <= config.iterations; ++t) {
    std::fill(g.begin(), g.end(), 0.0);
    for (int b = 0; b < config.batch_pairs; ++b) {
      const std::size_t idx = pick(rng);
      if (idx < n_ord) {
        const IndexPair& p = pairs.ordered[idx];
        const double slack = 1.0 - margin(model.w, pairs.features, p);
        if (slack > 0.0) add_difference(g, pairs.features, p, -2.0 * slack * w_ord);
      } else {
        const IndexPair& p = pairs.similar[idx - n_ord];
        add_difference(g, pairs.features, p, 2.0 * w_sim * margin(model.w, pairs.features, p));
      }
    }
    const double eta = 1.0 / (config.lambda * static_cast<double>(t));
    for (std::size_t k = 0; k < dim; ++k) {
      model.w[k] -= eta * (config.lambda * model.w[k] + g[k]);
    }
    if (config.projection) {
      const double norm = std::sqrt(dot(model.w, model.w));
      if (norm > radius) {
        for (double& v : model.w) v *= radius / norm;
      }
    }
    if (trace != nullptr) trace->push_back(std::sqrt(dot(model.w, model.w)));
    if (tail > 0 && t >= average_from) {
      // Running mean keeps the average inside the projection ball.
      const double weight = 1.0 / static_cast<double>(t - average_from + 1);
      for (std::size_t k = 0; k < dim; ++k) average[k] += weight * (model.w[k] - average[k]);
    }
  }
  if (tail > 0) model.w = average;
  for (double v : model.w) {
    require(std::isfinite(v), Errc::kNumericFailure, "SGD produced non-finite weights");
  }
  return model;
}

std::vector<double> train_exact(const PairSet& pairs, double lambda, double mu_s, double tol) {
  const std::size_t total = pairs.ordered.size() + pairs.similar.size();
  require(total <= kExactPairLimit, Errc::kGuardExceeded,
          "exact solver is limited to " + std::to_string(kExactPairLimit) + " pairs, got " +
              std::to_string(total));
  require(!pairs.ordered.empty(), Errc::kEmptyOrderedSet, "no ordered pairs to train on");
  require(lambda > 0.0, Errc::kInvalidConfig, "lambda must be > 0");
  const auto dim = static_cast<std::size_t>(pairs.features.cols());

  // Polak-Ribiere conjugate gradients with exact line minimization.
  std::vector<double> w(dim, 0.0);
  std::vector<double> g = objective_gradient(w, pairs, lambda, mu_s);
  std::vector<double> d(dim);
  for (std::size_t k = 0; k < dim; ++k) d[k] = -g[k];
  for (long long it = 0; it < kExactMaxIterations; ++it) {
    if (std::sqrt(dot(g, g)) < tol) return w;
    double slope = dot(g, d);
    if (slope >= 0.0 || (it > 0 && it % static_cast<long long>(dim + 1) == 0)) {
      for (std::size_t k = 0; k < dim; ++k) d[k] = -g[k];
      slope = -dot(g, g);
    }
    const double alpha = line_minimum(w, d, slope, pairs, lambda, mu_s);
    for (std::size_t k = 0; k < dim; ++k) w[k] += alpha * d[k];
    std::vector<double> g_next = objective_gradient(w, pairs, lambda, mu_s);
    double num = 0.0;
    for (std::size_t k = 0; k < dim; ++k) num += g_next[k] * (g_next[k] - g[k]);
    const double beta = std::max(0.0, num / dot(g, g));
    for (std::size_t k = 0; k < dim; ++k) d[k] = -g_next[k] + beta * d[k];
    g = std::move(g_next);
  }
  throw Error(Errc::kNumericFailure, "exact solver did not reach the gradient tolerance");
}

double score(const RankModel& model, std::span<const double> x) {
  require(x.size() == model.w.size(), Errc::kDimMismatch,
          "feature vector has dimension " + std::to_string(x.size()) + ", model expects " +
              std::to_string(model.w.size()));
  return dot(model.w, x);
}

std::vector<double> score_rows(const RankModel& model, const RowMatrix& x, Exec exec) {
  require(static_cast<std::size_t>(x.cols()) == model.w.size(), Errc::kDimMismatch,
          "feature matrix does not match the rank model");
  return score_batch(model.w, {x.data(), static_cast<std::size_t>(x.size())}, exec);
}

RankModel normalize_fit(const RankModel& model, std::span<const double> population) {
  require(!population.empty(), Errc::kDegeneratePopulation, "empty score population");
  const auto [lo, hi] = std::minmax_element(population.begin(), population.end());
  require(std::isfinite(*lo) && std::isfinite(*hi), Errc::kNumericFailure,
          "non-finite raw score");
  require(*lo < *hi, Errc::kDegeneratePopulation, "all raw scores are equal");
  RankModel out = model;
  out.bounds_set = true;
  out.score_min = *lo;
  out.score_max = *hi;
  return out;
}

double originality_of_score(const RankModel& model, double raw_score) {
  require(model.bounds_set, Errc::kBoundsUnset, "rank model has no normalization bounds");
  return std::clamp((raw_score - model.score_min) / (model.score_max - model.score_min), 0.0,
                    1.0);
}

double originality(const RankModel& model, std::span<const double> x) {
  return originality_of_score(model, score(model, x));
}

double pairwise_accuracy(std::span<const double> w, const PairSet& pairs) {
  check_dims(w, pairs);
  require(!pairs.ordered.empty(), Errc::kEmptyOrderedSet, "accuracy needs ordered pairs");
  const std::vector<double> s = score_batch(
      w, {pairs.features.data(), static_cast<std::size_t>(pairs.features.size())},
      Exec::kSerial);
  double hits = 0.0;
  for (const auto& [i, j] : pairs.ordered) {
    if (s[i] > s[j]) {
      hits += 1.0;
    } else if (s[i] == s[j]) {
      hits += 0.5;
    }
  }
  return hits / static_cast<double>(pairs.ordered.size());
}

double pairwise_accuracy(const RankModel& model, const PairSet& pairs) {
  return pairwise_accuracy(model.w, pairs);
}

std::string rank_to_json(const RankModel& model) {
  Json j;
  j["version"] = kRankVersion;
  j["feature_dim"] = model.w.size();
  j["lambda"] = model.lambda;
  j["mu_s"] = model.mu_s;
  j["score_min"] = model.bounds_set ? Json(model.score_min) : Json(nullptr);
  j["score_max"] = model.bounds_set ? Json(model.score_max) : Json(nullptr);
  j["w"] = model.w;
  return j.dump(1) + "\n";
}

RankModel rank_from_json(const std::string& text) {
  try {
    const Json j = Json::parse(text);
    require(j.at("version") == kRankVersion, Errc::kParseError,
            "unsupported rank model version");
    RankModel m;
    m.w = j.at("w").get<std::vector<double>>();
    require(m.w.size() == j.at("feature_dim").get<std::size_t>(), Errc::kParseError,
            "rank model feature_dim does not match w");
    m.lambda = j.at("lambda").get<double>();
    m.mu_s = j.at("mu_s").get<double>();
    if (!j.at("score_min").is_null() || !j.at("score_max").is_null()) {
      m.bounds_set = true;
      m.score_min = j.at("score_min").get<double>();
      m.score_max = j.at("score_max").get<double>();
      require(m.score_min < m.score_max, Errc::kParseError, "rank model bounds out of order");
    }
    for (double v : m.w) require(std::isfinite(v), Errc::kParseError, "non-finite weight");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kParseError, std::string("rank model: ") + e.what());
  }
}

void save_rank(const RankModel& model, const std::filesystem::path& path) {
  write_text_file(path, rank_to_json(model));
}

RankModel load_rank(const std::filesystem::path& path) {
  return rank_from_json(read_text_file(path));
}

std::string scores_to_csv(std::span<const ScoredUtterance> rows) {
  std::string out = "id,label,raw_score,originality\n";
  for (const auto& r : rows) {
    out += r.id + "," + std::string(label_name(r.label)) + "," + format_double(r.raw_score) +
           "," + format_double(r.originality) + "\n";
  }
  return out;
}

std::vector<ScoredUtterance> scores_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) && line == "id,label,raw_score,originality",
          Errc::kParseError, "score CSV header mismatch");
  std::vector<ScoredUtterance> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    require(f.size() == 4, Errc::kParseError,
            "score CSV line " + std::to_string(line_no) + ": expected 4 fields");
    try {
      rows.push_back({f[0], parse_label(f[1]), std::stod(f[2]), std::stod(f[3])});
    } catch (const std::logic_error&) {
      throw Error(Errc::kParseError,
                  "score CSV line " + std::to_string(line_no) + ": bad number");
    }
  }
  return rows;
}

}  // namespace originrank
