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

#include "originrank/metrics.h"

#include <cmath>
#include <random>

#include "originrank/simulator.h"
#include "test_util.h"

namespace originrank {
namespace {

FrameFeatures random_track(std::size_t frames, int n_mel, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> env(-80.0, 0.0);
  std::uniform_real_distribution<double> pitch(80.0, 400.0);
  std::bernoulli_distribution voiced(0.7);
  FrameFeatures f;
  f.n_mel = n_mel;
  for (std::size_t t = 0; t < frames; ++t) {
    for (int k = 0; k < n_mel; ++k) f.envelope.push_back(env(rng));
    const bool v = voiced(rng);
    f.vuv.push_back(v ? 1 : 0);
    f.f0.push_back(v ? pitch(rng) : 0.0);
    f.gain.push_back(env(rng));
  }
  return f;
}

TEST_CASE("metric identities") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const FrameFeatures a = random_track(50 + seed, 24, seed);
    const PairMetrics m = pair_metrics(a, a);
    CHECK(m.f0.value == 0.0);
    CHECK(m.f0.support > 0);
    CHECK(m.lsd_db == 0.0);
    CHECK(m.gain_db == 0.0);
    CHECK(m.vuv_pct == 0.0);

    FrameFeatures b = a;
    for (std::size_t t = 0; t < b.frames(); ++t) {
      if (b.vuv[t]) b.f0[t] += 10.0;
    }
    CHECK(std::abs(f0_rmse(a, b).value - 10.0) <= 1e-9);
    b = a;
    for (double& e : b.envelope) e += 20.0;
    CHECK(std::abs(lsd(a, b) - 20.0) <= 1e-9);
    b = a;
    for (double& g : b.gain) g += 3.0;
    CHECK(std::abs(gain_rmse(a, b) - 3.0) <= 1e-9);
    b = a;
    for (auto& v : b.vuv) v = v ? 0 : 1;
    CHECK(vuv_error_rate(a, b) == 100.0);
    CHECK(f0_rmse(a, b).support == 0);
    CHECK_FALSE(f0_rmse(a, b).defined());
  }
}

TEST_CASE("metrics against direct formulas") {
  const FrameFeatures a = random_track(40, 5, 1);
  const FrameFeatures b = random_track(40, 5, 2);
  double f0_ss = 0.0;
  int f0_n = 0;
  double lsd_sum = 0.0;
  double g_ss = 0.0;
  int flips = 0;
  for (std::size_t t = 0; t < 40; ++t) {
    if (a.vuv[t] == 1 && b.vuv[t] == 1) {
      f0_ss += std::pow(a.f0[t] - b.f0[t], 2);
      ++f0_n;
    }
    double e = 0.0;
    for (int k = 0; k < 5; ++k) e += std::pow(a.env(t, k) - b.env(t, k), 2);
    lsd_sum += std::sqrt(e / 5.0);
    g_ss += std::pow(a.gain[t] - b.gain[t], 2);
    flips += a.vuv[t] != b.vuv[t];
  }
  CHECK(f0_rmse(a, b).support == static_cast<std::size_t>(f0_n));
  CHECK(f0_rmse(a, b).value == doctest::Approx(std::sqrt(f0_ss / f0_n)).epsilon(1e-13));
  CHECK(lsd(a, b) == doctest::Approx(lsd_sum / 40.0).epsilon(1e-13));
  CHECK(gain_rmse(a, b) == doctest::Approx(std::sqrt(g_ss / 40.0)).epsilon(1e-13));
  CHECK(vuv_error_rate(a, b) == doctest::Approx(100.0 * flips / 40.0).epsilon(1e-13));
  CHECK(lsd(a, b) == lsd(b, a));
}

TEST_CASE("length mismatch") {
  const FrameFeatures a = random_track(40, 5, 1);
  const FrameFeatures b = random_track(41, 5, 2);
  CHECK_ERRC(f0_rmse(a, b), Errc::kLengthMismatch);
  CHECK_ERRC(lsd(a, b), Errc::kLengthMismatch);
  CHECK_ERRC(gain_rmse(a, b), Errc::kLengthMismatch);
  CHECK_ERRC(vuv_error_rate(a, b), Errc::kLengthMismatch);
  CHECK_ERRC(lsd(a, random_track(40, 6, 3)), Errc::kLengthMismatch);
}

TEST_CASE("confidence intervals") {
  const Interval ones = ci95(std::vector<double>{1, 1, 1, 1});
  CHECK(ones.mean == 1.0);
  CHECK(ones.half_width == 0.0);
  CHECK(ones.n == 4);
  const Interval two = ci95(std::vector<double>{0, 2});
  CHECK(two.mean == doctest::Approx(1.0));
  CHECK(two.half_width == doctest::Approx(1.96));
  std::vector<double> base = {3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0};
  std::vector<double> rep;
  for (int r = 0; r < 4; ++r) rep.insert(rep.end(), base.begin(), base.end());
  const double h8 = ci95(base).half_width;
  const double h32 = ci95(rep).half_width;
  // Sample std changes from n-1 = 7 to 31 under replication.
  const double expect = h8 / 2.0 * std::sqrt((7.0 / 8.0) * (32.0 / 31.0));
  CHECK(h32 == doctest::Approx(expect).epsilon(1e-12));
  CHECK_ERRC(ci95(std::vector<double>{1.0}), Errc::kTooFew);
}

TEST_CASE("group reports") {
  std::vector<PairMetrics> high;
  std::vector<PairMetrics> low;
  for (int i = 0; i < 6; ++i) {
    high.push_back({{1.0 + i, 10}, 2.0 + i, 0.5, 1.0});
    low.push_back({{10.0 + i, i == 0 ? 0u : 10u}, 8.0 + i, 1.5, 4.0});
  }
  const auto [h, l] = group_report(high, low);
  CHECK(h.n_utterances == 6);
  CHECK(h.f0_rmse_hz.n == 6);
  CHECK(l.f0_rmse_hz.n == 5);
  CHECK(h.f0_rmse_hz.mean == doctest::Approx(3.5));
  CHECK(l.f0_rmse_hz.mean == doctest::Approx(13.0));
  CHECK(h.lsd_db.mean == doctest::Approx(4.5));
  CHECK(h.gain_rmse_db.half_width == 0.0);
  const auto [h2, l2] = group_report(high, high);
  CHECK(h2.lsd_db.mean == l2.lsd_db.mean);
  CHECK(h2.f0_rmse_hz.half_width == l2.f0_rmse_hz.half_width);

  const std::string csv = report_csv(h, l);
  CHECK(csv.rfind("group,metric,mean,ci_half_width,n\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
  CHECK(csv.find("low,f0_rmse_hz,13,") != std::string::npos);
  CHECK(csv.find("high,lsd_db,4.5,") != std::string::npos);
  const std::string table = report_table(h, l);
  CHECK(table.find("High") != std::string::npos);
  CHECK(table.find("Low") != std::string::npos);
}

TEST_CASE("metrics follow simulator severity") {
  const FeatureConfig fc;
  auto run = [&](double severity, std::uint64_t seed, int n) {
    SimConfig c;
    c.n_recorded = 1;
    c.n_synthetic = n;
    c.severity_min = severity;
    c.severity_max = severity;
    std::vector<PairMetrics> out;
    std::vector<double> truth_vuv;
    for (const auto& u : simulate_utterances(c, seed)) {
      if (!u.base_waveform) continue;
      out.push_back(pair_metrics(extract_features(u.waveform, fc),
                                 extract_features(*u.base_waveform, fc)));
      truth_vuv.push_back(
          vuv_error_rate(ground_truth_tracks(u.params), ground_truth_tracks(*u.base_params)));
    }
    return std::pair{summarize(out), ci95(truth_vuv).mean};
  };
  const auto [mild, mild_vuv] = run(0.1, 3, 24);
  const auto [harsh, harsh_vuv] = run(0.8, 4, 24);
  CHECK(mild.f0_rmse_hz.mean < harsh.f0_rmse_hz.mean);
  CHECK(mild.lsd_db.mean < harsh.lsd_db.mean);
  CHECK(mild.gain_rmse_db.mean < harsh.gain_rmse_db.mean);
  CHECK(std::abs(mild_vuv - 1.0) <= 2.0);
  CHECK(std::abs(harsh_vuv - 8.0) <= 2.0);

  const auto [half, half_vuv] = run(0.5, 5, 50);
  CHECK(std::abs(half_vuv - 5.0) <= 2.0);
  CHECK(half.n_utterances == 50);
}

}  // namespace
}  // namespace originrank
