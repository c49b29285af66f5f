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

#include "originrank/features.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "originrank/simulator.h"
#include "test_util.h"

namespace originrank {
namespace {

constexpr int kRate = 24000;

Waveform sine(double hz, double seconds, double amp = 0.5, int rate = kRate) {
  Waveform w;
  w.sample_rate = rate;
  w.samples.resize(static_cast<std::size_t>(std::lround(seconds * rate)));
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    w.samples[i] = amp * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / rate);
  }
  return w;
}

// Direct DFT magnitudes followed by the same triangular weighting, written out
// independently of the library filterbank.
std::vector<double> oracle_log_mel(const std::vector<double>& frame, const FeatureConfig& c) {
  const int n = c.fft_size;
  std::vector<double> mag(static_cast<std::size_t>(n / 2 + 1));
  for (std::size_t k = 0; k < mag.size(); ++k) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t t = 0; t < frame.size(); ++t) {
      const double a = -2.0 * std::numbers::pi * static_cast<double>(k * t % static_cast<std::size_t>(n)) / n;
      re += frame[t] * std::cos(a);
      im += frame[t] * std::sin(a);
    }
    mag[k] = std::sqrt(re * re + im * im);
  }
  auto to_mel = [](double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); };
  auto from_mel = [](double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); };
  const double top = to_mel(kRate / 2.0);
  std::vector<double> out(static_cast<std::size_t>(c.n_mel));
  for (int k = 0; k < c.n_mel; ++k) {
    const double lo = from_mel(top * k / (c.n_mel + 1));
    const double mid = from_mel(top * (k + 1) / (c.n_mel + 1));
    const double hi = from_mel(top * (k + 2) / (c.n_mel + 1));
    double acc = 0.0;
    for (std::size_t b = 0; b < mag.size(); ++b) {
      const double hz = static_cast<double>(b) * kRate / n;
      double w = 0.0;
      if (hz > lo && hz <= mid) w = (hz - lo) / (mid - lo);
      if (hz > mid && hz < hi) w = (hi - hz) / (hi - mid);
      acc += w * mag[b];
    }
    out[static_cast<std::size_t>(k)] = 20.0 * std::log10(std::max(acc, c.mag_floor));
  }
  return out;
}

TEST_CASE("frame count formula") {
  const FeatureConfig c;
  CHECK(frame_count(600, kRate, c) == 1);
  CHECK(frame_count(24000, kRate, c) == 196);
  CHECK_ERRC(frame_count(24, kRate, c), Errc::kTooShort);
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> len(600, 50000);
  for (int i = 0; i < 200; ++i) {
    const std::size_t L = len(rng);
    CHECK(frame_count(L, kRate, c) == 1 + (L - 600) / 120);
  }
  FeatureConfig odd = c;
  odd.frame_hop = 0.01;
  odd.frame_len = 0.02;
  CHECK(frame_count(16000, 16000, odd) == 1 + (16000 - 320) / 160);
  const auto frames = frame_signal(sine(100.0, 0.1), c);
  CHECK(frames.size() == frame_count(2400, kRate, c));
  CHECK(frames.front().size() == 600);
}

TEST_CASE("config invariants") {
  FeatureConfig c;
  c.f0_min = 500.0;
  CHECK_ERRC(c.validate(kRate), Errc::kInvalidConfig);
  c = FeatureConfig{};
  c.n_mel = 1;
  CHECK_ERRC(c.validate(kRate), Errc::kInvalidConfig);
  c = FeatureConfig{};
  c.fft_size = 512;
  CHECK_ERRC(c.validate(kRate), Errc::kInvalidConfig);
  c = FeatureConfig{};
  c.frame_len = 0.001;
  CHECK_ERRC(c.validate(kRate), Errc::kInvalidConfig);
  CHECK_NOTHROW(FeatureConfig{}.validate(kRate));
}

TEST_CASE("log mel envelope") {
  const FeatureConfig c;
  const std::vector<double> zero(600, 0.0);
  for (double v : log_mel_envelope(zero, kRate, c)) CHECK(v == doctest::Approx(-200.0));

  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 0.1);
  std::vector<double> frame(600);
  for (double& v : frame) v = g(rng);
  const std::vector<double> got = log_mel_envelope(frame, kRate, c);
  const std::vector<double> ref = oracle_log_mel(frame, c);
  for (std::size_t k = 0; k < got.size(); ++k) CHECK(got[k] == doctest::Approx(ref[k]).epsilon(1e-9));

  std::vector<double> scaled = frame;
  for (double& v : scaled) v *= 10.0;
  const std::vector<double> up = log_mel_envelope(scaled, kRate, c);
  for (std::size_t k = 0; k < up.size(); ++k) CHECK(up[k] - got[k] == doctest::Approx(20.0));

  const MelFilterbank fb(c.n_mel, c.fft_size, kRate);
  for (int band : {4, 10, 18}) {
    const Waveform w = sine(fb.center_hz(band), 0.025, 0.5);
    const std::vector<double> hann = hann_window(600);
    std::vector<double> win(600);
    for (std::size_t i = 0; i < 600; ++i) win[i] = w.samples[i] * hann[i];
    const std::vector<double> env = log_mel_envelope(win, kRate, c);
    const std::vector<double> oracle = oracle_log_mel(win, c);
    for (int k = 0; k < c.n_mel; ++k) {
      if (std::abs(k - band) >= 2) {
        CHECK(env[static_cast<std::size_t>(band)] - env[static_cast<std::size_t>(k)] >= 20.0);
        CHECK(oracle[static_cast<std::size_t>(band)] - oracle[static_cast<std::size_t>(k)] >= 20.0);
      }
    }
  }
}

TEST_CASE("frame gain") {
  CHECK(frame_gain(std::vector<double>(100, 0.0)) == doctest::Approx(-200.0));
  std::vector<double> square(100);
  for (std::size_t i = 0; i < square.size(); ++i) square[i] = i % 2 ? 1.0 : -1.0;
  CHECK(frame_gain(square) == doctest::Approx(0.0).scale(1.0));
  std::vector<double> half = square;
  for (double& v : half) v *= 0.5;
  CHECK(frame_gain(square) - frame_gain(half) == doctest::Approx(20.0 * std::log10(2.0)));
}

TEST_CASE("f0 of pure sines") {
  const FeatureConfig c;
  const int ctx = c.f0_context_samples(kRate);
  for (double hz = 80.0; hz <= 380.0; hz += 20.0) {
    const Waveform w = sine(hz, 0.1);
    const F0Estimate est = estimate_f0(std::span<const double>(w.samples).first(static_cast<std::size_t>(ctx)), kRate, c);
    CHECK(std::abs(est.f0 - hz) / hz < 0.015);
    CHECK(est.nacf_peak > 0.9);
  }
  const Waveform w200 = sine(200.0, 0.1);
  const F0Estimate e200 = estimate_f0(std::span<const double>(w200.samples).first(static_cast<std::size_t>(ctx)), kRate, c);
  CHECK(e200.f0 >= 198.0);
  CHECK(e200.f0 <= 202.0);
  CHECK(estimate_f0(std::span<const double>(w200.samples).first(static_cast<std::size_t>(ctx)), kRate, c, false).f0 == 0.0);

  const std::vector<double> silence(static_cast<std::size_t>(ctx), 0.0);
  const F0Estimate s = estimate_f0(silence, kRate, c);
  CHECK(s.f0 == 0.0);
  CHECK(s.nacf_peak == 0.0);
}

TEST_CASE("white noise is rarely voiced") {
  const FeatureConfig c;
  std::size_t voiced = 0;
  std::size_t total = 0;
  for (unsigned seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    Waveform w{std::vector<double>(kRate / 2), kRate};
    for (double& v : w.samples) v = u(rng);
    const FrameFeatures f = extract_features(w, c);
    for (auto v : f.vuv) voiced += v;
    total += f.frames();
  }
  CHECK(static_cast<double>(voiced) <= 0.05 * static_cast<double>(total));
}

TEST_CASE("extracted tracks satisfy their invariants") {
  const FeatureConfig c;
  SimConfig sim;
  sim.n_recorded = 3;
  sim.n_synthetic = 2;
  for (const auto& u : simulate_utterances(sim, 21)) {
    const FrameFeatures f = extract_features(u.waveform, c);
    REQUIRE(f.frames() >= 1);
    CHECK(f.gain.size() == f.frames());
    CHECK(f.vuv.size() == f.frames());
    CHECK(f.envelope.size() == f.frames() * static_cast<std::size_t>(c.n_mel));
    for (std::size_t t = 0; t < f.frames(); ++t) {
      CHECK((f.vuv[t] == 0) == (f.f0[t] == 0.0));
      if (f.vuv[t]) {
        CHECK(f.f0[t] >= c.f0_min);
        CHECK(f.f0[t] <= c.f0_max);
      }
    }
    for (double e : f.envelope) CHECK(e >= 20.0 * std::log10(c.mag_floor) - 1e-9);
    CHECK(extract_features(u.waveform, c) == f);
  }
}

TEST_CASE("f0 tracks follow the simulator contour") {
  const FeatureConfig c;
  SimConfig sim;
  sim.n_recorded = 4;
  sim.n_synthetic = 1;
  for (const auto& u : simulate_utterances(sim, 33)) {
    if (u.record.label != Label::kRecorded) continue;
    const FrameFeatures f = extract_features(u.waveform, c);
    const int hop = c.hop_samples(kRate);
    const int half = c.frame_samples(kRate) / 2;
    std::vector<double> err;
    for (std::size_t t = 0; t < f.frames(); ++t) {
      if (!f.vuv[t]) continue;
      const auto center = static_cast<std::size_t>(static_cast<int>(t) * hop + half);
      const double truth = true_f0_at(u.params, center);
      if (truth > 0.0) err.push_back(std::abs(f.f0[t] - truth));
    }
    REQUIRE(err.size() > 20);
    std::nth_element(err.begin(), err.begin() + static_cast<std::ptrdiff_t>(err.size() / 2), err.end());
    CHECK(err[err.size() / 2] < 3.0);
  }
}

TEST_CASE("silence is unvoiced throughout") {
  const FrameFeatures f = extract_features(Waveform{std::vector<double>(kRate, 0.0), kRate}, FeatureConfig{});
  CHECK(f.frames() == 196);
  CHECK(std::all_of(f.vuv.begin(), f.vuv.end(), [](auto v) { return v == 0; }));
  CHECK_ERRC(extract_features(Waveform{std::vector<double>(24, 0.0), kRate}, FeatureConfig{}), Errc::kTooShort);
}

FrameFeatures random_tracks(std::size_t T, int n_mel, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 5.0);
  std::uniform_real_distribution<double> hz(90.0, 300.0);
  FrameFeatures f;
  f.n_mel = n_mel;
  for (std::size_t t = 0; t < T; ++t) {
    for (int k = 0; k < n_mel; ++k) f.envelope.push_back(g(rng) - 40.0);
    f.gain.push_back(g(rng) - 20.0);
    const bool v = (rng() % 3) != 0;
    f.vuv.push_back(v ? 1 : 0);
    f.f0.push_back(v ? hz(rng) : 0.0);
  }
  return f;
}

TEST_CASE("pooling statistics") {
  const FrameFeatures f = random_tracks(50, 24, 4);
  const PooledVector p = pool_utterance(f);
  REQUIRE(p.values.size() == 53);
  CHECK(FeatureConfig{}.pooled_dim() == 53);
  // Two-pass oracle for the gain slot and voiced-F0 slots.
  double gm = 0.0;
  for (double v : f.gain) gm += v;
  gm /= 50.0;
  double gv = 0.0;
  for (double v : f.gain) gv += (v - gm) * (v - gm);
  CHECK(p.values[24] == doctest::Approx(gm));
  CHECK(p.values[50] == doctest::Approx(std::sqrt(gv / 50.0)));
  std::vector<double> voiced;
  for (std::size_t t = 0; t < 50; ++t) if (f.vuv[t]) voiced.push_back(f.f0[t]);
  double fm = 0.0;
  for (double v : voiced) fm += v;
  fm /= static_cast<double>(voiced.size());
  CHECK(p.values[25] == doctest::Approx(fm));
  CHECK(p.values[52] == doctest::Approx(static_cast<double>(voiced.size()) / 50.0));

  FrameFeatures shuffled = f;
  std::vector<std::size_t> order(50);
  for (std::size_t i = 0; i < 50; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), std::mt19937_64(5));
  for (std::size_t i = 0; i < 50; ++i) {
    const std::size_t s = order[i];
    std::copy_n(f.envelope.begin() + static_cast<std::ptrdiff_t>(s * 24), 24,
                shuffled.envelope.begin() + static_cast<std::ptrdiff_t>(i * 24));
    shuffled.gain[i] = f.gain[s];
    shuffled.f0[i] = f.f0[s];
    shuffled.vuv[i] = f.vuv[s];
  }
  const PooledVector q = pool_utterance(shuffled);
  for (std::size_t i = 0; i < 53; ++i) CHECK(q.values[i] == doctest::Approx(p.values[i]).epsilon(1e-12));
  CHECK(pool_utterance(f) == p);
}

TEST_CASE("pooling edge cases") {
  FrameFeatures f;
  f.n_mel = 2;
  f.envelope = {1.0, 2.0, 1.0, 2.0, 1.0, 2.0};
  f.gain = {-3.0, -3.0, -3.0};
  f.f0 = {0.0, 0.0, 0.0};
  f.vuv = {0, 0, 0};
  const PooledVector p = pool_utterance(f);
  REQUIRE(p.values.size() == 9);
  CHECK(p.values[0] == 1.0);
  CHECK(p.values[1] == 2.0);
  CHECK(p.values[3] == 0.0);
  for (std::size_t i = 4; i < 9; ++i) CHECK(p.values[i] == 0.0);
  FrameFeatures one = f;
  one.envelope.resize(2);
  one.gain.resize(1);
  one.f0.resize(1);
  one.vuv.resize(1);
  CHECK_ERRC(pool_utterance(one), Errc::kTooFewFrames);
}

TEST_CASE("feature csv dump") {
  const FrameFeatures f = random_tracks(3, 2, 6);
  const std::string csv = features_to_csv(f);
  CHECK(csv.rfind("mel_0,mel_1,f0,gain,vuv\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

}  // namespace
}  // namespace originrank
