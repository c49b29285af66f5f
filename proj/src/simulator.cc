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

#include "originrank/simulator.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>

#include "originrank/dsp.h"
#include "originrank/error.h"
#include "originrank/io_util.h"

namespace originrank {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// RMS of the harmonic part at level 0 dB.
constexpr double kReferenceRms = 0.05;
// Unvoiced frames carry aspiration noise this far below the harmonic level.
constexpr double kAspirationDb = -12.0;
constexpr double kHarmonicCeiling = 0.95;  // fraction of Nyquist

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double interp_env_db(std::span<const double> row, std::span<const double> grid_mel,
                     double hz) {
  const double m = hz_to_mel(hz);
  if (m <= grid_mel.front()) return row.front();
  if (m >= grid_mel.back()) return row.back();
  auto it = std::upper_bound(grid_mel.begin(), grid_mel.end(), m);
  const auto k = static_cast<std::size_t>(it - grid_mel.begin());
  const double frac = (m - grid_mel[k - 1]) / (grid_mel[k] - grid_mel[k - 1]);
  return row[k - 1] + frac * (row[k] - row[k - 1]);
}

}  // namespace

void SimConfig::validate() const {
  require(n_recorded >= 1 && n_synthetic >= 1, Errc::kInvalidConfig,
          "ranking needs at least one recorded and one synthetic utterance");
  require(duration_min > 0.0 && duration_min <= duration_max, Errc::kInvalidConfig,
          "duration range must be nonempty and positive");
  require(sample_rate > 0, Errc::kInvalidConfig, "sample_rate must be positive");
  require(f0_min > 0.0 && f0_min <= f0_max && f0_max < sample_rate / 4.0,
          Errc::kInvalidConfig, "bad F0 range");
  require(severity_min >= 0.0 && severity_min <= severity_max && severity_max <= 1.0,
          Errc::kInvalidConfig, "severity range must lie in [0,1]");
  require(n_env >= 2, Errc::kInvalidConfig, "n_env must be >= 2");
  require(frame_hop > 0.0 && std::lround(frame_hop * sample_rate) >= 1,
          Errc::kInvalidConfig, "frame_hop must be positive");
}

std::vector<double> mel_grid_hz(int n_env, int sample_rate) {
  const double mel_max = hz_to_mel(sample_rate / 2.0);
  std::vector<double> grid(static_cast<std::size_t>(n_env));
  for (int k = 0; k < n_env; ++k) {
    grid[static_cast<std::size_t>(k)] = mel_to_hz(mel_max * (k + 1) / (n_env + 1));
  }
  return grid;
}

UtteranceParams draw_clean_params(const SimConfig& config, std::mt19937_64& rng) {
  UtteranceParams p;
  p.sample_rate = config.sample_rate;
  p.hop_samples = static_cast<int>(std::lround(config.frame_hop * config.sample_rate));
  p.n_env = config.n_env;
  p.noise_floor_db = config.noise_floor_db;
  p.noise_seed = rng();
  const double duration = uniform(rng, config.duration_min, config.duration_max);
  p.num_samples = static_cast<std::size_t>(std::lround(duration * config.sample_rate));
  const auto hop = static_cast<std::size_t>(p.hop_samples);
  const std::size_t n_frames = (p.num_samples + hop - 1) / hop + 1;
  const double dt = config.frame_hop;

  // Pitch: base value, two slow undulations and a mild declination.
  const double f0_base = uniform(rng, config.f0_min, config.f0_max);
  const double a1 = uniform(rng, 0.03, 0.08), r1 = uniform(rng, 0.5, 2.0);
  const double a2 = uniform(rng, 0.01, 0.04), r2 = uniform(rng, 2.0, 5.0);
  const double ph1 = uniform(rng, 0.0, kTwoPi), ph2 = uniform(rng, 0.0, kTwoPi);
  const double decl = uniform(rng, 0.0, 0.08);
  // Level: per-utterance offset plus a syllable-rate modulation.
  const double level_offset = uniform(rng, -2.0, 2.0);
  const double level_rate = uniform(rng, 2.0, 4.0);
  const double level_phase = uniform(rng, 0.0, kTwoPi);
  // Three formant-like resonances, in dB over a spectral tilt.
  struct Formant { double freq, gain, width, rate, phase; };
  const Formant formants[3] = {
      {uniform(rng, 300, 800), uniform(rng, 10, 20), uniform(rng, 100, 200),
       uniform(rng, 1, 4), uniform(rng, 0, kTwoPi)},
      {uniform(rng, 900, 2200), uniform(rng, 10, 20), uniform(rng, 150, 300),
       uniform(rng, 1, 4), uniform(rng, 0, kTwoPi)},
      {uniform(rng, 2300, 3300), uniform(rng, 8, 16), uniform(rng, 200, 400),
       uniform(rng, 1, 4), uniform(rng, 0, kTwoPi)},
  };
  const double tilt = uniform(rng, 8.0, 10.0);  // dB per octave above 300 Hz

  p.f0.resize(n_frames);
  p.level_db.resize(n_frames);
  p.voiced.assign(n_frames, 0);
  p.envelope_db.resize(n_frames * static_cast<std::size_t>(p.n_env));
  const std::vector<double> grid = mel_grid_hz(p.n_env, p.sample_rate);
  const double total_time = static_cast<double>(n_frames) * dt;

  for (std::size_t t = 0; t < n_frames; ++t) {
    const double time = static_cast<double>(t) * dt;
    p.f0[t] = f0_base * (1.0 + a1 * std::sin(kTwoPi * r1 * time + ph1) +
                         a2 * std::sin(kTwoPi * r2 * time + ph2) -
                         decl * time / total_time);
    p.level_db[t] = level_offset + 4.0 * std::sin(kTwoPi * level_rate * time + level_phase);
    for (int k = 0; k < p.n_env; ++k) {
      const double hz = grid[static_cast<std::size_t>(k)];
      double db = -tilt * std::log2(std::max(hz, 300.0) / 300.0);
      for (const Formant& f : formants) {
        const double centre = f.freq * (1.0 + 0.08 * std::sin(kTwoPi * f.rate * time + f.phase));
        const double z = (hz - centre) / f.width;
        db += f.gain * std::exp(-0.5 * z * z);
      }
      p.envelope_db[t * static_cast<std::size_t>(p.n_env) + static_cast<std::size_t>(k)] = db;
    }
  }

  // Alternating unvoiced / voiced runs, starting and ending unvoiced.
  std::size_t t = 0;
  bool voiced = false;
  while (t < n_frames) {
    const double run_s = voiced ? uniform(rng, 0.15, 0.40) : uniform(rng, 0.03, 0.10);
    const auto run = std::max<std::size_t>(1, static_cast<std::size_t>(run_s / dt));
    for (std::size_t i = 0; i < run && t < n_frames; ++i, ++t) p.voiced[t] = voiced;
    voiced = !voiced;
  }
  const auto tail = std::min<std::size_t>(n_frames, static_cast<std::size_t>(0.03 / dt));
  for (std::size_t i = n_frames - tail; i < n_frames; ++i) p.voiced[i] = 0;
  return p;
}

std::vector<double> smooth_envelope(std::span<const double> row, int width) {
  const int n = static_cast<int>(row.size());
  std::vector<double> out(row.size());
  if (width <= 1) {
    std::copy(row.begin(), row.end(), out.begin());
    return out;
  }
  const int left = (width - 1) / 2;
  const int right = width - 1 - left;
  for (int k = 0; k < n; ++k) {
    const int lo = std::max(0, k - left);
    const int hi = std::min(n - 1, k + right);
    double sum = 0.0;
    for (int j = lo; j <= hi; ++j) sum += row[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(k)] = sum / (hi - lo + 1);
  }
  return out;
}

UtteranceParams degrade(const UtteranceParams& base, double severity,
                        std::mt19937_64& rng) {
  require(severity >= 0.0 && severity <= 1.0, Errc::kOutOfRange,
          "severity must lie in [0,1]");
  UtteranceParams p = base;
  p.severity = severity;
  const double d = severity;
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const double bias = d > 0.0 ? uniform(rng, -5.0 * d, 5.0 * d) : 0.0;
  for (double& f : p.f0) {
    f = std::max(50.0, f * (1.0 + 0.05 * d * gauss(rng)) + bias);
  }

  const int width = 1 + static_cast<int>(std::ceil(8.0 * d));
  const auto n_env = static_cast<std::size_t>(p.n_env);
  for (std::size_t t = 0; t < p.frames(); ++t) {
    std::span<double> row(p.envelope_db.data() + t * n_env, n_env);
    const std::vector<double> smoothed = smooth_envelope(row, width);
    std::copy(smoothed.begin(), smoothed.end(), row.begin());
  }

  p.noise_floor_db = base.noise_floor_db + 30.0 * d;

  const double flip = 0.1 * d;
  for (auto& v : p.voiced) {
    if (unit(rng) < flip) v = v ? 0 : 1;
  }
  return p;
}

Waveform render_utterance(const UtteranceParams& p) {
  Waveform wf;
  wf.sample_rate = p.sample_rate;
  wf.samples.assign(p.num_samples, 0.0);
  const auto hop = static_cast<std::size_t>(p.hop_samples);
  const auto n_env = static_cast<std::size_t>(p.n_env);
  const double nyquist = p.sample_rate / 2.0;
  const double f0_floor = *std::min_element(p.f0.begin(), p.f0.end());
  const auto max_harm = static_cast<std::size_t>(kHarmonicCeiling * nyquist / f0_floor);

  std::vector<double> grid_mel;
  for (double hz : mel_grid_hz(p.n_env, p.sample_rate)) grid_mel.push_back(hz_to_mel(hz));

  // Harmonic amplitudes per frame (zero when unvoiced or above the ceiling).
  auto harmonic_amps = [&](std::size_t t, std::vector<double>& amps) {
    std::fill(amps.begin(), amps.end(), 0.0);
    if (!p.voiced[t]) return;
    std::span<const double> row(p.envelope_db.data() + t * n_env, n_env);
    double power = 0.0;
    for (std::size_t h = 1; h <= max_harm; ++h) {
      const double hz = static_cast<double>(h) * p.f0[t];
      if (hz >= kHarmonicCeiling * nyquist) break;
      const double a = std::pow(10.0, interp_env_db(row, grid_mel, hz) / 20.0);
      amps[h - 1] = a;
      power += 0.5 * a * a;
    }
    const double target = kReferenceRms * std::pow(10.0, p.level_db[t] / 20.0);
    const double scale = power > 0.0 ? target / std::sqrt(power) : 0.0;
    for (double& a : amps) a *= scale;
  };

  // Initial phases are drawn from the noise stream so a degraded copy that
  // shares noise_seed starts from the same phases as its base.
  std::mt19937_64 phase_rng(p.noise_seed ^ 0x5bd1e995ULL);
  std::vector<std::complex<double>> osc(max_harm);
  for (auto& z : osc) z = std::polar(1.0, uniform(phase_rng, 0.0, kTwoPi));

  std::vector<double> cur(max_harm), next(max_harm), step(max_harm);
  harmonic_amps(0, cur);
  for (std::size_t t = 0; t * hop < p.num_samples; ++t) {
    harmonic_amps(t + 1, next);
    const std::size_t begin = t * hop;
    const std::size_t end = std::min(p.num_samples, begin + hop);
    const double w = kTwoPi * p.f0[t] / p.sample_rate;
    for (std::size_t h = 0; h < max_harm; ++h) {
      step[h] = (next[h] - cur[h]) / static_cast<double>(hop);
      if (cur[h] == 0.0 && next[h] == 0.0) continue;
      std::complex<double> z = osc[h] / std::abs(osc[h]);
      const std::complex<double> rot = std::polar(1.0, w * static_cast<double>(h + 1));
      double amp = cur[h];
      for (std::size_t n = begin; n < end; ++n) {
        wf.samples[n] += amp * z.imag();
        z *= rot;
        amp += step[h];
      }
      osc[h] = z;
    }
    // Oscillators that were silent still advance so their phase stays
    // consistent with the pitch contour.
    for (std::size_t h = 0; h < max_harm; ++h) {
      if (cur[h] == 0.0 && next[h] == 0.0) {
        osc[h] *= std::polar(1.0, w * static_cast<double>(h + 1) *
                                      static_cast<double>(end - begin));
      }
    }
    std::swap(cur, next);
  }

  // Aspiration in unvoiced frames and a stationary noise floor, drawn from
  // fixed streams so that only their scale depends on the parameters.
  std::mt19937_64 asp_rng(p.noise_seed);
  std::mt19937_64 floor_rng(splitmix64(p.noise_seed));
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double floor_rms = kReferenceRms * std::pow(10.0, p.noise_floor_db / 20.0);
  auto asp_level = [&](std::size_t t) {
    return p.voiced[t] ? 0.0
                       : kReferenceRms * std::pow(10.0, (p.level_db[t] + kAspirationDb) / 20.0);
  };
  for (std::size_t t = 0; t * hop < p.num_samples; ++t) {
    const double a0 = asp_level(t), a1 = asp_level(t + 1);
    const std::size_t begin = t * hop;
    const std::size_t end = std::min(p.num_samples, begin + hop);
    for (std::size_t n = begin; n < end; ++n) {
      const double frac = static_cast<double>(n - begin) / static_cast<double>(hop);
      const double asp = gauss(asp_rng);
      const double flo = gauss(floor_rng);
      wf.samples[n] += (a0 + (a1 - a0) * frac) * asp + floor_rms * flo;
    }
  }
  for (double& s : wf.samples) s = std::clamp(s, -1.0, 1.0);
  return wf;
}

FrameFeatures ground_truth_tracks(const UtteranceParams& p) {
  FrameFeatures f;
  f.n_mel = p.n_env;
  f.envelope = p.envelope_db;
  f.f0.resize(p.frames());
  f.gain = p.level_db;
  f.vuv = p.voiced;
  for (std::size_t t = 0; t < p.frames(); ++t) f.f0[t] = p.voiced[t] ? p.f0[t] : 0.0;
  return f;
}

double true_f0_at(const UtteranceParams& p, std::size_t sample) {
  const std::size_t t = std::min(p.frames() - 1, sample / static_cast<std::size_t>(p.hop_samples));
  return p.voiced[t] ? p.f0[t] : 0.0;
}

std::vector<SimulatedUtterance> simulate_utterances(const SimConfig& config,
                                                    std::uint64_t seed) {
  config.validate();
  std::vector<SimulatedUtterance> out(
      static_cast<std::size_t>(config.n_recorded + config.n_synthetic));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < config.n_recorded + config.n_synthetic; ++i) {
    char name[64];
    const bool synthetic = i >= config.n_recorded;
    const int local = synthetic ? i - config.n_recorded : i;
    std::mt19937_64 rng(splitmix64(seed * 0x100000001b3ULL + (synthetic ? 0x80000000ULL : 0) +
                                   static_cast<std::uint64_t>(local)));
    SimulatedUtterance& u = out[static_cast<std::size_t>(i)];
    UtteranceParams clean = draw_clean_params(config, rng);
    u.record.sample_rate = config.sample_rate;
    if (!synthetic) {
      std::snprintf(name, sizeof(name), "rec_%04d", local);
      u.record.id = name;
      u.record.label = Label::kRecorded;
      u.record.path = "recorded/" + u.record.id + ".wav";
      u.params = std::move(clean);
      u.waveform = render_utterance(u.params);
    } else {
      std::snprintf(name, sizeof(name), "syn_%04d", local);
      u.record.id = name;
      u.record.label = Label::kSynthetic;
      u.record.path = "synthetic/" + u.record.id + ".wav";
      const double d = config.severity_min == config.severity_max
                           ? config.severity_min
                           : uniform(rng, config.severity_min, config.severity_max);
      u.record.degradation = d;
      u.record.base_id = u.record.id + "_base";
      u.record.base_path = "base/" + *u.record.base_id + ".wav";
      u.params = degrade(clean, d, rng);
      u.waveform = render_utterance(u.params);
      u.base_waveform = render_utterance(clean);
      u.base_params = std::move(clean);
    }
  }
  return out;
}

CorpusIndex simulate_corpus(const SimConfig& config, std::uint64_t seed,
                            const std::filesystem::path& out_dir) {
  std::vector<SimulatedUtterance> utts = simulate_utterances(config, seed);
  CorpusIndex index;
  index.root = out_dir;
  for (auto& u : utts) {
    save_wav(u.waveform, out_dir / u.record.path);
    if (u.base_waveform) save_wav(*u.base_waveform, out_dir / *u.record.base_path);
    index.records.push_back(u.record);
  }
  validate_records(index.records);
  write_manifest(index, out_dir / "manifest.jsonl");
  return index;
}

}  // namespace originrank
