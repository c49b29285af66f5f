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
#include <limits>
#include <numeric>

#include "originrank/error.h"
#include "originrank/io_util.h"

namespace originrank {

// A local NACF maximum within this fraction of the global maximum wins if
// it sits at a shorter lag; this suppresses period-doubling picks.
constexpr double kOctaveTolerance = 0.9;

void FeatureConfig::validate(int sample_rate) const {
  require(sample_rate > 0, Errc::kInvalidConfig, "sample_rate must be positive");
  require(frame_hop > 0.0 && frame_len > 0.0, Errc::kInvalidConfig,
          "frame_hop and frame_len must be positive");
  require(frame_len >= frame_hop, Errc::kInvalidConfig, "frame_len must be >= frame_hop");
  require(n_mel >= 2, Errc::kInvalidConfig, "n_mel must be >= 2");
  require(f0_min > 0.0 && f0_min < f0_max && f0_max < sample_rate / 2.0,
          Errc::kInvalidConfig, "need 0 < f0_min < f0_max < sample_rate/2");
  require(mag_floor > 0.0, Errc::kInvalidConfig, "mag_floor must be positive");
  require(hop_samples(sample_rate) >= 1, Errc::kInvalidConfig, "hop shorter than a sample");
  require(is_power_of_two(fft_size) && fft_size >= frame_samples(sample_rate),
          Errc::kInvalidConfig, "fft_size must be a power of two >= frame samples");
}

int FeatureConfig::frame_samples(int sample_rate) const {
  return static_cast<int>(std::lround(frame_len * sample_rate));
}

int FeatureConfig::hop_samples(int sample_rate) const {
  return static_cast<int>(std::lround(frame_hop * sample_rate));
}

int FeatureConfig::f0_context_samples(int sample_rate) const {
  return static_cast<int>(std::ceil(2.0 * sample_rate / f0_min - 1e-9));
}

std::size_t frame_count(std::size_t num_samples, int sample_rate,
                        const FeatureConfig& config) {
  const auto flen = static_cast<std::size_t>(config.frame_samples(sample_rate));
  const auto hop = static_cast<std::size_t>(config.hop_samples(sample_rate));
  if (num_samples < flen || flen == 0) {
    throw Error(Errc::kTooShort, "signal of " + std::to_string(num_samples) +
                                     " samples is shorter than one frame");
  }
  return 1 + (num_samples - flen) / hop;
}

std::vector<std::vector<double>> frame_signal(const Waveform& waveform,
                                              const FeatureConfig& config) {
  config.validate(waveform.sample_rate);
  const std::size_t n = frame_count(waveform.samples.size(), waveform.sample_rate, config);
  const int flen = config.frame_samples(waveform.sample_rate);
  const auto hop = static_cast<std::size_t>(config.hop_samples(waveform.sample_rate));
  const std::vector<double> window = hann_window(flen);
  std::vector<std::vector<double>> frames(n, std::vector<double>(window.size()));
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t i = 0; i < window.size(); ++i) {
      frames[t][i] = waveform.samples[t * hop + i] * window[i];
    }
  }
  return frames;
}

double frame_gain(std::span<const double> frame, double mag_floor) {
  double energy = 0.0;
  for (double s : frame) energy += s * s;
  if (!frame.empty()) energy /= static_cast<double>(frame.size());
  return 10.0 * std::log10(std::max(energy, mag_floor * mag_floor));
}

namespace {

const FeatureConfig& checked(const FeatureConfig& config, int sample_rate) {
  config.validate(sample_rate);
  return config;
}

// Zero padding long enough that the circular autocorrelation equals the
// linear one up to the largest lag searched.
int autocorr_size(const FeatureConfig& config, int sample_rate) {
  const int needed = config.f0_context_samples(sample_rate) +
                     static_cast<int>(std::ceil(sample_rate / config.f0_min)) + 2;
  int size = 1;
  while (size < needed) size <<= 1;
  return size;
}

}  // namespace

FeatureExtractor::FeatureExtractor(const FeatureConfig& config, int sample_rate)
    : config_(checked(config, sample_rate)),
      sample_rate_(sample_rate),
      window_(hann_window(config.frame_samples(sample_rate))),
      filterbank_(config.n_mel, config.fft_size, sample_rate),
      spectrum_fft_(config.fft_size),
      autocorr_fft_(autocorr_size(config, sample_rate)) {}

void FeatureExtractor::log_mel_envelope(std::span<const double> frame,
                                        std::span<double> out) const {
  std::vector<double> mag(static_cast<std::size_t>(config_.fft_size / 2 + 1));
  std::vector<std::complex<double>> scratch(mag.size());
  magnitude_spectrum(spectrum_fft_, frame, scratch, mag);
  filterbank_.apply(mag, out);
  for (double& v : out) v = 20.0 * std::log10(std::max(v, config_.mag_floor));
}

F0Estimate FeatureExtractor::estimate_f0(std::span<const double> context,
                                         bool passes_energy_gate) const {
  const std::size_t n = context.size();
  const int sr = sample_rate_;
  const auto lag_min = static_cast<std::size_t>(std::floor(sr / config_.f0_max));
  const auto lag_max = std::min(static_cast<std::size_t>(std::ceil(sr / config_.f0_min)),
                                n > 2 ? n - 2 : 0);
  F0Estimate est;
  if (lag_min < 2 || lag_max <= lag_min) return est;

  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + context[i] * context[i];
  if (prefix[n] <= 0.0) return est;

  // Raw autocorrelation through the power spectrum.
  std::vector<std::complex<double>> spec(static_cast<std::size_t>(autocorr_fft_.size() / 2 + 1));
  std::vector<double> acf(static_cast<std::size_t>(autocorr_fft_.size()));
  autocorr_fft_.forward(context, spec);
  for (auto& c : spec) c = std::norm(c);
  autocorr_fft_.inverse(spec, acf);
  const double inv_size = 1.0 / autocorr_fft_.size();

  // r[k] holds the NACF at lag lag_min - 1 + k.
  const std::size_t first = lag_min - 1;
  const std::size_t last = lag_max + 1;
  std::vector<double> r(last - first + 1, 0.0);
  for (std::size_t lag = first; lag <= last && lag < n; ++lag) {
    const std::size_t len = n - lag;
    const double acc = acf[lag] * inv_size;
    const double e0 = prefix[len];
    const double e1 = prefix[n] - prefix[lag];
    const double denom = std::sqrt(e0 * e1);
    r[lag - first] = denom > 0.0 ? acc / denom : 0.0;
  }

  std::size_t best = lag_min;
  for (std::size_t lag = lag_min; lag <= lag_max; ++lag) {
    if (r[lag - first] > r[best - first]) best = lag;
  }
  const double global = r[best - first];
  for (std::size_t lag = lag_min + 1; lag < best; ++lag) {
    const double v = r[lag - first];
    if (v >= kOctaveTolerance * global && v >= r[lag - first - 1] &&
        v >= r[lag - first + 1]) {
      best = lag;
      break;
    }
  }

  const double left = r[best - first - 1];
  const double mid = r[best - first];
  const double right = r[best - first + 1];
  const double curvature = left - 2.0 * mid + right;
  double delta = 0.0;
  if (curvature < 0.0) {
    delta = std::clamp(0.5 * (left - right) / curvature, -0.5, 0.5);
  }
  est.nacf_peak = mid - 0.25 * (left - right) * delta;
  const double lag = static_cast<double>(best) + delta;
  if (est.nacf_peak >= config_.nacf_voicing_threshold && passes_energy_gate) {
    est.f0 = std::clamp(sr / lag, config_.f0_min, config_.f0_max);
  }
  return est;
}

FrameFeatures FeatureExtractor::extract(const Waveform& waveform) const {
  if (waveform.sample_rate != sample_rate_) {
    throw Error(Errc::kInvalidConfig, "waveform sample rate does not match extractor");
  }
  const std::size_t total = waveform.samples.size();
  const std::size_t n_frames = frame_count(total, sample_rate_, config_);
  const std::size_t flen = window_.size();
  const auto hop = static_cast<std::size_t>(config_.hop_samples(sample_rate_));
  const auto ctx_len = static_cast<std::size_t>(config_.f0_context_samples(sample_rate_));
  const auto n_mel = static_cast<std::size_t>(config_.n_mel);

  FrameFeatures out;
  out.n_mel = config_.n_mel;
  out.envelope.resize(n_frames * n_mel);
  out.f0.assign(n_frames, 0.0);
  out.gain.resize(n_frames);
  out.vuv.assign(n_frames, 0);

  std::vector<double> frame(flen);
  for (std::size_t t = 0; t < n_frames; ++t) {
    const double* src = waveform.samples.data() + t * hop;
    out.gain[t] = frame_gain({src, flen}, config_.mag_floor);
    for (std::size_t i = 0; i < flen; ++i) frame[i] = src[i] * window_[i];
    log_mel_envelope(frame, {out.envelope.data() + t * n_mel, n_mel});
  }

  const double max_gain = *std::max_element(out.gain.begin(), out.gain.end());
  std::vector<double> context(ctx_len);
  for (std::size_t t = 0; t < n_frames; ++t) {
    const auto center = static_cast<long long>(t * hop + flen / 2);
    const long long start = center - static_cast<long long>(ctx_len / 2);
    for (std::size_t i = 0; i < ctx_len; ++i) {
      const long long idx = start + static_cast<long long>(i);
      context[i] = (idx >= 0 && idx < static_cast<long long>(total))
                       ? waveform.samples[static_cast<std::size_t>(idx)]
                       : 0.0;
    }
    const bool gate = out.gain[t] >= max_gain + config_.energy_gate_db &&
                      out.gain[t] > 20.0 * std::log10(config_.mag_floor);
    const F0Estimate est = estimate_f0(context, gate);
    out.f0[t] = est.f0;
    out.vuv[t] = est.f0 > 0.0 ? 1 : 0;
  }
  return out;
}

std::vector<double> log_mel_envelope(std::span<const double> frame,
                                     int sample_rate, const FeatureConfig& config) {
  FeatureExtractor ex(config, sample_rate);
  std::vector<double> out(static_cast<std::size_t>(config.n_mel));
  ex.log_mel_envelope(frame, out);
  return out;
}

F0Estimate estimate_f0(std::span<const double> context, int sample_rate,
                       const FeatureConfig& config, bool passes_energy_gate) {
  return FeatureExtractor(config, sample_rate).estimate_f0(context, passes_energy_gate);
}

FrameFeatures extract_features(const Waveform& waveform, const FeatureConfig& config) {
  return FeatureExtractor(config, waveform.sample_rate).extract(waveform);
}

PooledVector pool_utterance(const FrameFeatures& f) {
  const std::size_t T = f.frames();
  if (T < 2) throw Error(Errc::kTooFewFrames, "pooling needs at least 2 frames");
  const auto n = static_cast<std::size_t>(f.n_mel);
  PooledVector pv;
  pv.values.assign(2 * (n + 2) + 1, 0.0);
  auto& v = pv.values;

  for (std::size_t k = 0; k < n; ++k) {
    double sum = 0.0;
    for (std::size_t t = 0; t < T; ++t) sum += f.envelope[t * n + k];
    const double mean = sum / static_cast<double>(T);
    double ss = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      const double d = f.envelope[t * n + k] - mean;
      ss += d * d;
    }
    v[k] = mean;
    v[n + 2 + k] = std::sqrt(ss / static_cast<double>(T));
  }
  {
    const double mean = std::accumulate(f.gain.begin(), f.gain.end(), 0.0) /
                        static_cast<double>(T);
    double ss = 0.0;
    for (double g : f.gain) ss += (g - mean) * (g - mean);
    v[n] = mean;
    v[2 * n + 2] = std::sqrt(ss / static_cast<double>(T));
  }
  std::size_t voiced = 0;
  double sum = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    if (f.vuv[t]) {
      ++voiced;
      sum += f.f0[t];
    }
  }
  const double rate = static_cast<double>(voiced) / static_cast<double>(T);
  if (voiced > 0) {
    const double mean = sum / static_cast<double>(voiced);
    double ss = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      if (f.vuv[t]) ss += (f.f0[t] - mean) * (f.f0[t] - mean);
    }
    v[n + 1] = mean;
    v[2 * n + 3] = std::sqrt(ss / static_cast<double>(voiced));
  } else {
    v[n + 1] = 0.0;
    v[2 * n + 3] = rate;
  }
  v[2 * n + 4] = rate;
  return pv;
}

std::string features_to_csv(const FrameFeatures& f) {
  std::string out;
  for (int k = 0; k < f.n_mel; ++k) out += "mel_" + std::to_string(k) + ",";
  out += "f0,gain,vuv\n";
  for (std::size_t t = 0; t < f.frames(); ++t) {
    for (int k = 0; k < f.n_mel; ++k) out += format_double(f.env(t, k)) + ",";
    out += format_double(f.f0[t]) + "," + format_double(f.gain[t]) + "," +
           std::to_string(static_cast<int>(f.vuv[t])) + "\n";
  }
  return out;
}

}  // namespace originrank
