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

#ifndef ORIGINRANK_FEATURES_H_
#define ORIGINRANK_FEATURES_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "originrank/dsp.h"
#include "originrank/wav.h"

namespace originrank {

struct FeatureConfig {
  double frame_hop = 0.005;   // seconds
  double frame_len = 0.025;   // seconds
  int fft_size = 1024;
  int n_mel = 24;
  double f0_min = 70.0;
  double f0_max = 400.0;
  double nacf_voicing_threshold = 0.30;
  double energy_gate_db = -60.0;  // relative to the utterance's loudest frame
  double mag_floor = 1e-10;

  // Throws InvalidConfig when an invariant fails for this sample rate.
  void validate(int sample_rate) const;

  int frame_samples(int sample_rate) const;
  int hop_samples(int sample_rate) const;
  // F0 analysis context: two periods of the lowest admissible F0.
  int f0_context_samples(int sample_rate) const;
  // Dimension of the pooled utterance vector.
  int pooled_dim() const { return 2 * (n_mel + 2) + 1; }
};

// Per-frame acoustic tracks. envelope is T x n_mel, row-major, in dB.
struct FrameFeatures {
  int n_mel = 0;
  std::vector<double> envelope;
  std::vector<double> f0;    // Hz, 0 when unvoiced
  std::vector<double> gain;  // dB
  std::vector<std::uint8_t> vuv;

  std::size_t frames() const { return f0.size(); }
  double env(std::size_t t, int k) const {
    return envelope[t * static_cast<std::size_t>(n_mel) + static_cast<std::size_t>(k)];
  }
  std::span<const double> env_row(std::size_t t) const {
    return {envelope.data() + t * static_cast<std::size_t>(n_mel),
            static_cast<std::size_t>(n_mel)};
  }
  bool operator==(const FrameFeatures&) const = default;
};

// Utterance summary consumed by the VAE. Layout for n = n_mel:
//   [0, n)        mean log-mel envelope
//   n             mean gain (dB)
//   n+1           mean F0 over voiced frames (0 if none)
//   [n+2, 2n+2)   std of log-mel envelope
//   2n+2          std of gain
//   2n+3          std of voiced F0 (0 if no voiced frames, i.e. the voicing rate)
//   2n+4          voicing rate
struct PooledVector {
  std::vector<double> values;
  bool operator==(const PooledVector&) const = default;
};

struct F0Estimate {
  double f0 = 0.0;
  double nacf_peak = 0.0;
};

// T = 1 + floor((L - frame_len*sr) / (hop*sr)); throws TooShort when L is
// shorter than one frame.
std::size_t frame_count(std::size_t num_samples, int sample_rate,
                        const FeatureConfig& config);

std::vector<std::vector<double>> frame_signal(const Waveform& waveform,
                                              const FeatureConfig& config);

double frame_gain(std::span<const double> frame, double mag_floor = 1e-10);

// Caches the window and filterbank for one (config, sample_rate).
class FeatureExtractor {
 public:
  FeatureExtractor(const FeatureConfig& config, int sample_rate);

  const FeatureConfig& config() const { return config_; }
  int sample_rate() const { return sample_rate_; }

  // frame is already windowed; writes n_mel dB values.
  void log_mel_envelope(std::span<const double> frame, std::span<double> out) const;
  F0Estimate estimate_f0(std::span<const double> context,
                         bool passes_energy_gate = true) const;
  FrameFeatures extract(const Waveform& waveform) const;

 private:
  FeatureConfig config_;
  int sample_rate_;
  std::vector<double> window_;
  MelFilterbank filterbank_;
  RealFft spectrum_fft_;
  RealFft autocorr_fft_;
};

std::vector<double> log_mel_envelope(std::span<const double> frame,
                                     int sample_rate, const FeatureConfig& config);

F0Estimate estimate_f0(std::span<const double> context, int sample_rate,
                       const FeatureConfig& config, bool passes_energy_gate = true);

FrameFeatures extract_features(const Waveform& waveform, const FeatureConfig& config);

PooledVector pool_utterance(const FrameFeatures& features);

// Debug dump: header mel_0..mel_{n-1},f0,gain,vuv then one line per frame.
std::string features_to_csv(const FrameFeatures& features);

}  // namespace originrank

#endif  // ORIGINRANK_FEATURES_H_
