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

#ifndef ORIGINRANK_SIMULATOR_H_
#define ORIGINRANK_SIMULATOR_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <vector>

#include "originrank/corpus.h"
#include "originrank/features.h"
#include "originrank/wav.h"

namespace originrank {

struct SimConfig {
  int n_recorded = 100;
  int n_synthetic = 400;
  double duration_min = 1.0;  // seconds
  double duration_max = 1.5;
  int sample_rate = 24000;
  double f0_min = 100.0;  // Hz, range of the per-utterance base pitch
  double f0_max = 240.0;
  double severity_min = 0.0;  // synthetic severities are uniform on this range
  double severity_max = 1.0;
  int n_env = 24;              // mel-grid points of the synthesis envelope
  double noise_floor_db = -40.0;
  double frame_hop = 0.005;

  void validate() const;
};

// Frame-rate description of one utterance, rendered to audio by
// render_utterance(). Arrays have frames() = ceil(num_samples / hop) + 1
// entries; frame t is anchored at sample t * hop_samples.
struct UtteranceParams {
  int sample_rate = 24000;
  int hop_samples = 120;
  std::size_t num_samples = 0;
  int n_env = 24;
  std::vector<double> f0;            // contour, defined on every frame
  std::vector<std::uint8_t> voiced;
  std::vector<double> level_db;      // harmonic level relative to the reference
  std::vector<double> envelope_db;   // frames x n_env, on the mel grid
  double noise_floor_db = -40.0;
  std::uint64_t noise_seed = 0;
  double severity = 0.0;

  std::size_t frames() const { return f0.size(); }
};

// Centers (Hz) of the synthesis mel grid; they coincide with the centers of
// a MelFilterbank with the same number of bands.
std::vector<double> mel_grid_hz(int n_env, int sample_rate);

UtteranceParams draw_clean_params(const SimConfig& config, std::mt19937_64& rng);

// Applies the severity-d corruption: F0 jitter (std 0.05 d) plus a bias of at
// most 5 d Hz, envelope moving average over 1 + ceil(8 d) mel points, noise
// floor raised by 30 d dB, voicing flips with probability 0.1 d per frame.
UtteranceParams degrade(const UtteranceParams& base, double severity,
                        std::mt19937_64& rng);

// Moving average of one envelope row with the given odd-or-even width,
// truncated at the edges.
std::vector<double> smooth_envelope(std::span<const double> row, int width);

Waveform render_utterance(const UtteranceParams& params);

// Ground-truth tracks at the simulator frame rate (gain = level_db).
FrameFeatures ground_truth_tracks(const UtteranceParams& params);

// True F0 at a sample position (0 where the containing frame is unvoiced).
double true_f0_at(const UtteranceParams& params, std::size_t sample);

struct SimulatedUtterance {
  UtteranceRecord record;
  UtteranceParams params;
  Waveform waveform;
  std::optional<UtteranceParams> base_params;
  std::optional<Waveform> base_waveform;
};

// Deterministic in (config, seed); each utterance draws from its own stream.
std::vector<SimulatedUtterance> simulate_utterances(const SimConfig& config,
                                                    std::uint64_t seed);

// Writes WAVs under out_dir/{recorded,synthetic,base}/ and
// out_dir/manifest.jsonl, returning the index as scan_corpus would.
CorpusIndex simulate_corpus(const SimConfig& config, std::uint64_t seed,
                            const std::filesystem::path& out_dir);

}  // namespace originrank

#endif  // ORIGINRANK_SIMULATOR_H_
