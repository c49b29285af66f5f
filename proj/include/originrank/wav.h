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

#ifndef ORIGINRANK_WAV_H_
#define ORIGINRANK_WAV_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace originrank {

// Mono audio, samples nominally in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 0;

  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }
};

// Reads a RIFF/WAVE PCM16 mono file. Samples are scaled by 1/32768.
Waveform load_wav(const std::filesystem::path& path);
Waveform parse_wav(std::span<const unsigned char> bytes,
                   const std::string& source_name = "<memory>");

// Writes PCM16 mono, little-endian. Samples must be finite and in [-1, 1].
void save_wav(const Waveform& waveform, const std::filesystem::path& path);
std::vector<unsigned char> encode_wav(const Waveform& waveform);

}  // namespace originrank

#endif  // ORIGINRANK_WAV_H_
