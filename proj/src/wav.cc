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

#include "originrank/wav.h"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "originrank/error.h"

namespace originrank {
namespace {

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

void put_tag(std::vector<unsigned char>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

Waveform parse_wav(std::span<const unsigned char> bytes,
                   const std::string& source_name) {
  const std::size_t n = bytes.size();
  if (n < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(Errc::kMalformedHeader, source_name + ": not a RIFF/WAVE file");
  }
  std::uint32_t riff_size = read_u32(bytes.data() + 4);
  if (static_cast<std::size_t>(riff_size) + 8 > n) {
    throw Error(Errc::kMalformedHeader, source_name + ": RIFF size exceeds file");
  }

  bool have_fmt = false;
  int sample_rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  const std::size_t end = static_cast<std::size_t>(riff_size) + 8;
  while (pos + 8 <= end) {
    const unsigned char* chunk = bytes.data() + pos;
    std::uint32_t size = read_u32(chunk + 4);
    if (pos + 8 + static_cast<std::size_t>(size) > end) {
      throw Error(Errc::kMalformedHeader, source_name + ": chunk overruns file");
    }
    const unsigned char* body = chunk + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) {
        throw Error(Errc::kMalformedHeader, source_name + ": short fmt chunk");
      }
      std::uint16_t format = read_u16(body);
      std::uint16_t channels = read_u16(body + 2);
      std::uint32_t rate = read_u32(body + 4);
      std::uint16_t bits = read_u16(body + 14);
      if (format != 1) {
        throw Error(Errc::kUnsupported, source_name + ": audio format is not PCM");
      }
      if (channels != 1) {
        throw Error(Errc::kUnsupported, source_name + ": only mono is supported");
      }
      if (bits != 16) {
        throw Error(Errc::kUnsupported, source_name + ": only 16-bit PCM is supported");
      }
      if (rate == 0 || rate > 1000000) {
        throw Error(Errc::kMalformedHeader, source_name + ": bad sample rate");
      }
      sample_rate = static_cast<int>(rate);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (size % 2 != 0) {
        throw Error(Errc::kMalformedHeader, source_name + ": odd data chunk size");
      }
      data = body;
      data_size = size;
    }
    pos += 8 + size + (size & 1u);
  }
  if (!have_fmt || data == nullptr) {
    throw Error(Errc::kMalformedHeader, source_name + ": missing fmt or data chunk");
  }

  Waveform wf;
  wf.sample_rate = sample_rate;
  wf.samples.resize(data_size / 2);
  for (std::size_t i = 0; i < wf.samples.size(); ++i) {
    auto v = static_cast<std::int16_t>(read_u16(data + 2 * i));
    wf.samples[i] = static_cast<double>(v) / 32768.0;
  }
  return wf;
}

Waveform load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kNotFound, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return parse_wav(bytes, path.string());
}

std::vector<unsigned char> encode_wav(const Waveform& waveform) {
  if (waveform.samples.empty()) {
    throw Error(Errc::kOutOfRange, "cannot encode an empty waveform");
  }
  if (waveform.sample_rate <= 0) {
    throw Error(Errc::kOutOfRange, "sample rate must be positive");
  }
  for (double s : waveform.samples) {
    if (!std::isfinite(s) || s < -1.0 || s > 1.0) {
      throw Error(Errc::kOutOfRange, "sample outside [-1, 1]");
    }
  }
  const auto data_size = static_cast<std::uint32_t>(waveform.samples.size() * 2);
  std::vector<unsigned char> out;
  out.reserve(44 + data_size);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_size);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<std::uint32_t>(waveform.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(waveform.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  put_tag(out, "data");
  put_u32(out, data_size);
  for (double s : waveform.samples) {
    long q = std::lround(s * 32768.0);
    if (q > 32767) q = 32767;
    if (q < -32768) q = -32768;
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
  return out;
}

void save_wav(const Waveform& waveform, const std::filesystem::path& path) {
  std::vector<unsigned char> bytes = encode_wav(waveform);
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::kIoError, "short write to " + path.string());
}

}  // namespace originrank
