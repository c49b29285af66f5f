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

#include "originrank/dsp.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "originrank/error.h"

namespace originrank {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void fft_inplace(std::span<std::complex<double>> data) {
  FftPlan(static_cast<int>(data.size())).transform(data);
}

FftPlan::FftPlan(int size) : size_(size) {
  if (!is_power_of_two(size)) {
    throw Error(Errc::kInvalidConfig, "fft size must be a power of two");
  }
  const auto n = static_cast<std::size_t>(size);
  bitrev_.resize(n);
  int bits = 0;
  while ((1 << bits) < size) ++bits;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (int b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
    bitrev_[i] = r;
  }
  twiddles_.resize(n / 2 > 0 ? n / 2 : 1);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / size;
    twiddles_[k] = {std::cos(angle), std::sin(angle)};
  }
}

void FftPlan::transform(std::span<std::complex<double>> data, bool inverse) const {
  const auto n = static_cast<std::size_t>(size_);
  if (data.size() != n) throw Error(Errc::kDimMismatch, "fft buffer size mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (i < bitrev_[i]) std::swap(data[i], data[bitrev_[i]]);
  }
  auto* d = reinterpret_cast<double*>(data.data());
  const double sign = inverse ? -1.0 : 1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t k = 0; k < half; ++k) {
      const double wr = twiddles_[k * stride].real();
      const double wi = sign * twiddles_[k * stride].imag();
      for (std::size_t i = 0; i < n; i += len) {
        const std::size_t a = 2 * (i + k);
        const std::size_t b = 2 * (i + k + half);
        const double vr = d[b] * wr - d[b + 1] * wi;
        const double vi = d[b] * wi + d[b + 1] * wr;
        d[b] = d[a] - vr;
        d[b + 1] = d[a + 1] - vi;
        d[a] += vr;
        d[a + 1] += vi;
      }
    }
  }
}

RealFft::RealFft(int size)
    : size_(size),
      half_(size >= 2 ? size / 2 : 0),
      twiddles_(static_cast<std::size_t>(size / 2 + 1)) {
  for (std::size_t k = 0; k < twiddles_.size(); ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / size;
    twiddles_[k] = {std::cos(angle), std::sin(angle)};
  }
}

void RealFft::forward(std::span<const double> input,
                      std::span<std::complex<double>> spectrum) const {
  const auto half = static_cast<std::size_t>(size_ / 2);
  if (input.size() > static_cast<std::size_t>(size_) || spectrum.size() != half + 1) {
    throw Error(Errc::kDimMismatch, "real fft buffer size mismatch");
  }
  for (std::size_t n = 0; n < half; ++n) {
    const double re = 2 * n < input.size() ? input[2 * n] : 0.0;
    const double im = 2 * n + 1 < input.size() ? input[2 * n + 1] : 0.0;
    spectrum[n] = {re, im};
  }
  half_.transform(spectrum.first(half));
  const std::complex<double> z0 = spectrum[0];
  spectrum[0] = {z0.real() + z0.imag(), 0.0};
  spectrum[half] = {z0.real() - z0.imag(), 0.0};
  const auto combine = [&](std::complex<double> zk, std::complex<double> zm,
                           std::size_t k) {
    const std::complex<double> zc = std::conj(zm);
    const std::complex<double> even = 0.5 * (zk + zc);
    const std::complex<double> odd = std::complex<double>(0.0, -0.5) * (zk - zc);
    return even + twiddles_[k] * odd;
  };
  for (std::size_t k = 1; 2 * k <= half; ++k) {
    const std::complex<double> zk = spectrum[k];
    const std::complex<double> zm = spectrum[half - k];
    spectrum[k] = combine(zk, zm, k);
    spectrum[half - k] = combine(zm, zk, half - k);
  }
}

void RealFft::inverse(std::span<const std::complex<double>> spectrum,
                      std::span<double> output) const {
  const auto half = static_cast<std::size_t>(size_ / 2);
  if (output.size() != static_cast<std::size_t>(size_) || spectrum.size() != half + 1) {
    throw Error(Errc::kDimMismatch, "real fft buffer size mismatch");
  }
  std::span<std::complex<double>> z(
      reinterpret_cast<std::complex<double>*>(output.data()), half);
  for (std::size_t k = 0; k < half; ++k) {
    const std::complex<double> xk = spectrum[k];
    const std::complex<double> xc = std::conj(spectrum[half - k]);
    const std::complex<double> even = 0.5 * (xk + xc);
    const std::complex<double> odd = 0.5 * (xk - xc) * std::conj(twiddles_[k]);
    z[k] = even + std::complex<double>(0.0, 1.0) * odd;
  }
  half_.transform(z, /*inverse=*/true);
  for (double& v : output) v *= 2.0;
}

std::vector<double> magnitude_spectrum(std::span<const double> frame, int fft_size) {
  if (!is_power_of_two(fft_size) || static_cast<std::size_t>(fft_size) < frame.size()) {
    throw Error(Errc::kInvalidConfig, "fft_size must be a power of two >= frame length");
  }
  std::vector<double> mag(static_cast<std::size_t>(fft_size / 2 + 1));
  std::vector<std::complex<double>> buf(mag.size());
  magnitude_spectrum(RealFft(fft_size), frame, buf, mag);
  return mag;
}

void magnitude_spectrum(const RealFft& plan, std::span<const double> frame,
                        std::span<std::complex<double>> scratch,
                        std::span<double> out) {
  plan.forward(frame, scratch);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = std::hypot(scratch[k].real(), scratch[k].imag());
  }
}

std::vector<double> hann_window(int n) {
  std::vector<double> w(static_cast<std::size_t>(std::max(n, 0)));
  if (n == 1) {
    w[0] = 1.0;
    return w;
  }
  for (int i = 0; i < n; ++i) {
    w[static_cast<std::size_t>(i)] =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / (n - 1));
  }
  return w;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank::MelFilterbank(int n_mel, int fft_size, int sample_rate) {
  if (n_mel < 2 || !is_power_of_two(fft_size) || sample_rate <= 0) {
    throw Error(Errc::kInvalidConfig, "bad mel filterbank parameters");
  }
  const double nyquist = sample_rate / 2.0;
  const double mel_max = hz_to_mel(nyquist);
  std::vector<double> edges(static_cast<std::size_t>(n_mel + 2));
  for (int i = 0; i < n_mel + 2; ++i) {
    edges[static_cast<std::size_t>(i)] = mel_to_hz(mel_max * i / (n_mel + 1));
  }
  const int n_bins = fft_size / 2 + 1;
  const double bin_hz = static_cast<double>(sample_rate) / fft_size;

  filters_.resize(static_cast<std::size_t>(n_mel));
  centers_hz_.resize(static_cast<std::size_t>(n_mel));
  for (int k = 0; k < n_mel; ++k) {
    const double lo = edges[static_cast<std::size_t>(k)];
    const double mid = edges[static_cast<std::size_t>(k + 1)];
    const double hi = edges[static_cast<std::size_t>(k + 2)];
    centers_hz_[static_cast<std::size_t>(k)] = mid;
    Filter& f = filters_[static_cast<std::size_t>(k)];
    f.first_bin = -1;
    for (int b = 0; b < n_bins; ++b) {
      const double hz = b * bin_hz;
      double w = 0.0;
      if (hz > lo && hz <= mid) {
        w = (hz - lo) / (mid - lo);
      } else if (hz > mid && hz < hi) {
        w = (hi - hz) / (hi - mid);
      }
      if (w > 0.0) {
        if (f.first_bin < 0) f.first_bin = b;
        f.weights.resize(static_cast<std::size_t>(b - f.first_bin + 1), 0.0);
        f.weights.back() = w;
      }
    }
    if (f.first_bin < 0) {
      // Filter narrower than one FFT bin: take the bin nearest its center.
      f.first_bin = std::min(n_bins - 1, static_cast<int>(std::lround(mid / bin_hz)));
      f.weights = {1.0};
    }
  }
}

void MelFilterbank::apply(std::span<const double> magnitudes,
                          std::span<double> out) const {
  for (std::size_t k = 0; k < filters_.size(); ++k) {
    const Filter& f = filters_[k];
    double acc = 0.0;
    for (std::size_t i = 0; i < f.weights.size(); ++i) {
      acc += f.weights[i] * magnitudes[static_cast<std::size_t>(f.first_bin) + i];
    }
    out[k] = acc;
  }
}

}  // namespace originrank
