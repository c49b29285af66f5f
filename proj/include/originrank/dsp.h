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

#ifndef ORIGINRANK_DSP_H_
#define ORIGINRANK_DSP_H_

#include <complex>
#include <span>
#include <vector>

namespace originrank {

bool is_power_of_two(int n);

// In-place iterative radix-2 forward DFT. data.size() must be a power of two.
void fft_inplace(std::span<std::complex<double>> data);

// Radix-2 transform of a fixed size with precomputed twiddles and
// bit-reversal permutation. Reusable across frames.
class FftPlan {
 public:
  explicit FftPlan(int size);

  int size() const { return size_; }
  // Forward (inverse = false) or unnormalized inverse transform, in place.
  void transform(std::span<std::complex<double>> data, bool inverse = false) const;

 private:
  int size_;
  std::vector<std::size_t> bitrev_;
  std::vector<std::complex<double>> twiddles_;  // exp(-2 pi i k / size)
};

// Real-input transform of even size M computed with one complex transform of
// size M/2. Spectra hold bins 0 .. M/2.
class RealFft {
 public:
  explicit RealFft(int size);

  int size() const { return size_; }
  // input may be shorter than size(); it is zero-padded.
  void forward(std::span<const double> input,
               std::span<std::complex<double>> spectrum) const;
  // Unnormalized: inverse(forward(x)) == size() * x.
  void inverse(std::span<const std::complex<double>> spectrum,
               std::span<double> output) const;

 private:
  int size_;
  FftPlan half_;
  std::vector<std::complex<double>> twiddles_;  // exp(-2 pi i k / size)
};

// |X[k]| for k = 0 .. fft_size/2 of the zero-padded real frame.
std::vector<double> magnitude_spectrum(std::span<const double> frame, int fft_size);
// Same, reusing a plan; scratch and out have plan.size()/2+1 entries.
void magnitude_spectrum(const RealFft& plan, std::span<const double> frame,
                        std::span<std::complex<double>> scratch,
                        std::span<double> out);

// Symmetric Hann window of length n.
std::vector<double> hann_window(int n);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Triangular filters with edges equally spaced on the mel scale over
// [0, sample_rate/2]; filter k peaks at edge k+1 with unit height.
class MelFilterbank {
 public:
  MelFilterbank(int n_mel, int fft_size, int sample_rate);

  int size() const { return static_cast<int>(filters_.size()); }
  double center_hz(int k) const { return centers_hz_[static_cast<std::size_t>(k)]; }

  // Weighted magnitude sums, one per filter.
  void apply(std::span<const double> magnitudes, std::span<double> out) const;

 private:
  struct Filter {
    int first_bin = 0;
    std::vector<double> weights;
  };
  std::vector<Filter> filters_;
  std::vector<double> centers_hz_;
};

}  // namespace originrank

#endif  // ORIGINRANK_DSP_H_
