/* Copyright 2026 The BECR Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef BECR_AUDIO_HPP_
#define BECR_AUDIO_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "becr/matrix.hpp"

namespace becr {

// Mono audio. Samples in [-1, 1] (small headroom tolerated), finite,
// non-empty.
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 0;
};

// Throws InvalidInputError when the buffer violates its invariants.
void validate_audio(const AudioBuffer& audio);

enum class WindowKind { kHann, kRectangular };

// Analysis window weights. Hann is 0.5 * (1 - cos(2*pi*n/(L-1))), symmetric
// with zero endpoints, and needs L >= 2; rectangular is all ones.
std::vector<double> make_window(WindowKind kind, std::size_t length);

enum class FrequencyAxis { kLinearHz, kMel, kLogCqt };

// Time-frequency magnitudes (frames x bins, nonnegative) with an explicit
// frequency-axis descriptor. bin_frequencies are Hz for linear and log axes,
// mel-scale centers for the mel axis; always strictly increasing.
struct Spectrogram {
  Matrix magnitudes;
  FrequencyAxis axis = FrequencyAxis::kLinearHz;
  std::vector<double> bin_frequencies;
  double frame_hop_seconds = 0.0;
};

struct StftConfig {
  std::size_t window_size = 1024;  // power of two
  std::size_t hop = 0;             // 0 means window_size / 4
  WindowKind window = WindowKind::kHann;

  std::size_t resolved_hop() const { return hop == 0 ? window_size / 4 : hop; }
};

// Short-time Fourier magnitudes. Frames start at multiples of the hop;
// frame count is 1 + floor((len - window_size)/hop); bins are the one-sided
// spectrum (window_size/2 + 1), bin j centered at j * sample_rate / window_size.
Spectrogram stft(const AudioBuffer& audio, const StftConfig& config);

// HTK mel scale: 2595 * log10(1 + hz/700).
double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Triangular mel filter weights, n_mels x bins. Centers uniformly spaced in
// mel between f_lo and f_hi; each triangle peaks at 1 at its center and
// reaches zero at the neighboring centers.
Matrix mel_filterbank(std::span<const double> bin_frequencies_hz, int n_mels,
                      double f_lo, double f_hi);

// Applies the filterbank to squared magnitudes of a linear-axis spectrogram.
// Output bin descriptors are the filter centers on the mel scale.
Spectrogram mel_spectrogram(const Spectrogram& linear, int n_mels, double f_lo,
                            double f_hi);

struct CqtConfig {
  double f_min = 32.70;
  int bins_per_octave = 12;
  int n_bins = 48;
  WindowKind window = WindowKind::kHann;
};

// Q = 1 / (2^(1/b) - 1): the constant ratio of center frequency to bandwidth.
double cqt_quality_factor(int bins_per_octave);

// Center frequencies f_k = f_min * 2^(k/b), computed so that
// f_{k+b} == 2 * f_k holds bit-exactly.
std::vector<double> cqt_bin_frequencies(const CqtConfig& config);

// Per-bin analysis lengths N[k] = ceil(Q * sample_rate / f_k).
std::vector<std::size_t> cqt_window_lengths(const CqtConfig& config, int sample_rate);

// Constant-Q magnitudes by direct per-frame evaluation (no FFT shortcut):
// X[k] = (1/N[k]) * sum_n W[k,n] x[n] e^(-j 2 pi Q n / N[k]), the window of
// length N[k] centered on the frame position and zero-padded at the signal
// edges. Frames advance by N[0]/2 samples. Requires the highest center
// frequency below Nyquist and the signal at least as long as the shortest
// window.
Spectrogram cqt(const AudioBuffer& audio, const CqtConfig& config);

}  // namespace becr

#endif  // BECR_AUDIO_HPP_
