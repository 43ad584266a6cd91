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

#include "becr/audio.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "becr/errors.hpp"
#include "becr/parallel.hpp"

namespace becr {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

// Iterative radix-2 Cooley-Tukey, in place, with a precomputed twiddle table
// tw[k] = exp(-2*pi*i*k/n), k < n/2.
void fft_pow2(std::vector<std::complex<double>>& a,
              const std::vector<std::complex<double>>& tw) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len >> 1;
    const std::size_t step = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const std::complex<double> u = a[start + j];
        const std::complex<double> v = a[start + j + half] * tw[j * step];
        a[start + j] = u + v;
        a[start + j + half] = u - v;
      }
    }
  }
}

std::vector<std::complex<double>> make_twiddles(std::size_t n) {
  std::vector<std::complex<double>> tw(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double angle = -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
    tw[k] = {std::cos(angle), std::sin(angle)};
  }
  return tw;
}

}  // namespace

void validate_audio(const AudioBuffer& audio) {
  if (audio.samples.empty()) throw InvalidInputError("empty audio buffer");
  if (audio.sample_rate < 1) {
    throw InvalidInputError("sample rate must be positive, got " +
                            std::to_string(audio.sample_rate));
  }
  for (std::size_t i = 0; i < audio.samples.size(); ++i) {
    const double s = audio.samples[i];
    if (!std::isfinite(s)) {
      throw InvalidInputError("non-finite sample at index " + std::to_string(i));
    }
    if (std::fabs(s) > 1.0 + 1e-6) {
      throw InvalidInputError("sample " + std::to_string(i) + " outside [-1, 1]: " +
                              std::to_string(s));
    }
  }
}

std::vector<double> make_window(WindowKind kind, std::size_t length) {
  if (length == 0) throw InvalidInputError("window length must be positive");
  if (kind == WindowKind::kRectangular) {
    return std::vector<double>(length, 1.0);
  }
  if (length < 2) throw InvalidInputError("hann window needs length >= 2");
  std::vector<double> w(length);
  for (std::size_t n = 0; n < length; ++n) {
    w[n] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(n) /
                                 static_cast<double>(length - 1)));
  }
  return w;
}

Spectrogram stft(const AudioBuffer& audio, const StftConfig& config) {
  validate_audio(audio);
  const std::size_t m = config.window_size;
  const std::size_t hop = config.resolved_hop();
  if (!is_power_of_two(m) || m < 2) {
    throw InvalidInputError("window_size must be a power of two >= 2, got " +
                            std::to_string(m));
  }
  if (hop == 0 || hop > m) {
    throw InvalidInputError("hop must lie in (0, window_size]");
  }
  const std::size_t len = audio.samples.size();
  if (len < m) {
    throw InvalidInputError("input shorter than one window (" + std::to_string(len) +
                            " < " + std::to_string(m) + " samples)");
  }

  const std::size_t frames = 1 + (len - m) / hop;
  const std::size_t bins = m / 2 + 1;
  const std::vector<double> window = make_window(config.window, m);
  const std::vector<std::complex<double>> twiddles = make_twiddles(m);

  Spectrogram spec;
  spec.magnitudes = Matrix(frames, bins);
  spec.axis = FrequencyAxis::kLinearHz;
  spec.frame_hop_seconds = static_cast<double>(hop) / audio.sample_rate;
  spec.bin_frequencies.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    spec.bin_frequencies[b] = static_cast<double>(b) * audio.sample_rate /
                              static_cast<double>(m);
  }

  Matrix& out = spec.magnitudes;
  parallel_for(frames, [&](std::size_t frame) {
    std::vector<std::complex<double>> buf(m);
    const double* src = audio.samples.data() + frame * hop;
    for (std::size_t j = 0; j < m; ++j) buf[j] = src[j] * window[j];
    fft_pow2(buf, twiddles);
    double* row = out.data() + frame * bins;
    for (std::size_t b = 0; b < bins; ++b) row[b] = std::abs(buf[b]);
  });
  return spec;
}

double hz_to_mel(double hz) {
  if (!(hz >= 0.0) || !std::isfinite(hz)) {
    throw InvalidInputError("frequency must be nonnegative, got " + std::to_string(hz));
  }
  return 2595.0 * std::log10(1.0 + hz / 700.0);
}

double mel_to_hz(double mel) {
  if (!(mel >= 0.0) || !std::isfinite(mel)) {
    throw InvalidInputError("mel value must be nonnegative, got " + std::to_string(mel));
  }
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

Matrix mel_filterbank(std::span<const double> bin_frequencies_hz, int n_mels,
                      double f_lo, double f_hi) {
  if (n_mels < 1) throw InvalidInputError("n_mels must be >= 1");
  if (!(f_lo >= 0.0) || !(f_lo < f_hi)) {
    throw InvalidInputError("need 0 <= f_lo < f_hi");
  }
  const std::size_t bins = bin_frequencies_hz.size();
  if (bins == 0) throw InvalidInputError("empty frequency axis");

  const double mel_lo = hz_to_mel(f_lo);
  const double mel_hi = hz_to_mel(f_hi);
  std::vector<double> edges(static_cast<std::size_t>(n_mels) + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                            static_cast<double>(n_mels + 1);
  }

  Matrix weights(static_cast<std::size_t>(n_mels), bins, 0.0);
  for (std::size_t b = 0; b < bins; ++b) {
    const double mel = hz_to_mel(bin_frequencies_hz[b]);
    for (int i = 0; i < n_mels; ++i) {
      const double rise = (mel - edges[i]) / (edges[i + 1] - edges[i]);
      const double fall = (edges[i + 2] - mel) / (edges[i + 2] - edges[i + 1]);
      const double w = std::min(rise, fall);
      if (w > 0.0) weights(i, b) = w;
    }
  }
  return weights;
}

Spectrogram mel_spectrogram(const Spectrogram& linear, int n_mels, double f_lo,
                            double f_hi) {
  if (linear.axis != FrequencyAxis::kLinearHz) {
    throw InvalidInputError("mel_spectrogram needs a linear-frequency input");
  }
  if (linear.bin_frequencies.empty() || linear.magnitudes.empty()) {
    throw InvalidInputError("empty spectrogram");
  }
  const double nyquist = linear.bin_frequencies.back();
  if (!(f_hi <= nyquist * (1.0 + 1e-12))) {
    throw InvalidInputError("f_hi above the frequency axis (" + std::to_string(f_hi) +
                            " > " + std::to_string(nyquist) + ")");
  }
  const Matrix weights = mel_filterbank(linear.bin_frequencies, n_mels, f_lo, f_hi);
  const std::size_t bins = weights.cols();

  // Triangles have contiguous support; precompute each filter's span.
  std::vector<std::pair<std::size_t, std::size_t>> support(n_mels, {bins, bins});
  for (int i = 0; i < n_mels; ++i) {
    std::size_t lo = bins;
    std::size_t hi = bins;
    for (std::size_t b = 0; b < bins; ++b) {
      if (weights(i, b) > 0.0) {
        if (lo == bins) lo = b;
        hi = b + 1;
      }
    }
    support[i] = {lo, hi};
  }

  const std::size_t frames = linear.magnitudes.rows();
  Spectrogram out;
  out.axis = FrequencyAxis::kMel;
  out.frame_hop_seconds = linear.frame_hop_seconds;
  out.magnitudes = Matrix(frames, static_cast<std::size_t>(n_mels), 0.0);
  out.bin_frequencies.resize(n_mels);
  const double mel_lo = hz_to_mel(f_lo);
  const double mel_hi = hz_to_mel(f_hi);
  for (int i = 0; i < n_mels; ++i) {
    out.bin_frequencies[i] = mel_lo + (mel_hi - mel_lo) * static_cast<double>(i + 1) /
                                          static_cast<double>(n_mels + 1);
  }

  Matrix& result = out.magnitudes;
  parallel_for(frames, [&](std::size_t frame) {
    const double* mag = linear.magnitudes.data() + frame * bins;
    double* row = result.data() + frame * static_cast<std::size_t>(n_mels);
    for (int i = 0; i < n_mels; ++i) {
      const auto [lo, hi] = support[i];
      double acc = 0.0;
      for (std::size_t b = lo; b < hi; ++b) {
        acc += weights(i, b) * mag[b] * mag[b];  // filters act on power
      }
      row[i] = acc;
    }
  });
  return out;
}

double cqt_quality_factor(int bins_per_octave) {
  if (bins_per_octave < 1) throw InvalidInputError("bins_per_octave must be >= 1");
  return 1.0 / (std::pow(2.0, 1.0 / bins_per_octave) - 1.0);
}

std::vector<double> cqt_bin_frequencies(const CqtConfig& config) {
  if (!(config.f_min > 0.0)) throw InvalidInputError("f_min must be positive");
  if (config.bins_per_octave < 1) throw InvalidInputError("bins_per_octave must be >= 1");
  if (config.n_bins < 1) throw InvalidInputError("n_bins must be >= 1");
  const int b = config.bins_per_octave;
  std::vector<double> freqs(config.n_bins);
  for (int k = 0; k < config.n_bins; ++k) {
    // ldexp keeps octave doubling exact: f[k + b] is bit-identical to 2*f[k].
    const double fractional = std::pow(2.0, static_cast<double>(k % b) / b);
    freqs[k] = std::ldexp(config.f_min * fractional, k / b);
  }
  return freqs;
}

std::vector<std::size_t> cqt_window_lengths(const CqtConfig& config, int sample_rate) {
  if (sample_rate < 1) throw InvalidInputError("sample rate must be positive");
  const double q = cqt_quality_factor(config.bins_per_octave);
  const std::vector<double> freqs = cqt_bin_frequencies(config);
  std::vector<std::size_t> lengths(freqs.size());
  for (std::size_t k = 0; k < freqs.size(); ++k) {
    lengths[k] = static_cast<std::size_t>(std::ceil(q * sample_rate / freqs[k]));
  }
  return lengths;
}

Spectrogram cqt(const AudioBuffer& audio, const CqtConfig& config) {
  validate_audio(audio);
  const std::vector<double> freqs = cqt_bin_frequencies(config);
  const double nyquist = audio.sample_rate / 2.0;
  if (!(freqs.back() < nyquist)) {
    throw InvalidInputError("highest bin " + std::to_string(freqs.back()) +
                            " Hz is at or above Nyquist (" + std::to_string(nyquist) +
                            " Hz)");
  }
  const double q = cqt_quality_factor(config.bins_per_octave);
  const std::vector<std::size_t> lengths = cqt_window_lengths(config, audio.sample_rate);
  const std::size_t len = audio.samples.size();
  if (len < lengths.back()) {
    throw InvalidInputError("signal shorter than the shortest analysis window (" +
                            std::to_string(len) + " < " + std::to_string(lengths.back()) +
                            " samples)");
  }

  const std::size_t n_bins = freqs.size();
  // kernel[k][n] = w[n] * e^(-j 2 pi Q n / N[k]) / N[k]
  std::vector<std::vector<double>> kernel_re(n_bins);
  std::vector<std::vector<double>> kernel_im(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k) {
    const std::size_t nk = lengths[k];
    const std::vector<double> window = make_window(config.window, nk);
    kernel_re[k].resize(nk);
    kernel_im[k].resize(nk);
    for (std::size_t n = 0; n < nk; ++n) {
      const double angle = -2.0 * kPi * q * static_cast<double>(n) /
                           static_cast<double>(nk);
      kernel_re[k][n] = window[n] * std::cos(angle) / static_cast<double>(nk);
      kernel_im[k][n] = window[n] * std::sin(angle) / static_cast<double>(nk);
    }
  }

  const std::size_t hop = std::max<std::size_t>(1, lengths[0] / 2);
  const std::size_t frames = (len - 1) / hop + 1;

  Spectrogram spec;
  spec.axis = FrequencyAxis::kLogCqt;
  spec.bin_frequencies = freqs;
  spec.frame_hop_seconds = static_cast<double>(hop) / audio.sample_rate;
  spec.magnitudes = Matrix(frames, n_bins);

  const double* x = audio.samples.data();
  Matrix& out = spec.magnitudes;
  parallel_for(frames, [&](std::size_t frame) {
    const std::ptrdiff_t center = static_cast<std::ptrdiff_t>(frame * hop);
    double* row = out.data() + frame * n_bins;
    for (std::size_t k = 0; k < n_bins; ++k) {
      const std::ptrdiff_t nk = static_cast<std::ptrdiff_t>(lengths[k]);
      const std::ptrdiff_t start = center - nk / 2;
      const std::ptrdiff_t n_lo = std::max<std::ptrdiff_t>(0, -start);
      const std::ptrdiff_t n_hi =
          std::min<std::ptrdiff_t>(nk, static_cast<std::ptrdiff_t>(len) - start);
      const double* re = kernel_re[k].data();
      const double* im = kernel_im[k].data();
      double acc_re = 0.0;
      double acc_im = 0.0;
      for (std::ptrdiff_t n = n_lo; n < n_hi; ++n) {
        const double sample = x[start + n];
        acc_re += re[n] * sample;
        acc_im += im[n] * sample;
      }
      row[k] = std::hypot(acc_re, acc_im);
    }
  });
  return spec;
}

}  // namespace becr
