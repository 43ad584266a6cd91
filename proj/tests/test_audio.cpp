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

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"

#include "becr/audio.hpp"
#include "becr/errors.hpp"
#include "becr/rng.hpp"

using namespace becr;

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

AudioBuffer sine(double freq, int sample_rate, double seconds, double amp = 0.5) {
  AudioBuffer audio;
  audio.sample_rate = sample_rate;
  const std::size_t n = static_cast<std::size_t>(seconds * sample_rate);
  audio.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    audio.samples[i] = amp * std::sin(kTau * freq * static_cast<double>(i) / sample_rate);
  }
  return audio;
}

// Naive O(M^2) DFT oracle.
std::vector<double> naive_dft_magnitudes(const std::vector<double>& frame) {
  const std::size_t m = frame.size();
  std::vector<double> mags(m / 2 + 1);
  for (std::size_t k = 0; k <= m / 2; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t n = 0; n < m; ++n) {
      const double angle = -kTau * static_cast<double>(k) * static_cast<double>(n) /
                           static_cast<double>(m);
      acc += frame[n] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    mags[k] = std::abs(acc);
  }
  return mags;
}

std::size_t argmax(std::span<const double> values) {
  return static_cast<std::size_t>(
      std::max_element(values.begin(), values.end()) - values.begin());
}

}  // namespace

TEST_CASE("window shapes") {
  const std::vector<double> rect = make_window(WindowKind::kRectangular, 4);
  CHECK(rect == std::vector<double>{1.0, 1.0, 1.0, 1.0});

  const std::vector<double> hann = make_window(WindowKind::kHann, 5);
  CHECK(hann[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(hann[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(hann[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hann[3] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(hann[4] == doctest::Approx(0.0).epsilon(1e-15));

  const std::vector<double> sym = make_window(WindowKind::kHann, 32);
  for (std::size_t n = 0; n < sym.size(); ++n) {
    CHECK(sym[n] == doctest::Approx(sym[sym.size() - 1 - n]).epsilon(1e-12));
    CHECK(sym[n] >= 0.0);
    CHECK(sym[n] <= 1.0);
  }

  CHECK_THROWS_AS(make_window(WindowKind::kHann, 1), InvalidInputError);
  CHECK_THROWS_AS(make_window(WindowKind::kRectangular, 0), InvalidInputError);
}

TEST_CASE("stft of a constant signal concentrates at DC") {
  AudioBuffer audio;
  audio.sample_rate = 1000;
  audio.samples.assign(256, 1.0);
  StftConfig config;
  config.window_size = 64;
  config.window = WindowKind::kRectangular;
  const Spectrogram spec = stft(audio, config);
  for (std::size_t frame = 0; frame < spec.magnitudes.rows(); ++frame) {
    CHECK(spec.magnitudes(frame, 0) == doctest::Approx(64.0).epsilon(1e-12));
    for (std::size_t b = 1; b < spec.magnitudes.cols(); ++b) {
      CHECK(spec.magnitudes(frame, b) < 1e-9);
    }
  }
}

TEST_CASE("stft of a bin-aligned sine has magnitude M/2 at its bin") {
  const int sample_rate = 1024;
  const std::size_t m = 256;
  const std::size_t j = 19;
  const double freq = static_cast<double>(j) * sample_rate / static_cast<double>(m);
  AudioBuffer audio = sine(freq, sample_rate, 1.0, 1.0);
  StftConfig config;
  config.window_size = m;
  config.window = WindowKind::kRectangular;
  const Spectrogram spec = stft(audio, config);
  for (std::size_t frame = 0; frame < spec.magnitudes.rows(); ++frame) {
    CHECK(spec.magnitudes(frame, j) ==
          doctest::Approx(static_cast<double>(m) / 2.0).epsilon(1e-6));
    for (std::size_t b = 0; b < spec.magnitudes.cols(); ++b) {
      if (b != j) CHECK(spec.magnitudes(frame, b) < 1e-7 * m);
    }
  }
}

TEST_CASE("stft frame and bin geometry") {
  AudioBuffer audio;
  audio.sample_rate = 44100;
  audio.samples.assign(44100, 0.0);
  const Spectrogram spec = stft(audio, StftConfig{});
  CHECK(spec.magnitudes.rows() == 1 + (44100 - 1024) / 256);
  CHECK(spec.magnitudes.cols() == 513);
  CHECK(spec.bin_frequencies[0] == 0.0);
  CHECK(spec.bin_frequencies[1] == doctest::Approx(44100.0 / 1024.0));
  CHECK(spec.bin_frequencies.back() == doctest::Approx(22050.0));
  CHECK(spec.frame_hop_seconds == doctest::Approx(256.0 / 44100.0));
  for (std::size_t i = 0; i < spec.magnitudes.size(); ++i) {
    CHECK(spec.magnitudes.data()[i] == 0.0);
  }
}

TEST_CASE("stft input validation") {
  AudioBuffer audio;
  audio.sample_rate = 8000;
  audio.samples.assign(100, 0.0);
  StftConfig config;
  config.window_size = 256;
  CHECK_THROWS_AS(stft(audio, config), InvalidInputError);

  audio.samples.assign(4096, 0.0);
  config.window_size = 300;  // not a power of two
  CHECK_THROWS_AS(stft(audio, config), InvalidInputError);
  config.window_size = 256;
  config.hop = 257;
  CHECK_THROWS_AS(stft(audio, config), InvalidInputError);
}

TEST_CASE("fft path agrees with the naive DFT oracle") {
  SplitMix64 rng(63);
  for (int rep = 0; rep < 3; ++rep) {
    AudioBuffer audio;
    audio.sample_rate = 8000;
    audio.samples.resize(256);
    for (double& s : audio.samples) s = 0.5 * rng.next_double() - 0.25;

    StftConfig config;
    config.window_size = 256;
    config.window = WindowKind::kRectangular;
    const Spectrogram spec = stft(audio, config);
    const std::vector<double> oracle = naive_dft_magnitudes(audio.samples);
    for (std::size_t b = 0; b < oracle.size(); ++b) {
      CHECK(spec.magnitudes(0, b) ==
            doctest::Approx(oracle[b]).epsilon(1e-9).scale(oracle[b] + 1.0));
    }
  }
}

TEST_CASE("rectangular-window frames satisfy Parseval") {
  SplitMix64 rng(12);
  AudioBuffer audio;
  audio.sample_rate = 8000;
  audio.samples.resize(1024);
  for (double& s : audio.samples) s = rng.next_double() - 0.5;

  StftConfig config;
  config.window_size = 1024;
  config.window = WindowKind::kRectangular;
  const Spectrogram spec = stft(audio, config);

  // two-sided energy from the one-sided magnitudes: interior bins doubled
  const std::size_t m = 1024;
  double spectral = spec.magnitudes(0, 0) * spec.magnitudes(0, 0) +
                    spec.magnitudes(0, m / 2) * spec.magnitudes(0, m / 2);
  for (std::size_t b = 1; b < m / 2; ++b) {
    spectral += 2.0 * spec.magnitudes(0, b) * spec.magnitudes(0, b);
  }
  double time_energy = 0.0;
  for (double s : audio.samples) time_energy += s * s;
  CHECK(spectral == doctest::Approx(m * time_energy).epsilon(1e-6));
}

TEST_CASE("stft magnitudes are linear in amplitude") {
  AudioBuffer a = sine(440.0, 8000, 0.25, 0.2);
  AudioBuffer b = a;
  for (double& s : b.samples) s *= 4.0;
  StftConfig config;
  config.window_size = 512;
  const Spectrogram sa = stft(a, config);
  const Spectrogram sb = stft(b, config);
  for (std::size_t i = 0; i < sa.magnitudes.size(); ++i) {
    const double scaled = 4.0 * sa.magnitudes.data()[i];
    CHECK(sb.magnitudes.data()[i] ==
          doctest::Approx(scaled).epsilon(1e-9).scale(scaled + 1e-12));
  }
}

TEST_CASE("hz_to_mel hand values and monotonicity") {
  CHECK(hz_to_mel(0.0) == 0.0);
  CHECK(hz_to_mel(700.0) == doctest::Approx(2595.0 * std::log10(2.0)).epsilon(1e-12));
  CHECK(hz_to_mel(700.0) == doctest::Approx(781.17).epsilon(1e-4));
  CHECK(hz_to_mel(1000.0) == doctest::Approx(999.99).epsilon(1e-4));
  CHECK_THROWS_AS(hz_to_mel(-1.0), InvalidInputError);

  double prev = -1.0;
  for (double f = 0.0; f <= 20000.0; f += 87.3) {
    const double mel = hz_to_mel(f);
    CHECK(mel > prev);
    prev = mel;
    CHECK(mel_to_hz(mel) == doctest::Approx(f).epsilon(1e-9));
  }
}

TEST_CASE("mel filterbank rows are triangular with contiguous support") {
  std::vector<double> bins(257);
  for (std::size_t b = 0; b < bins.size(); ++b) bins[b] = b * 8000.0 / 512.0;
  const Matrix fb = mel_filterbank(bins, 24, 0.0, 4000.0);
  REQUIRE(fb.rows() == 24);

  for (std::size_t i = 0; i < fb.rows(); ++i) {
    double sum = 0.0;
    bool inside = false;
    bool ended = false;
    for (std::size_t b = 0; b < fb.cols(); ++b) {
      const double w = fb(i, b);
      CHECK(w >= 0.0);
      CHECK(w <= 1.0 + 1e-12);
      sum += w;
      if (w > 0.0) {
        CHECK(!ended);  // support must be one contiguous run
        inside = true;
      } else if (inside) {
        ended = true;
      }
    }
    CHECK(sum > 0.0);
  }
}

TEST_CASE("an impulse at a filter center lands in that filter") {
  const int n_mels = 8;
  const double f_lo = 100.0;
  const double f_hi = 4000.0;
  const double mel_lo = hz_to_mel(f_lo);
  const double mel_hi = hz_to_mel(f_hi);
  const int target = 3;
  const double center_mel = mel_lo + (mel_hi - mel_lo) * (target + 1) / (n_mels + 1);
  const double center_hz = mel_to_hz(center_mel);

  // hand-built linear spectrogram whose bin 5 sits exactly at the center
  Spectrogram linear;
  linear.axis = FrequencyAxis::kLinearHz;
  linear.bin_frequencies = {0.0, 500.0, 800.0, 1000.0, 1200.0,
                            center_hz, 2000.0, 3000.0, 4000.0};
  linear.magnitudes = Matrix(1, 9, 0.0);
  linear.magnitudes(0, 5) = 3.0;
  linear.frame_hop_seconds = 0.01;

  const Spectrogram mel = mel_spectrogram(linear, n_mels, f_lo, f_hi);
  CHECK(mel.magnitudes(0, target) == doctest::Approx(9.0).epsilon(1e-9));
  for (int i = 0; i < n_mels; ++i) {
    if (i != target) CHECK(mel.magnitudes(0, i) < 9.0);
  }
  // mel-axis descriptors are the filter centers, strictly increasing
  CHECK(mel.bin_frequencies[target] == doctest::Approx(center_mel).epsilon(1e-12));
  CHECK(std::is_sorted(mel.bin_frequencies.begin(), mel.bin_frequencies.end()));
}

TEST_CASE("mel_spectrogram matches the dense filterbank multiply") {
  SplitMix64 rng(8);
  Spectrogram linear;
  linear.axis = FrequencyAxis::kLinearHz;
  linear.bin_frequencies.resize(129);
  for (std::size_t b = 0; b < 129; ++b) linear.bin_frequencies[b] = b * 16000.0 / 256.0;
  linear.magnitudes = Matrix(7, 129);
  for (std::size_t i = 0; i < linear.magnitudes.size(); ++i) {
    linear.magnitudes.data()[i] = rng.next_double();
  }

  const int n_mels = 20;
  const Spectrogram mel = mel_spectrogram(linear, n_mels, 50.0, 8000.0);
  const Matrix fb = mel_filterbank(linear.bin_frequencies, n_mels, 50.0, 8000.0);
  for (std::size_t t = 0; t < 7; ++t) {
    for (int i = 0; i < n_mels; ++i) {
      double expected = 0.0;
      for (std::size_t b = 0; b < 129; ++b) {
        expected += fb(i, b) * linear.magnitudes(t, b) * linear.magnitudes(t, b);
      }
      CHECK(mel.magnitudes(t, i) ==
            doctest::Approx(expected).epsilon(1e-12).scale(expected + 1e-12));
    }
  }
}

TEST_CASE("mel_spectrogram validation and zero propagation") {
  AudioBuffer silence;
  silence.sample_rate = 8000;
  silence.samples.assign(2048, 0.0);
  StftConfig config;
  config.window_size = 512;
  const Spectrogram linear = stft(silence, config);
  const Spectrogram mel = mel_spectrogram(linear, 16, 0.0, 4000.0);
  for (std::size_t i = 0; i < mel.magnitudes.size(); ++i) {
    CHECK(mel.magnitudes.data()[i] == 0.0);
  }

  CHECK_THROWS_AS(mel_spectrogram(linear, 16, 2000.0, 1000.0), InvalidInputError);
  CHECK_THROWS_AS(mel_spectrogram(linear, 16, 0.0, 8000.0), InvalidInputError);
  CHECK_THROWS_AS(mel_spectrogram(mel, 4, 0.0, 1000.0), InvalidInputError);
}

TEST_CASE("cqt quality factor and bin frequencies") {
  CHECK(cqt_quality_factor(12) == doctest::Approx(16.817).epsilon(1e-4));
  CHECK(cqt_quality_factor(1) == doctest::Approx(1.0).epsilon(1e-12));

  CqtConfig config;
  config.f_min = 32.70;
  config.bins_per_octave = 12;
  config.n_bins = 48;
  const std::vector<double> freqs = cqt_bin_frequencies(config);
  CHECK(freqs[0] == 32.70);
  CHECK(freqs[12] == 65.40);  // exactly one octave up
  for (int k = 0; k + 12 < config.n_bins; ++k) {
    CHECK(freqs[k + 12] == 2.0 * freqs[k]);  // bit-exact doubling
  }
  CHECK(std::is_sorted(freqs.begin(), freqs.end()));
}

TEST_CASE("cqt windows keep the quality factor constant") {
  CqtConfig config;
  config.n_bins = 36;
  const int sample_rate = 22050;
  const double q = cqt_quality_factor(config.bins_per_octave);
  const std::vector<double> freqs = cqt_bin_frequencies(config);
  const std::vector<std::size_t> lengths = cqt_window_lengths(config, sample_rate);
  for (std::size_t k = 0; k < freqs.size(); ++k) {
    const double ratio = static_cast<double>(lengths[k]) * freqs[k] / sample_rate;
    CHECK(ratio >= q - 1e-9);
    CHECK(ratio <= q + freqs[k] / sample_rate + 1e-9);
  }
}

TEST_CASE("cqt identifies a pure tone's bin") {
  CqtConfig config;
  config.f_min = 32.70;
  config.bins_per_octave = 12;
  config.n_bins = 24;
  const int sample_rate = 8000;
  const int target_bin = 12;
  const double freq = cqt_bin_frequencies(config)[target_bin];
  const AudioBuffer tone = sine(freq, sample_rate, 2.0);

  const Spectrogram spec = cqt(tone, config);
  REQUIRE(spec.magnitudes.rows() >= 4);
  std::vector<double> mean_mag(config.n_bins, 0.0);
  for (std::size_t t = 0; t < spec.magnitudes.rows(); ++t) {
    for (int k = 0; k < config.n_bins; ++k) mean_mag[k] += spec.magnitudes(t, k);
  }
  CHECK(argmax(mean_mag) == static_cast<std::size_t>(target_bin));
  CHECK(spec.axis == FrequencyAxis::kLogCqt);
}

TEST_CASE("cqt validation") {
  CqtConfig config;
  config.f_min = 1000.0;
  config.n_bins = 36;  // tops out near 7.6 kHz
  const AudioBuffer tone = sine(440.0, 8000, 1.0);
  CHECK_THROWS_AS(cqt(tone, config), InvalidInputError);

  CqtConfig ok;
  ok.n_bins = 24;
  AudioBuffer too_short;
  too_short.sample_rate = 8000;
  too_short.samples.assign(100, 0.1);
  CHECK_THROWS_AS(cqt(too_short, ok), InvalidInputError);
}

TEST_CASE("cqt of silence is zero") {
  AudioBuffer silence;
  silence.sample_rate = 8000;
  silence.samples.assign(16000, 0.0);
  CqtConfig config;
  config.n_bins = 24;
  const Spectrogram spec = cqt(silence, config);
  for (std::size_t i = 0; i < spec.magnitudes.size(); ++i) {
    CHECK(spec.magnitudes.data()[i] == 0.0);
  }
}

TEST_CASE("audio buffer validation") {
  AudioBuffer empty;
  empty.sample_rate = 8000;
  CHECK_THROWS_AS(validate_audio(empty), InvalidInputError);

  AudioBuffer loud;
  loud.sample_rate = 8000;
  loud.samples = {0.0, 1.5};
  CHECK_THROWS_AS(validate_audio(loud), InvalidInputError);

  AudioBuffer bad_rate;
  bad_rate.sample_rate = 0;
  bad_rate.samples = {0.0};
  CHECK_THROWS_AS(validate_audio(bad_rate), InvalidInputError);
}
