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

// becr: dispersion metrics for embedding CSVs, covariance-eigenvalue
// regularization evaluation, spectrogram extraction, and the trace-path
// benchmark. Exit codes: 0 ok, 1 usage, 2 input/parse, 3 degenerate data,
// 4 internal consistency failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "becr/csv.hpp"
#include "becr/dispersion.hpp"
#include "becr/errors.hpp"
#include "becr/regularizer.hpp"
#include "becr/rng.hpp"
#include "becr/version.hpp"
#include "becr/wav.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitConsistency = 4;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw becr::ParseError("cannot write to " + out_path);
  out << text;
}

json optional_metric(const std::optional<double>& v) {
  if (!v.has_value()) return nullptr;
  if (!std::isfinite(*v)) return nullptr;  // +inf F on zero within-scatter
  return *v;
}

// ---------------------------------------------------------------------------
// metrics

struct MetricsOptions {
  std::string input;
  int k = 4;
  int m = 2;
  std::uint64_t seed = 1;
  bool header = false;
  std::string out;
};

int run_metrics(const MetricsOptions& opt) {
  const becr::EmbeddingBatch batch(
      becr::read_embedding_csv_file(opt.input, opt.header));
  const becr::DispersionReport report =
      becr::dispersion_report(batch, opt.k, opt.m, opt.seed);

  json doc;
  doc["gini_index"] = optional_metric(report.gini_index);
  doc["gini_undefined_reason"] =
      report.gini_index.has_value() ? json(nullptr) : json(report.degenerate_reason);
  doc["top_m_eigenvalue_ratio"] = optional_metric(report.top_m_eigenvalue_ratio);
  doc["f_test"] = optional_metric(report.f_test);
  doc["calinski_harabasz"] = optional_metric(report.calinski_harabasz);
  doc["m"] = report.m;
  doc["k"] = report.k;
  doc["n_samples"] = report.n_samples;
  doc["dim"] = report.dim;
  doc["provenance"] = {{"input", opt.input},
                       {"k", opt.k},
                       {"m", opt.m},
                       {"seed", opt.seed},
                       {"tool_version", becr::kVersion}};
  emit(doc.dump(2) + "\n", opt.out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// becr

struct BecrOptions {
  std::string input;
  double epsilon = 0.7;
  double lambda = 0.05;
  double vanilla_loss = 0.0;
  bool grad_check = false;
  bool header = false;
  std::string out;
};

int run_becr(const BecrOptions& opt) {
  const becr::EmbeddingBatch batch(
      becr::read_embedding_csv_file(opt.input, opt.header));
  const becr::BecrConfig config{opt.epsilon, opt.lambda};
  const becr::BecrResult result = becr::evaluate_becr(batch, config, opt.vanilla_loss);

  json doc;
  doc["gini"] = result.gini;
  doc["penalty"] = result.penalty;
  doc["total_loss"] = result.total_loss;
  doc["vanilla_loss"] = result.vanilla_loss;
  doc["epsilon"] = opt.epsilon;
  doc["lambda"] = opt.lambda;
  doc["provenance"] = {{"input", opt.input},
                       {"epsilon", opt.epsilon},
                       {"lambda", opt.lambda},
                       {"tool_version", becr::kVersion}};

  bool grad_ok = true;
  if (opt.grad_check) {
    constexpr double kTolerance = 1e-4;
    const becr::Matrix analytic = becr::becr_gradient(batch, config);
    const becr::Matrix fd = becr::becr_penalty_gradient_fd(batch, config);
    const double err = becr::max_relative_error(analytic, fd);
    grad_ok = err <= kTolerance;
    doc["grad_check"] = {{"max_relative_error", err},
                         {"tolerance", kTolerance},
                         {"passed", grad_ok}};
  }
  emit(doc.dump(2) + "\n", opt.out);
  if (!grad_ok) {
    std::cerr << "gradient check failed: analytic gradient deviates from finite "
                 "differences beyond tolerance\n";
    return kExitConsistency;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// spectrogram

struct SpectrogramOptions {
  std::string input;
  std::string mode = "stft";
  std::size_t window_size = 1024;
  std::size_t hop = 0;
  std::string window = "hann";
  int n_mels = 64;
  double f_lo = 0.0;
  double f_hi = 0.0;  // 0 = Nyquist
  double f_min = 32.70;
  int bins_per_octave = 12;
  int n_bins = 48;
  bool meta = false;
  std::string out;
};

becr::WindowKind parse_window(const std::string& name) {
  if (name == "hann") return becr::WindowKind::kHann;
  if (name == "rect" || name == "rectangular") return becr::WindowKind::kRectangular;
  throw becr::InvalidInputError("unknown window: " + name);
}

const char* axis_name(becr::FrequencyAxis axis) {
  switch (axis) {
    case becr::FrequencyAxis::kLinearHz: return "linear_hz";
    case becr::FrequencyAxis::kMel: return "mel";
    case becr::FrequencyAxis::kLogCqt: return "log_cqt";
  }
  return "unknown";
}

int run_spectrogram(const SpectrogramOptions& opt) {
  const becr::AudioBuffer audio = becr::load_wav(opt.input);

  becr::Spectrogram spec;
  if (opt.mode == "stft" || opt.mode == "mel") {
    becr::StftConfig config;
    config.window_size = opt.window_size;
    config.hop = opt.hop;
    config.window = parse_window(opt.window);
    spec = becr::stft(audio, config);
    if (opt.mode == "mel") {
      const double f_hi = opt.f_hi > 0.0 ? opt.f_hi : audio.sample_rate / 2.0;
      spec = becr::mel_spectrogram(spec, opt.n_mels, opt.f_lo, f_hi);
    }
  } else if (opt.mode == "cqt") {
    becr::CqtConfig config;
    config.f_min = opt.f_min;
    config.bins_per_octave = opt.bins_per_octave;
    config.n_bins = opt.n_bins;
    config.window = parse_window(opt.window);
    spec = becr::cqt(audio, config);
  } else {
    throw becr::InvalidInputError("unknown mode: " + opt.mode);
  }

  std::ostringstream csv;
  becr::write_spectrogram_csv(csv, spec);
  emit(csv.str(), opt.out);

  if (opt.meta) {
    json meta;
    meta["input"] = opt.input;
    meta["mode"] = opt.mode;
    meta["axis"] = axis_name(spec.axis);
    meta["frames"] = spec.magnitudes.rows();
    meta["bins"] = spec.magnitudes.cols();
    meta["frame_hop_seconds"] = spec.frame_hop_seconds;
    meta["sample_rate"] = audio.sample_rate;
    meta["bin_frequencies"] = spec.bin_frequencies;
    meta["tool_version"] = becr::kVersion;
    std::ofstream sidecar(opt.out + ".meta.json");
    if (!sidecar) throw becr::ParseError("cannot write to " + opt.out + ".meta.json");
    sidecar << meta.dump(2) << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bench

struct BenchOptions {
  std::vector<int> dims = {8, 64, 256, 768};
  int n = 10;
  int repeats = 5;
  std::uint64_t seed = 1;
  std::string out;
};

becr::EmbeddingBatch random_batch(std::uint64_t seed, std::size_t n, std::size_t d) {
  becr::SplitMix64 rng(seed);
  becr::Matrix m(n, d);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.next_gaussian();
  return becr::EmbeddingBatch(std::move(m));
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

template <typename Fn>
double time_seconds(const Fn& fn) {
  const auto start = std::chrono::steady_clock::now();
  volatile double sink = fn();
  (void)sink;
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(stop - start).count();
}

int run_bench(const BenchOptions& opt) {
  constexpr double kAgreementTolerance = 1e-8;
  json results = json::array();

  std::printf("%6s %4s %14s %14s %14s %10s\n", "dim", "n", "eigen_ms", "trace_ms",
              "gram_ms", "eigen/gram");
  for (const int d : opt.dims) {
    std::vector<double> t_eigen;
    std::vector<double> t_trace;
    std::vector<double> t_gram;
    for (int rep = 0; rep < opt.repeats; ++rep) {
      const std::uint64_t batch_seed =
          opt.seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(d) * 1000 + rep);
      const becr::EmbeddingBatch batch =
          random_batch(batch_seed, static_cast<std::size_t>(opt.n),
                       static_cast<std::size_t>(d));

      // Correctness precedes timing.
      const double g_eigen = becr::gini_via_eigen(batch);
      const double g_trace = becr::gini_via_covariance_traces(batch);
      const double g_gram = becr::gini_via_gram(batch);
      if (std::fabs(g_eigen - g_trace) > kAgreementTolerance ||
          std::fabs(g_eigen - g_gram) > kAgreementTolerance) {
        std::cerr << "path disagreement at dim " << d << ": eigen=" << g_eigen
                  << " trace=" << g_trace << " gram=" << g_gram << "\n";
        return kExitConsistency;
      }

      t_eigen.push_back(time_seconds([&] { return becr::gini_via_eigen(batch); }));
      t_trace.push_back(
          time_seconds([&] { return becr::gini_via_covariance_traces(batch); }));
      t_gram.push_back(time_seconds([&] { return becr::gini_via_gram(batch); }));
    }
    const double med_eigen = median_of(t_eigen);
    const double med_trace = median_of(t_trace);
    const double med_gram = median_of(t_gram);
    const double speedup = med_gram > 0.0 ? med_eigen / med_gram : 0.0;
    std::printf("%6d %4d %14.3f %14.3f %14.3f %10.1f\n", d, opt.n, med_eigen * 1e3,
                med_trace * 1e3, med_gram * 1e3, speedup);

    results.push_back({{"dim", d},
                       {"median_seconds",
                        {{"eigen", med_eigen}, {"trace", med_trace}, {"gram", med_gram}}},
                       {"eigen_over_gram", speedup}});
  }

  if (!opt.out.empty()) {
    json doc;
    doc["n"] = opt.n;
    doc["repeats"] = opt.repeats;
    doc["seed"] = opt.seed;
    doc["agreement_tolerance"] = kAgreementTolerance;
    doc["results"] = results;
    doc["tool_version"] = becr::kVersion;
    std::ofstream out(opt.out);
    if (!out) throw becr::ParseError("cannot write to " + opt.out);
    out << doc.dump(2) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"embedding dispersion metrics, covariance regularization, and "
               "audio front-ends"};
  app.require_subcommand(1);
  app.set_version_flag("--version", becr::kVersion);

  MetricsOptions metrics_opt;
  CLI::App* metrics = app.add_subcommand(
      "metrics", "dispersion report (Gini, top-m eigenvalue ratio, F-test, CH) "
                 "for an embedding CSV");
  metrics->add_option("input", metrics_opt.input, "embedding CSV")->required();
  metrics->add_option("--k", metrics_opt.k, "cluster count")->capture_default_str();
  metrics->add_option("--m", metrics_opt.m, "top-m eigenvalues")->capture_default_str();
  metrics->add_option("--seed", metrics_opt.seed, "k-means seed")->capture_default_str();
  metrics->add_flag("--header", metrics_opt.header, "skip one header line");
  metrics->add_option("--out", metrics_opt.out, "write JSON report here");

  BecrOptions becr_opt;
  CLI::App* becr_cmd = app.add_subcommand(
      "becr", "Gini / hinge penalty / total loss for an embedding CSV");
  becr_cmd->add_option("input", becr_opt.input, "embedding CSV")->required();
  becr_cmd->add_option("--epsilon", becr_opt.epsilon, "Gini threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  becr_cmd->add_option("--lambda", becr_opt.lambda, "loss mixing weight")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  becr_cmd->add_option("--vanilla-loss", becr_opt.vanilla_loss, "task loss value")
      ->capture_default_str();
  becr_cmd->add_flag("--grad-check", becr_opt.grad_check,
                     "verify the analytic gradient against finite differences");
  becr_cmd->add_flag("--header", becr_opt.header, "skip one header line");
  becr_cmd->add_option("--out", becr_opt.out, "write JSON summary here");

  SpectrogramOptions spec_opt;
  CLI::App* spec = app.add_subcommand("spectrogram",
                                      "extract an STFT, mel, or CQT spectrogram CSV");
  spec->add_option("input", spec_opt.input, "WAV file")->required();
  spec->add_option("--mode", spec_opt.mode, "stft | mel | cqt")
      ->check(CLI::IsMember({"stft", "mel", "cqt"}))
      ->capture_default_str();
  spec->add_option("--window-size", spec_opt.window_size, "STFT window (power of two)")
      ->capture_default_str();
  spec->add_option("--hop", spec_opt.hop, "STFT hop (default window/4)");
  spec->add_option("--window", spec_opt.window, "hann | rect")
      ->check(CLI::IsMember({"hann", "rect", "rectangular"}))
      ->capture_default_str();
  spec->add_option("--n-mels", spec_opt.n_mels, "mel band count")->capture_default_str();
  spec->add_option("--f-lo", spec_opt.f_lo, "mel range low (Hz)")->capture_default_str();
  spec->add_option("--f-hi", spec_opt.f_hi, "mel range high (Hz, default Nyquist)");
  spec->add_option("--f-min", spec_opt.f_min, "CQT lowest center (Hz)")
      ->capture_default_str();
  spec->add_option("--bins-per-octave", spec_opt.bins_per_octave, "CQT bins per octave")
      ->capture_default_str();
  spec->add_option("--n-bins", spec_opt.n_bins, "CQT bin count")->capture_default_str();
  spec->add_flag("--meta", spec_opt.meta,
                 "write a JSON sidecar next to --out with axis/hop metadata");
  spec->add_option("--out", spec_opt.out, "write CSV here (default stdout)");

  BenchOptions bench_opt;
  CLI::App* bench = app.add_subcommand(
      "bench", "time the eigen, trace, and Gram Gini paths on seeded batches");
  bench->add_option("--dims", bench_opt.dims, "embedding dimensions")
      ->delimiter(',')
      ->capture_default_str();
  bench->add_option("--n", bench_opt.n, "batch size")
      ->check(CLI::Range(2, 1 << 20))
      ->capture_default_str();
  bench->add_option("--repeats", bench_opt.repeats, "runs per path")
      ->check(CLI::Range(1, 1 << 20))
      ->capture_default_str();
  bench->add_option("--seed", bench_opt.seed, "batch seed")->capture_default_str();
  bench->add_option("--out", bench_opt.out, "write JSON results here");

  int rc = kExitOk;
  metrics->callback([&] { rc = run_metrics(metrics_opt); });
  becr_cmd->callback([&] { rc = run_becr(becr_opt); });
  spec->callback([&] {
    if (spec_opt.meta && spec_opt.out.empty()) {
      throw CLI::ValidationError("--meta requires --out (the sidecar is written "
                                 "next to the CSV)");
    }
    rc = run_spectrogram(spec_opt);
  });
  bench->callback([&] {
    for (const int d : bench_opt.dims) {
      if (d < 1) throw CLI::ValidationError("--dims entries must be positive");
    }
    rc = run_bench(bench_opt);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const becr::DegenerateSpectrumError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const becr::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConsistency;
  } catch (const becr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitConsistency;
  }
  return rc;
}
