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

#include "becr/regularizer.hpp"

#include <cmath>
#include <string>

#include "becr/errors.hpp"

namespace becr {

namespace {

double clamp_unit(double g) {
  if (g < 0.0) return 0.0;
  if (g > 1.0) return 1.0;
  return g;
}

double gini_from_traces(double tr, double tr2) {
  return clamp_unit(1.0 - tr2 / (tr * tr));
}

void require_unit_interval(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw InvalidInputError(std::string(name) + " must lie in [0, 1], got " +
                            std::to_string(v));
  }
}

}  // namespace

void BecrConfig::validate() const {
  require_unit_interval(epsilon, "epsilon");
  require_unit_interval(lambda, "lambda");
}

double gini_from_spectrum(const EigenSpectrum& spectrum) {
  const EigenSpectrum s = spectrum.clamped_nonnegative();
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double v : s.values) {
    sum += v;
    sum_sq += v * v;
  }
  if (sum == 0.0) {
    throw DegenerateSpectrumError("all eigenvalues are zero; Gini undefined");
  }
  // 1 - sum(p^2) over normalized values, evaluated with one division so that
  // uniform and rank-1 spectra land on the analytic value exactly.
  return clamp_unit(1.0 - sum_sq / (sum * sum));
}

double gini_via_eigen(const EmbeddingBatch& batch) {
  return gini_from_spectrum(sym_eigenvalues(covariance(batch)));
}

double gini_via_covariance_traces(const EmbeddingBatch& batch) {
  const CovarianceMatrix cov = covariance(batch);
  const double tr = trace(cov);
  if (trace_is_degenerate(tr, max_abs(batch.data()), batch.dim())) {
    throw DegenerateSpectrumError("zero covariance (all rows identical); Gini undefined");
  }
  return gini_from_traces(tr, trace_of_square(cov));
}

double gini_via_gram(const EmbeddingBatch& batch) {
  const GramTraces t = gram_traces(batch);
  if (trace_is_degenerate(t.tr_k, max_abs(batch.data()), batch.dim())) {
    throw DegenerateSpectrumError("zero covariance (all rows identical); Gini undefined");
  }
  return gini_from_traces(t.tr_k, t.tr_k2);
}

double gini_trace(const EmbeddingBatch& batch) {
  // Gram route is O(N^2 D) and never touches the D x D covariance; direct
  // route is O(D^2 N). Pick whichever is cheaper.
  return batch.n_samples() < batch.dim() ? gini_via_gram(batch)
                                         : gini_via_covariance_traces(batch);
}

double becr_penalty(double gini, double epsilon) {
  require_unit_interval(gini, "gini");
  require_unit_interval(epsilon, "epsilon");
  const double slack = epsilon - gini;
  if (slack <= 0.0) return 0.0;
  return slack * slack;
}

double total_loss(double vanilla, double penalty, double lambda) {
  require_unit_interval(lambda, "lambda");
  if (!std::isfinite(vanilla) || !std::isfinite(penalty)) {
    throw InvalidInputError("loss terms must be finite");
  }
  return (1.0 - lambda) * vanilla + lambda * penalty;
}

Matrix becr_gradient(const EmbeddingBatch& batch, const BecrConfig& config) {
  config.validate();
  const std::size_t n = batch.n_samples();
  const std::size_t d = batch.dim();
  const EmbeddingBatch centered = center_rows(batch);
  const Matrix& c = centered.data();
  const double norm = static_cast<double>(n - 1);

  // t1 = tr(K), t2 = tr(K^2), m = C * (C'C)  (equivalently (CC') * C).
  // With S = C'C:  dt1/dX = 2C/(N-1),  dt2/dX = 4 C S/(N-1)^2; centering
  // passes through unchanged because C and CS are already row-centered.
  double t1 = 0.0;
  double t2 = 0.0;
  Matrix m(n, d, 0.0);
  if (n < d) {
    Matrix gram(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* ri = c.data() + i * d;
      for (std::size_t j = i; j < n; ++j) {
        const double* rj = c.data() + j * d;
        double g = 0.0;
        for (std::size_t t = 0; t < d; ++t) g += ri[t] * rj[t];
        gram(i, j) = g;
        gram(j, i) = g;
      }
    }
    double fro_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      t1 += gram(i, i);
      for (std::size_t j = 0; j < n; ++j) fro_sq += gram(i, j) * gram(i, j);
    }
    t1 /= norm;
    t2 = fro_sq / (norm * norm);
    for (std::size_t i = 0; i < n; ++i) {
      double* mi = m.data() + i * d;
      for (std::size_t j = 0; j < n; ++j) {
        const double g = gram(i, j);
        const double* rj = c.data() + j * d;
        for (std::size_t t = 0; t < d; ++t) mi[t] += g * rj[t];
      }
    }
  } else {
    Matrix s(d, d, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      const double* row = c.data() + r * d;
      for (std::size_t i = 0; i < d; ++i) {
        const double ci = row[i];
        double* srow = s.data() + i * d;
        for (std::size_t j = i; j < d; ++j) srow[j] += ci * row[j];
      }
    }
    double fro_sq = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      t1 += s(i, i);
      fro_sq += s(i, i) * s(i, i);
      for (std::size_t j = i + 1; j < d; ++j) {
        s(j, i) = s(i, j);
        fro_sq += 2.0 * s(i, j) * s(i, j);
      }
    }
    t1 /= norm;
    t2 = fro_sq / (norm * norm);
    for (std::size_t r = 0; r < n; ++r) {
      const double* row = c.data() + r * d;
      double* mr = m.data() + r * d;
      for (std::size_t i = 0; i < d; ++i) {
        const double ci = row[i];
        const double* srow = s.data() + i * d;
        for (std::size_t j = 0; j < d; ++j) mr[j] += ci * srow[j];
      }
    }
  }

  if (trace_is_degenerate(t1, max_abs(batch.data()), d)) {
    throw DegenerateSpectrumError("zero covariance; penalty gradient undefined");
  }

  const double gini = gini_from_traces(t1, t2);
  Matrix grad(n, d, 0.0);
  if (gini >= config.epsilon) {
    return grad;  // hinge inactive: exactly zero
  }

  // dG/dX = -4/((N-1)^2 t1^2) * M + 4 t2/((N-1) t1^3) * C,
  // dR/dX = 2 (G - eps) dG/dX.
  const double coef_m = -4.0 / (norm * norm * t1 * t1);
  const double coef_c = 4.0 * t2 / (norm * t1 * t1 * t1);
  const double hinge = 2.0 * (gini - config.epsilon);
  for (std::size_t i = 0; i < grad.size(); ++i) {
    grad.data()[i] = hinge * (coef_m * m.data()[i] + coef_c * c.data()[i]);
  }
  return grad;
}

Matrix becr_penalty_gradient_fd(const EmbeddingBatch& batch, const BecrConfig& config) {
  config.validate();
  const std::size_t n = batch.n_samples();
  const std::size_t d = batch.dim();
  Matrix work = batch.data();
  Matrix grad(n, d, 0.0);
  const auto penalty_at = [&](const Matrix& values) {
    return becr_penalty(gini_trace(EmbeddingBatch(values)), config.epsilon);
  };
  for (std::size_t i = 0; i < work.size(); ++i) {
    const double original = work.data()[i];
    const double h = 1e-5 * (1.0 + std::fabs(original));
    work.data()[i] = original + h;
    const double up = penalty_at(work);
    work.data()[i] = original - h;
    const double down = penalty_at(work);
    work.data()[i] = original;
    grad.data()[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

double max_relative_error(const Matrix& a, const Matrix& b, double magnitude_floor) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidInputError("shape mismatch in max_relative_error");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a.data()[i];
    const double y = b.data()[i];
    const double scale = std::max(std::fabs(x), std::fabs(y));
    if (scale <= magnitude_floor) continue;
    worst = std::max(worst, std::fabs(x - y) / scale);
  }
  return worst;
}

double bce_loss(std::span<const double> predictions, std::span<const double> targets) {
  if (predictions.size() != targets.size()) {
    throw InvalidInputError("predictions and targets differ in length: " +
                            std::to_string(predictions.size()) + " vs " +
                            std::to_string(targets.size()));
  }
  if (predictions.empty()) {
    throw InvalidInputError("empty prediction vector");
  }
  constexpr double kClamp = 1e-7;
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double p_raw = predictions[i];
    const double t = targets[i];
    if (!(p_raw >= 0.0 && p_raw <= 1.0)) {
      throw InvalidInputError("prediction " + std::to_string(i) + " outside [0, 1]");
    }
    if (t != 0.0 && t != 1.0) {
      throw InvalidInputError("target " + std::to_string(i) + " is not binary");
    }
    const double p = std::min(1.0 - kClamp, std::max(kClamp, p_raw));
    total -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
  }
  return total / static_cast<double>(predictions.size());
}

BecrResult evaluate_becr(const EmbeddingBatch& batch, const BecrConfig& config,
                         double vanilla_loss) {
  config.validate();
  BecrResult result;
  result.gini = gini_trace(batch);
  result.penalty = becr_penalty(result.gini, config.epsilon);
  result.vanilla_loss = vanilla_loss;
  result.total_loss = total_loss(vanilla_loss, result.penalty, config.lambda);
  return result;
}

}  // namespace becr
