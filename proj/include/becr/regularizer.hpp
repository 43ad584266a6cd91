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

#ifndef BECR_REGULARIZER_HPP_
#define BECR_REGULARIZER_HPP_

#include <span>

#include "becr/linalg.hpp"

namespace becr {

// Hyperparameters of the covariance regularizer: epsilon is the Gini level
// below which the hinge activates, lambda the mixing weight of the penalty
// in the total loss. Defaults are the tuned values.
struct BecrConfig {
  double epsilon = 0.7;
  double lambda = 0.05;

  void validate() const;
};

struct BecrResult {
  double gini = 0.0;
  double penalty = 0.0;
  double total_loss = 0.0;
  double vanilla_loss = 0.0;
};

// Gini index of a nonnegative spectrum: 1 - sum(p_i^2) over normalized
// eigenvalues, evaluated as 1 - (sum l^2)/(sum l)^2 (same value, fewer
// roundings; uniform and rank-1 spectra come out exact). Range
// [0, 1 - 1/D]. Throws DegenerateSpectrumError when all values are zero.
double gini_from_spectrum(const EigenSpectrum& spectrum);

// Gini of the batch covariance spectrum without eigendecomposition:
// G = 1 - tr(K^2)/tr(K)^2. Routes through the Gram matrix when N < D so the
// D x D covariance is never materialized on wide batches.
double gini_trace(const EmbeddingBatch& batch);

// The three evaluation routes individually, for equivalence checks and
// benchmarking. gini_trace dispatches between the last two.
double gini_via_eigen(const EmbeddingBatch& batch);
double gini_via_covariance_traces(const EmbeddingBatch& batch);
double gini_via_gram(const EmbeddingBatch& batch);

// Hinge penalty R = max(0, epsilon - gini)^2. Zero whenever gini >= epsilon.
double becr_penalty(double gini, double epsilon);

// Convex combination L' = (1 - lambda) * vanilla + lambda * penalty.
double total_loss(double vanilla, double penalty, double lambda);

// Analytic gradient of the hinge penalty with respect to the raw batch,
// differentiated through the centering map. Exactly the zero matrix when the
// hinge is inactive (gini >= epsilon). Matches central finite differences to
// ~1e-5 relative; see becr_penalty_gradient_fd.
Matrix becr_gradient(const EmbeddingBatch& batch, const BecrConfig& config);

// Central-difference gradient of the penalty, step h = 1e-5 * (1 + |entry|).
// Verification path for becr_gradient; O(N*D) penalty evaluations.
Matrix becr_penalty_gradient_fd(const EmbeddingBatch& batch, const BecrConfig& config);

// Max over entries of |a - b| / max(|a|, |b|), restricted to entries where
// max(|a|, |b|) > magnitude_floor. Returns 0 when no entry qualifies.
double max_relative_error(const Matrix& a, const Matrix& b, double magnitude_floor = 1e-8);

// Mean binary cross entropy with probabilities clamped to
// [1e-7, 1 - 1e-7]. Targets must be exactly 0 or 1.
double bce_loss(std::span<const double> predictions, std::span<const double> targets);

// gini_trace + penalty + total loss in one call.
BecrResult evaluate_becr(const EmbeddingBatch& batch, const BecrConfig& config,
                         double vanilla_loss);

}  // namespace becr

#endif  // BECR_REGULARIZER_HPP_
