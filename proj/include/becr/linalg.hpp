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

#ifndef BECR_LINALG_HPP_
#define BECR_LINALG_HPP_

#include <cstddef>
#include <utility>
#include <vector>

#include "becr/matrix.hpp"

namespace becr {

// N x D batch of embedding vectors, one row per sample. Requires N >= 2
// (batch covariance is undefined below that) and finite entries.
class EmbeddingBatch {
 public:
  explicit EmbeddingBatch(Matrix data);

  const Matrix& data() const { return data_; }
  std::size_t n_samples() const { return data_.rows(); }
  std::size_t dim() const { return data_.cols(); }

 private:
  Matrix data_;
};

// D x D dense symmetric matrix (entrywise symmetric within 1e-12 absolute,
// checked at construction). Outputs of covariance() are additionally positive
// semidefinite up to rounding; that is validated by the eigenvalue oracle in
// tests, not eagerly here.
class CovarianceMatrix {
 public:
  explicit CovarianceMatrix(Matrix data);

  const Matrix& data() const { return data_; }
  std::size_t dim() const { return data_.rows(); }

  static constexpr double kSymmetryTolerance = 1e-12;

 private:
  Matrix data_;
};

// Eigenvalues sorted descending. Raw solver output; negatives from rounding
// are clamped only when a consumer asks for the nonnegative view.
struct EigenSpectrum {
  std::vector<double> values;

  double sum() const;

  // Values with small negatives (>= -1e-9 * sum) clamped to zero. Throws
  // InvalidInputError when a value is more negative than that, i.e. the
  // matrix was not PSD to working precision.
  EigenSpectrum clamped_nonnegative() const;
};

// Subtracts the per-column mean from every row. Column means of the result
// are zero to roundoff.
EmbeddingBatch center_rows(const EmbeddingBatch& batch);

// Unbiased batch covariance C'C / (N - 1) with C the row-centered batch.
CovarianceMatrix covariance(const EmbeddingBatch& batch);

// Cyclic Jacobi eigensolver for symmetric matrices. Converges when the
// off-diagonal Frobenius norm falls below 1e-11 * ||A||_F; throws
// ConvergenceError after 100 sweeps. Serves as the slow, trusted oracle
// against which the trace paths are checked.
EigenSpectrum sym_eigenvalues(const CovarianceMatrix& cov);

// Sum of the diagonal.
double trace(const CovarianceMatrix& cov);

// trace(A^2) for symmetric A, computed as the squared Frobenius norm without
// forming the matrix product.
double trace_of_square(const CovarianceMatrix& cov);

struct GramTraces {
  double tr_k;   // trace of the batch covariance
  double tr_k2;  // trace of its square
};

// tr(K) and tr(K^2) through the N x N Gram matrix of centered rows, in
// O(N^2 D) instead of O(D^2 N). Exact because C'C and CC' share nonzero
// eigenvalues; equal to the direct covariance traces to roundoff.
GramTraces gram_traces(const EmbeddingBatch& batch);

// Trace below this fraction of D * maxabs(batch)^2 is treated as exactly
// zero covariance: centering identical rows leaves ~eps-sized residuals,
// which must not masquerade as signal.
inline constexpr double kDegenerateTraceRel = 1e-26;

bool trace_is_degenerate(double tr, double batch_max_abs, std::size_t dim);

}  // namespace becr

#endif  // BECR_LINALG_HPP_
