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

#include "becr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "becr/errors.hpp"

namespace becr {

namespace {

std::string shape_string(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

EmbeddingBatch::EmbeddingBatch(Matrix data) : data_(std::move(data)) {
  if (data_.rows() < 2) {
    throw InsufficientSamplesError("embedding batch needs at least 2 samples, got " +
                                   std::to_string(data_.rows()));
  }
  if (data_.cols() < 1) {
    throw InvalidInputError("embedding batch needs at least 1 dimension");
  }
  for (std::size_t r = 0; r < data_.rows(); ++r) {
    for (std::size_t c = 0; c < data_.cols(); ++c) {
      if (!std::isfinite(data_(r, c))) {
        throw InvalidInputError("non-finite value at row " + std::to_string(r) +
                                ", column " + std::to_string(c));
      }
    }
  }
}

CovarianceMatrix::CovarianceMatrix(Matrix data) : data_(std::move(data)) {
  if (data_.rows() == 0 || data_.rows() != data_.cols()) {
    throw InvalidInputError("covariance matrix must be square and non-empty, got " +
                            shape_string(data_.rows(), data_.cols()));
  }
  for (std::size_t i = 0; i < data_.rows(); ++i) {
    for (std::size_t j = i; j < data_.cols(); ++j) {
      if (!std::isfinite(data_(i, j)) || !std::isfinite(data_(j, i))) {
        throw InvalidInputError("non-finite matrix entry at (" + std::to_string(i) +
                                ", " + std::to_string(j) + ")");
      }
      if (std::fabs(data_(i, j) - data_(j, i)) > kSymmetryTolerance) {
        throw InvalidInputError("matrix asymmetric beyond tolerance at (" +
                                std::to_string(i) + ", " + std::to_string(j) + ")");
      }
    }
  }
}

double EigenSpectrum::sum() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

EigenSpectrum EigenSpectrum::clamped_nonnegative() const {
  const double total = sum();
  const double floor_value = -1e-9 * total;
  EigenSpectrum out = *this;
  for (double& v : out.values) {
    if (v < 0.0) {
      if (total > 0.0 && v >= floor_value) {
        v = 0.0;  // PSD drift, not signal
      } else {
        throw InvalidInputError("eigenvalue " + std::to_string(v) +
                                " is negative beyond PSD tolerance");
      }
    }
  }
  return out;
}

EmbeddingBatch center_rows(const EmbeddingBatch& batch) {
  const Matrix& x = batch.data();
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  std::vector<double> mean(d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = x.data() + r * d;
    for (std::size_t c = 0; c < d; ++c) mean[c] += row[c];
  }
  for (std::size_t c = 0; c < d; ++c) mean[c] /= static_cast<double>(n);
  Matrix out(n, d);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) out(r, c) = x(r, c) - mean[c];
  }
  return EmbeddingBatch(std::move(out));
}

CovarianceMatrix covariance(const EmbeddingBatch& batch) {
  const EmbeddingBatch centered = center_rows(batch);
  const Matrix& c = centered.data();
  const std::size_t n = c.rows();
  const std::size_t d = c.cols();
  Matrix k(d, d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = c.data() + r * d;
    for (std::size_t i = 0; i < d; ++i) {
      const double ci = row[i];
      double* krow = k.data() + i * d;
      for (std::size_t j = i; j < d; ++j) krow[j] += ci * row[j];
    }
  }
  const double scale = 1.0 / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      k(i, j) *= scale;
      k(j, i) = k(i, j);
    }
  }
  return CovarianceMatrix(std::move(k));
}

namespace {

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i] * a.data()[i];
  return std::sqrt(s);
}

double off_diagonal_norm(const Matrix& a) {
  const std::size_t d = a.rows();
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) s += a(i, j) * a(i, j);
  }
  return std::sqrt(2.0 * s);
}

}  // namespace

namespace {

struct BlockRange {
  std::size_t begin;
  std::size_t end;
};

// One Jacobi rotation zeroing a_pq. Rotates rows p and q in place
// (contiguous) and mirrors only the entries inside the given tile rows;
// the caller restores symmetry outside the tile once per tile.
void jacobi_rotate(Matrix& a, std::size_t p, std::size_t q, BlockRange bi,
                   BlockRange bj) {
  const std::size_t d = a.rows();
  double* rp = a.data() + p * d;
  double* rq = a.data() + q * d;
  const double apq = rp[q];
  const double app = rp[p];
  const double aqq = rq[q];

  const double tau = (aqq - app) / (2.0 * apq);
  const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
  const double cos_r = 1.0 / std::sqrt(1.0 + t * t);
  const double sin_r = t * cos_r;

  for (std::size_t j = 0; j < d; ++j) {
    const double yp = rp[j];
    const double yq = rq[j];
    rp[j] = cos_r * yp - sin_r * yq;
    rq[j] = sin_r * yp + cos_r * yq;
  }
  rp[p] = app - t * apq;
  rq[q] = aqq + t * apq;
  rp[q] = 0.0;
  rq[p] = 0.0;

  const auto mirror_range = [&](BlockRange range) {
    for (std::size_t i = range.begin; i < range.end; ++i) {
      if (i == p || i == q) continue;
      a(i, p) = rp[i];
      a(i, q) = rq[i];
    }
  };
  mirror_range(bi);
  if (bj.begin != bi.begin) mirror_range(bj);
}

}  // namespace

EigenSpectrum sym_eigenvalues(const CovarianceMatrix& cov) {
  Matrix a = cov.data();
  const std::size_t d = a.rows();
  EigenSpectrum spectrum;
  if (d == 1) {
    spectrum.values = {a(0, 0)};
    return spectrum;
  }

  constexpr int kMaxSweeps = 100;
  const double threshold = 1e-11 * frobenius_norm(a);
  // Pairs below this can all be left in place without the off-diagonal norm
  // exceeding the threshold, so rotating them is wasted work.
  const double skip_tol = threshold / static_cast<double>(d);

  // Cyclic sweep in tile order: all pairs of one block pair are rotated while
  // their rows sit in cache, and the column images outside the tile are
  // written once per tile instead of once per rotation.
  constexpr std::size_t kBlock = 32;
  const std::size_t n_blocks = (d + kBlock - 1) / kBlock;
  const auto block_range = [&](std::size_t b) {
    return BlockRange{b * kBlock, std::min(d, (b + 1) * kBlock)};
  };

  bool converged = off_diagonal_norm(a) <= threshold;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    for (std::size_t bi = 0; bi < n_blocks; ++bi) {
      const BlockRange ri = block_range(bi);
      for (std::size_t bj = bi; bj < n_blocks; ++bj) {
        const BlockRange rj = block_range(bj);
        bool rotated = false;
        for (std::size_t p = ri.begin; p < ri.end; ++p) {
          const double* rp = a.data() + p * d;
          const std::size_t q_begin = (bi == bj) ? p + 1 : rj.begin;
          for (std::size_t q = q_begin; q < rj.end; ++q) {
            if (std::fabs(rp[q]) <= skip_tol) continue;
            jacobi_rotate(a, p, q, ri, rj);
            rotated = true;
          }
        }
        if (!rotated) continue;
        // Restore symmetry for rows outside the tile.
        for (std::size_t j = 0; j < d; ++j) {
          if ((j >= ri.begin && j < ri.end) || (j >= rj.begin && j < rj.end)) continue;
          double* row_j = a.data() + j * d;
          for (std::size_t c = ri.begin; c < ri.end; ++c) row_j[c] = a(c, j);
          if (bj != bi) {
            for (std::size_t c = rj.begin; c < rj.end; ++c) row_j[c] = a(c, j);
          }
        }
      }
    }
    converged = off_diagonal_norm(a) <= threshold;
  }
  if (!converged) {
    throw ConvergenceError("jacobi eigensolver: no convergence after " +
                           std::to_string(kMaxSweeps) + " sweeps at dim " +
                           std::to_string(d));
  }

  spectrum.values.resize(d);
  for (std::size_t i = 0; i < d; ++i) spectrum.values[i] = a(i, i);
  std::sort(spectrum.values.begin(), spectrum.values.end(), std::greater<double>());
  return spectrum;
}

double trace(const CovarianceMatrix& cov) {
  const Matrix& a = cov.data();
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, i);
  return s;
}

double trace_of_square(const CovarianceMatrix& cov) {
  // tr(A^2) = ||A||_F^2 for symmetric A; the product is never formed.
  const Matrix& a = cov.data();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i] * a.data()[i];
  return s;
}

GramTraces gram_traces(const EmbeddingBatch& batch) {
  const EmbeddingBatch centered = center_rows(batch);
  const Matrix& c = centered.data();
  const std::size_t n = c.rows();
  const std::size_t d = c.cols();
  double diag_sum = 0.0;
  double diag_sq = 0.0;
  double off_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* ri = c.data() + i * d;
    for (std::size_t j = i; j < n; ++j) {
      const double* rj = c.data() + j * d;
      double g = 0.0;
      for (std::size_t t = 0; t < d; ++t) g += ri[t] * rj[t];
      if (i == j) {
        diag_sum += g;
        diag_sq += g * g;
      } else {
        off_sq += g * g;
      }
    }
  }
  const double norm = static_cast<double>(n - 1);
  return GramTraces{diag_sum / norm, (diag_sq + 2.0 * off_sq) / (norm * norm)};
}

bool trace_is_degenerate(double tr, double batch_max_abs, std::size_t dim) {
  const double floor_value =
      kDegenerateTraceRel * batch_max_abs * batch_max_abs * static_cast<double>(dim);
  return !(tr > floor_value);
}

}  // namespace becr
