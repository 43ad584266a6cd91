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

#ifndef BECR_TESTS_TEST_UTIL_HPP_
#define BECR_TESTS_TEST_UTIL_HPP_

#include <cstdint>
#include <vector>

#include "becr/linalg.hpp"
#include "becr/matrix.hpp"
#include "becr/rng.hpp"

namespace becr::testing {

inline Matrix random_matrix(SplitMix64& rng, std::size_t rows, std::size_t cols,
                            double scale = 1.0) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) {
    m.data()[i] = scale * rng.next_gaussian();
  }
  return m;
}

inline EmbeddingBatch random_batch(std::uint64_t seed, std::size_t n, std::size_t d,
                                   double scale = 1.0) {
  SplitMix64 rng(seed);
  return EmbeddingBatch(random_matrix(rng, n, d, scale));
}

// Independent covariance oracle: textbook two-pass formula, plain loops,
// no shared code with covariance().
inline Matrix two_pass_covariance(const Matrix& x) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  std::vector<double> mean(d, 0.0);
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t r = 0; r < n; ++r) mean[c] += x(r, c);
    mean[c] /= static_cast<double>(n);
  }
  Matrix cov(d, d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double acc = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        acc += (x(r, i) - mean[i]) * (x(r, j) - mean[j]);
      }
      cov(i, j) = acc / static_cast<double>(n - 1);
    }
  }
  return cov;
}

// Random symmetric PSD matrix built as B'B from a random factor.
inline Matrix random_psd(SplitMix64& rng, std::size_t d, std::size_t rank) {
  const Matrix b = random_matrix(rng, rank, d);
  Matrix psd(d, d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double acc = 0.0;
      for (std::size_t r = 0; r < rank; ++r) acc += b(r, i) * b(r, j);
      psd(i, j) = acc;
    }
  }
  return psd;
}

}  // namespace becr::testing

#endif  // BECR_TESTS_TEST_UTIL_HPP_
