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
#include <limits>

#include "doctest.h"

#include "becr/errors.hpp"
#include "becr/linalg.hpp"
#include "test_util.hpp"

using namespace becr;

namespace {

double max_entry_diff(const Matrix& a, const Matrix& b) {
  REQUIRE(a.rows() == b.rows());
  REQUIRE(a.cols() == b.cols());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::fabs(a.data()[i] - b.data()[i]));
  }
  return worst;
}

}  // namespace

TEST_CASE("embedding batch validation") {
  CHECK_THROWS_AS(EmbeddingBatch(Matrix::from_rows({{1.0, 2.0}})),
                  InsufficientSamplesError);
  CHECK_THROWS_AS(EmbeddingBatch(Matrix(3, 0)), InvalidInputError);
  Matrix bad = Matrix::from_rows({{1.0, 2.0}, {3.0, std::nan("")}});
  CHECK_THROWS_AS(EmbeddingBatch(std::move(bad)), InvalidInputError);
  Matrix inf = Matrix::from_rows({{1.0}, {std::numeric_limits<double>::infinity()}});
  CHECK_THROWS_AS(EmbeddingBatch(std::move(inf)), InvalidInputError);
}

TEST_CASE("center_rows hand examples") {
  const EmbeddingBatch b(Matrix::from_rows({{1.0, 1.0}, {3.0, 3.0}}));
  const Matrix c = center_rows(b).data();
  CHECK(c(0, 0) == -1.0);
  CHECK(c(0, 1) == -1.0);
  CHECK(c(1, 0) == 1.0);
  CHECK(c(1, 1) == 1.0);

  const EmbeddingBatch constant(Matrix::from_rows({{5.0}, {5.0}, {5.0}}));
  const Matrix cc = center_rows(constant).data();
  for (std::size_t r = 0; r < 3; ++r) CHECK(cc(r, 0) == 0.0);
}

TEST_CASE("center_rows is idempotent and zero-mean") {
  const EmbeddingBatch b = testing::random_batch(11, 7, 5, 3.0);
  const EmbeddingBatch once = center_rows(b);
  const EmbeddingBatch twice = center_rows(once);
  CHECK(max_entry_diff(once.data(), twice.data()) <= 1e-12);

  for (std::size_t c = 0; c < once.dim(); ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < once.n_samples(); ++r) mean += once.data()(r, c);
    mean /= static_cast<double>(once.n_samples());
    CHECK(std::fabs(mean) <= 1e-12);
  }
}

TEST_CASE("covariance hand examples") {
  const EmbeddingBatch b(Matrix::from_rows({{0.0, 0.0}, {2.0, 2.0}}));
  const Matrix k = covariance(b).data();
  CHECK(k(0, 0) == 2.0);
  CHECK(k(0, 1) == 2.0);
  CHECK(k(1, 0) == 2.0);
  CHECK(k(1, 1) == 2.0);

  const EmbeddingBatch same(Matrix::from_rows({{1.5, -2.0}, {1.5, -2.0}, {1.5, -2.0}}));
  const Matrix zero = covariance(same).data();
  for (std::size_t i = 0; i < zero.size(); ++i) CHECK(zero.data()[i] == 0.0);
}

TEST_CASE("covariance matches the two-pass oracle") {
  const Matrix x = Matrix::from_rows({{1.0, 0.0}, {0.0, 1.0}, {-1.0, -1.0}});
  const Matrix expected = testing::two_pass_covariance(x);
  const Matrix got = covariance(EmbeddingBatch(x)).data();
  CHECK(max_entry_diff(expected, got) <= 1e-12);

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const EmbeddingBatch b = testing::random_batch(100 + seed, 9, 6, 2.0);
    const Matrix oracle = testing::two_pass_covariance(b.data());
    CHECK(max_entry_diff(oracle, covariance(b).data()) <= 1e-10);
  }
}

TEST_CASE("covariance is invariant under row permutation") {
  const EmbeddingBatch b = testing::random_batch(21, 8, 4);
  const Matrix k = covariance(b).data();

  Matrix reversed(8, 4);
  for (std::size_t r = 0; r < 8; ++r) {
    for (std::size_t c = 0; c < 4; ++c) reversed(r, c) = b.data()(7 - r, c);
  }
  const Matrix k2 = covariance(EmbeddingBatch(std::move(reversed))).data();
  CHECK(max_entry_diff(k, k2) <= 1e-12);
}

TEST_CASE("scaling the batch scales eigenvalues by c^2") {
  const EmbeddingBatch b = testing::random_batch(33, 6, 5);
  const EigenSpectrum base = sym_eigenvalues(covariance(b));

  const double c = 3.5;
  Matrix scaled = b.data();
  for (std::size_t i = 0; i < scaled.size(); ++i) scaled.data()[i] *= c;
  const EigenSpectrum spectrum = sym_eigenvalues(covariance(EmbeddingBatch(scaled)));

  for (std::size_t i = 0; i < base.values.size(); ++i) {
    const double expected = c * c * base.values[i];
    CHECK(spectrum.values[i] == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("covariance matrix type checks symmetry") {
  CHECK_THROWS_AS(CovarianceMatrix(Matrix::from_rows({{1.0, 2.0}, {2.1, 1.0}})),
                  InvalidInputError);
  CHECK_THROWS_AS(CovarianceMatrix(Matrix(2, 3)), InvalidInputError);
  CHECK_NOTHROW(CovarianceMatrix(Matrix::from_rows({{1.0, 2.0}, {2.0, 1.0}})));
}

TEST_CASE("sym_eigenvalues hand examples") {
  Matrix identity(3, 3, 0.0);
  for (int i = 0; i < 3; ++i) identity(i, i) = 1.0;
  const EigenSpectrum id = sym_eigenvalues(CovarianceMatrix(std::move(identity)));
  for (double v : id.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

  const EigenSpectrum pair =
      sym_eigenvalues(CovarianceMatrix(Matrix::from_rows({{2.0, 2.0}, {2.0, 2.0}})));
  CHECK(pair.values[0] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(std::fabs(pair.values[1]) <= 1e-12);
}

TEST_CASE("sym_eigenvalues satisfies the trace identities") {
  SplitMix64 rng(7);
  for (int rep = 0; rep < 4; ++rep) {
    const Matrix psd = testing::random_psd(rng, 6, 6);
    const CovarianceMatrix cov{Matrix(psd)};
    const EigenSpectrum spectrum = sym_eigenvalues(cov);

    CHECK(std::is_sorted(spectrum.values.rbegin(), spectrum.values.rend()));
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double v : spectrum.values) {
      sum += v;
      sum_sq += v * v;
    }
    CHECK(sum == doctest::Approx(trace(cov)).epsilon(1e-9));
    CHECK(sum_sq == doctest::Approx(trace_of_square(cov)).epsilon(1e-9));
  }
}

TEST_CASE("sym_eigenvalues handles indefinite symmetric input") {
  // trace_of_square's oracle example: random symmetric, not necessarily PSD.
  SplitMix64 rng(99);
  Matrix sym(5, 5);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = i; j < 5; ++j) {
      sym(i, j) = rng.next_gaussian();
      sym(j, i) = sym(i, j);
    }
  }
  const CovarianceMatrix cov{Matrix(sym)};
  const EigenSpectrum spectrum = sym_eigenvalues(cov);
  double sum_sq = 0.0;
  for (double v : spectrum.values) sum_sq += v * v;
  CHECK(sum_sq == doctest::Approx(trace_of_square(cov)).epsilon(1e-9));
}

TEST_CASE("sym_eigenvalues on larger random PSD stays consistent") {
  SplitMix64 rng(5);
  const Matrix psd = testing::random_psd(rng, 40, 40);
  const CovarianceMatrix cov{Matrix(psd)};
  const EigenSpectrum spectrum = sym_eigenvalues(cov);
  double sum = 0.0;
  for (double v : spectrum.values) sum += v;
  CHECK(sum == doctest::Approx(trace(cov)).epsilon(1e-9));
  CHECK(spectrum.clamped_nonnegative().values.back() >= 0.0);
}

TEST_CASE("trace and trace_of_square") {
  Matrix identity(4, 4, 0.0);
  for (int i = 0; i < 4; ++i) identity(i, i) = 1.0;
  const CovarianceMatrix id{std::move(identity)};
  CHECK(trace(id) == 4.0);
  CHECK(trace_of_square(id) == 4.0);

  const CovarianceMatrix pair{Matrix::from_rows({{2.0, 2.0}, {2.0, 2.0}})};
  CHECK(trace(pair) == 4.0);
  CHECK(trace_of_square(pair) == 16.0);  // K^2 = [[8,8],[8,8]]

  const CovarianceMatrix zero{Matrix(3, 3, 0.0)};
  CHECK(trace(zero) == 0.0);
  CHECK(trace_of_square(zero) == 0.0);
}

TEST_CASE("gram_traces hand examples") {
  const GramTraces t = gram_traces(EmbeddingBatch(Matrix::from_rows({{0.0, 0.0}, {2.0, 2.0}})));
  CHECK(t.tr_k == 4.0);
  CHECK(t.tr_k2 == 16.0);

  const GramTraces zero =
      gram_traces(EmbeddingBatch(Matrix::from_rows({{1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}})));
  CHECK(zero.tr_k == 0.0);
  CHECK(zero.tr_k2 == 0.0);
}

TEST_CASE("gram_traces agrees with the direct covariance path") {
  const EmbeddingBatch wide = testing::random_batch(42, 10, 256);
  const CovarianceMatrix cov = covariance(wide);
  const GramTraces t = gram_traces(wide);
  CHECK(t.tr_k == doctest::Approx(trace(cov)).epsilon(1e-9));
  CHECK(t.tr_k2 == doctest::Approx(trace_of_square(cov)).epsilon(1e-9));

  SplitMix64 rng(77);
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t n = 2 + rng.next_below(15);
    const std::size_t d = 1 + rng.next_below(512);
    const EmbeddingBatch b = testing::random_batch(1000 + rep, n, d);
    const CovarianceMatrix c = covariance(b);
    const GramTraces g = gram_traces(b);
    CHECK(g.tr_k == doctest::Approx(trace(c)).epsilon(1e-9));
    CHECK(g.tr_k2 == doctest::Approx(trace_of_square(c)).epsilon(1e-9));
  }
}

TEST_CASE("eigen spectrum clamps PSD drift only") {
  EigenSpectrum drift{{2.0, 1.0, -1e-12}};
  const EigenSpectrum clamped = drift.clamped_nonnegative();
  CHECK(clamped.values[2] == 0.0);

  EigenSpectrum indefinite{{2.0, 1.0, -0.5}};
  CHECK_THROWS_AS(indefinite.clamped_nonnegative(), InvalidInputError);
}
