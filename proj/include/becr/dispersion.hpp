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

#ifndef BECR_DISPERSION_HPP_
#define BECR_DISPERSION_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "becr/linalg.hpp"

namespace becr {

// Output of k-means: labels in [0, k), one per batch row, plus the cluster
// means. Returned assignments never contain an empty cluster.
struct ClusterAssignment {
  std::vector<int> labels;
  int k = 0;
  Matrix centroids;  // k x D
};

// Fraction of total variance carried by the m largest covariance
// eigenvalues, 1 <= m <= D. Monotone non-decreasing in m, 1 at m = D.
double top_m_eigenvalue_ratio(const EmbeddingBatch& batch, int m);

// Lloyd's algorithm with k-means++ seeding on a SplitMix64 stream.
// Deterministic in (batch, k, seed); stops when labels reach a fixed point
// or after 300 iterations. Empty clusters are repaired by reseeding the
// centroid on the farthest point.  2 <= k <= N.
ClusterAssignment kmeans(const EmbeddingBatch& batch, int k, std::uint64_t seed);

// Assignment from caller-provided labels; centroids are the cluster means.
// Throws if any cluster would be empty.
ClusterAssignment assignment_from_labels(const EmbeddingBatch& batch,
                                         std::vector<int> labels, int k);

// One-way ANOVA F statistic on Euclidean scatter:
// F = [SSB/(k-1)] / [SSW/(N-k)]. Requires N > k. Returns +inf when SSW is
// zero with positive SSB; zero SSW with zero SSB is an error.
double f_test(const EmbeddingBatch& batch, const ClusterAssignment& assignment);

// Calinski-Harabasz score [tr(B)/(k-1)] / [tr(W)/(N-k)] with B/W the
// between/within scatter matrices. Accumulated dimension-major as a second
// route; numerically equal to f_test under these shared definitions.
double calinski_harabasz(const EmbeddingBatch& batch, const ClusterAssignment& assignment);

// All dispersion diagnostics for one embedding set. On degenerate (zero)
// covariance the eigenvalue- and cluster-based metrics are all undefined;
// they are reported as nullopt with a reason instead of failing the report.
struct DispersionReport {
  std::optional<double> gini_index;
  std::optional<double> top_m_eigenvalue_ratio;
  std::optional<double> f_test;
  std::optional<double> calinski_harabasz;
  std::string degenerate_reason;  // empty unless the optionals are null
  int m = 0;
  int k = 0;
  std::size_t n_samples = 0;
  std::size_t dim = 0;
};

DispersionReport dispersion_report(const EmbeddingBatch& batch, int k, int m,
                                   std::uint64_t seed);

}  // namespace becr

#endif  // BECR_DISPERSION_HPP_
