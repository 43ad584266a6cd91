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

#include "becr/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "becr/errors.hpp"
#include "becr/regularizer.hpp"
#include "becr/rng.hpp"

namespace becr {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

std::vector<double> column_means(const Matrix& x) {
  std::vector<double> mean(x.cols(), 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double* row = x.data() + r * x.cols();
    for (std::size_t c = 0; c < x.cols(); ++c) mean[c] += row[c];
  }
  for (double& v : mean) v /= static_cast<double>(x.rows());
  return mean;
}

Matrix cluster_means(const Matrix& x, const std::vector<int>& labels, int k) {
  Matrix centroids(static_cast<std::size_t>(k), x.cols(), 0.0);
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const int label = labels[r];
    counts[label] += 1;
    double* crow = centroids.data() + static_cast<std::size_t>(label) * x.cols();
    const double* row = x.data() + r * x.cols();
    for (std::size_t c = 0; c < x.cols(); ++c) crow[c] += row[c];
  }
  for (int j = 0; j < k; ++j) {
    if (counts[j] == 0) continue;  // caller repairs empties
    double* crow = centroids.data() + static_cast<std::size_t>(j) * x.cols();
    for (std::size_t c = 0; c < x.cols(); ++c) crow[c] /= static_cast<double>(counts[j]);
  }
  return centroids;
}

// Nearest centroid per point. On an exact distance tie the point keeps its
// current label when that label attains the minimum (stops oscillation on
// duplicate points); otherwise the lowest index wins.
std::vector<int> assign_nearest(const Matrix& x, const Matrix& centroids,
                                const std::vector<int>* current) {
  const std::size_t n = x.rows();
  const int k = static_cast<int>(centroids.rows());
  std::vector<int> labels(n, 0);
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = x.row(r);
    int best = 0;
    double best_d = squared_distance(row, centroids.row(0));
    for (int j = 1; j < k; ++j) {
      const double dist = squared_distance(row, centroids.row(j));
      if (dist < best_d) {
        best_d = dist;
        best = j;
      }
    }
    if (current != nullptr) {
      const int prev = (*current)[r];
      if (prev != best && squared_distance(row, centroids.row(prev)) == best_d) {
        best = prev;
      }
    }
    labels[r] = best;
  }
  return labels;
}

// Reseed every empty cluster on the point farthest from its stale centroid,
// taken from a cluster that can spare a point. Deterministic: clusters
// ascending, ties to the lowest point index.
void repair_empty_clusters(const Matrix& x, std::vector<int>& labels,
                           const Matrix& centroids, int k) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  for (int label : labels) counts[label] += 1;
  for (int j = 0; j < k; ++j) {
    if (counts[j] > 0) continue;
    std::size_t farthest = std::numeric_limits<std::size_t>::max();
    double far_d = -1.0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
      if (counts[labels[r]] <= 1) continue;
      const double dist = squared_distance(x.row(r), centroids.row(j));
      if (dist > far_d) {
        far_d = dist;
        farthest = r;
      }
    }
    if (farthest == std::numeric_limits<std::size_t>::max()) continue;
    counts[labels[farthest]] -= 1;
    labels[farthest] = j;
    counts[j] = 1;
  }
}

void validate_assignment(const EmbeddingBatch& batch, const ClusterAssignment& a) {
  const std::size_t n = batch.n_samples();
  if (a.k < 2) throw InvalidInputError("assignment needs k >= 2");
  if (a.labels.size() != n) {
    throw InvalidInputError("assignment has " + std::to_string(a.labels.size()) +
                            " labels for " + std::to_string(n) + " samples");
  }
  if (a.centroids.rows() != static_cast<std::size_t>(a.k) ||
      a.centroids.cols() != batch.dim()) {
    throw InvalidInputError("centroid matrix shape does not match (k, dim)");
  }
  if (!all_finite(a.centroids)) throw InvalidInputError("non-finite centroid");
  std::vector<std::size_t> counts(static_cast<std::size_t>(a.k), 0);
  for (int label : a.labels) {
    if (label < 0 || label >= a.k) {
      throw InvalidInputError("cluster label " + std::to_string(label) + " out of range");
    }
    counts[label] += 1;
  }
  for (int j = 0; j < a.k; ++j) {
    if (counts[j] == 0) {
      throw InvalidInputError("cluster " + std::to_string(j) + " is empty");
    }
  }
}

struct Scatter {
  double within = 0.0;
  double between = 0.0;
};

// Point-major accumulation of the ANOVA scatter decomposition.
Scatter euclidean_scatter(const Matrix& x, const ClusterAssignment& a) {
  Scatter s;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    s.within += squared_distance(x.row(r), a.centroids.row(a.labels[r]));
  }
  const std::vector<double> mean = column_means(x);
  std::vector<std::size_t> counts(static_cast<std::size_t>(a.k), 0);
  for (int label : a.labels) counts[label] += 1;
  for (int j = 0; j < a.k; ++j) {
    const double dist = squared_distance(a.centroids.row(j), {mean.data(), mean.size()});
    s.between += static_cast<double>(counts[j]) * dist;
  }
  return s;
}

double scatter_ratio(const Scatter& s, std::size_t n, int k) {
  if (s.within == 0.0 && s.between == 0.0) {
    throw InvalidInputError("zero between- and within-cluster scatter");
  }
  const double num = s.between / static_cast<double>(k - 1);
  const double den = s.within / static_cast<double>(n - k);
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return num / den;
}

}  // namespace

double top_m_eigenvalue_ratio(const EmbeddingBatch& batch, int m) {
  const std::size_t d = batch.dim();
  if (m < 1 || static_cast<std::size_t>(m) > d) {
    throw InvalidInputError("m must lie in [1, dim], got " + std::to_string(m));
  }
  const EigenSpectrum spectrum =
      sym_eigenvalues(covariance(batch)).clamped_nonnegative();
  const double total = spectrum.sum();
  if (trace_is_degenerate(total, max_abs(batch.data()), d)) {
    throw DegenerateSpectrumError("zero covariance; eigenvalue ratio undefined");
  }
  double top = 0.0;
  for (int i = 0; i < m; ++i) top += spectrum.values[i];
  return top / total;
}

namespace {

// One k-means++ seeding plus Lloyd's iterations on the given stream.
ClusterAssignment lloyd_once(const Matrix& x, int k, SplitMix64& rng);

double within_sse(const Matrix& x, const ClusterAssignment& a) {
  double sse = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    sse += squared_distance(x.row(r), a.centroids.row(a.labels[r]));
  }
  return sse;
}

}  // namespace

ClusterAssignment kmeans(const EmbeddingBatch& batch, int k, std::uint64_t seed) {
  const Matrix& x = batch.data();
  if (k < 2 || static_cast<std::size_t>(k) > x.rows()) {
    throw InvalidInputError("k must lie in [2, n_samples], got " + std::to_string(k));
  }
  // Lloyd's algorithm only finds a local optimum; a handful of seeded
  // restarts keeps the best partition by within-cluster SSE. Restart streams
  // are split off the root seed, so the result is a pure function of
  // (batch, k, seed).
  constexpr int kRestarts = 8;
  SplitMix64 root(seed);
  ClusterAssignment best;
  double best_sse = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < kRestarts; ++restart) {
    SplitMix64 stream = root.split();
    ClusterAssignment candidate = lloyd_once(x, k, stream);
    const double sse = within_sse(x, candidate);
    if (sse < best_sse) {
      best_sse = sse;
      best = std::move(candidate);
    }
  }
  return best;
}

namespace {

ClusterAssignment lloyd_once(const Matrix& x, int k, SplitMix64& rng) {
  const std::size_t n = x.rows();
  std::vector<std::size_t> center_rows_idx;
  center_rows_idx.reserve(k);
  std::vector<bool> is_center(n, false);
  const std::size_t first = static_cast<std::size_t>(rng.next_below(n));
  center_rows_idx.push_back(first);
  is_center[first] = true;

  std::vector<double> dist_sq(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    dist_sq[r] = squared_distance(x.row(r), x.row(first));
  }
  while (center_rows_idx.size() < static_cast<std::size_t>(k)) {
    double total = 0.0;
    for (double v : dist_sq) total += v;
    std::size_t chosen = n;
    if (total > 0.0) {
      const double u = rng.next_double() * total;
      double cum = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        cum += dist_sq[r];
        if (cum > u && dist_sq[r] > 0.0) {
          chosen = r;
          break;
        }
      }
      if (chosen == n) {  // rounding pushed u past the last mass
        for (std::size_t r = n; r-- > 0;) {
          if (dist_sq[r] > 0.0) {
            chosen = r;
            break;
          }
        }
      }
    }
    if (chosen == n) {  // all remaining points coincide with a center
      for (std::size_t r = 0; r < n; ++r) {
        if (!is_center[r]) {
          chosen = r;
          break;
        }
      }
    }
    is_center[chosen] = true;
    center_rows_idx.push_back(chosen);
    for (std::size_t r = 0; r < n; ++r) {
      dist_sq[r] = std::min(dist_sq[r], squared_distance(x.row(r), x.row(chosen)));
    }
  }

  Matrix centroids(static_cast<std::size_t>(k), x.cols());
  for (int j = 0; j < k; ++j) {
    const auto src = x.row(center_rows_idx[j]);
    std::copy(src.begin(), src.end(), centroids.row(j).begin());
  }

  std::vector<int> labels = assign_nearest(x, centroids, nullptr);
  repair_empty_clusters(x, labels, centroids, k);

  constexpr int kMaxIterations = 300;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    centroids = cluster_means(x, labels, k);
    std::vector<int> next = assign_nearest(x, centroids, &labels);
    repair_empty_clusters(x, next, centroids, k);
    const bool stable = next == labels;
    labels = std::move(next);
    if (stable) break;
  }

  ClusterAssignment result;
  result.labels = std::move(labels);
  result.k = k;
  result.centroids = cluster_means(x, result.labels, k);
  return result;
}

}  // namespace

ClusterAssignment assignment_from_labels(const EmbeddingBatch& batch,
                                         std::vector<int> labels, int k) {
  ClusterAssignment a;
  a.labels = std::move(labels);
  a.k = k;
  if (a.labels.size() != batch.n_samples()) {
    throw InvalidInputError("label count does not match batch rows");
  }
  for (int label : a.labels) {
    if (label < 0 || label >= k) {
      throw InvalidInputError("cluster label " + std::to_string(label) + " out of range");
    }
  }
  a.centroids = cluster_means(batch.data(), a.labels, k);
  validate_assignment(batch, a);
  return a;
}

double f_test(const EmbeddingBatch& batch, const ClusterAssignment& assignment) {
  validate_assignment(batch, assignment);
  const std::size_t n = batch.n_samples();
  if (n <= static_cast<std::size_t>(assignment.k)) {
    throw InvalidInputError("f_test needs more samples than clusters");
  }
  const Scatter s = euclidean_scatter(batch.data(), assignment);
  return scatter_ratio(s, n, assignment.k);
}

double calinski_harabasz(const EmbeddingBatch& batch, const ClusterAssignment& assignment) {
  validate_assignment(batch, assignment);
  const std::size_t n = batch.n_samples();
  if (n <= static_cast<std::size_t>(assignment.k)) {
    throw InvalidInputError("calinski_harabasz needs more samples than clusters");
  }
  // Scatter-matrix traces accumulated dimension-major; algebraically the
  // same decomposition f_test uses, kept as an independent numerical route.
  const Matrix& x = batch.data();
  const std::vector<double> mean = column_means(x);
  std::vector<std::size_t> counts(static_cast<std::size_t>(assignment.k), 0);
  for (int label : assignment.labels) counts[label] += 1;
  Scatter s;
  for (std::size_t c = 0; c < x.cols(); ++c) {
    for (int j = 0; j < assignment.k; ++j) {
      const double diff = assignment.centroids(j, c) - mean[c];
      s.between += static_cast<double>(counts[j]) * diff * diff;
    }
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const double diff = x(r, c) - assignment.centroids(assignment.labels[r], c);
      s.within += diff * diff;
    }
  }
  return scatter_ratio(s, n, assignment.k);
}

DispersionReport dispersion_report(const EmbeddingBatch& batch, int k, int m,
                                   std::uint64_t seed) {
  const std::size_t n = batch.n_samples();
  const std::size_t d = batch.dim();
  if (m < 1 || static_cast<std::size_t>(m) > d) {
    throw InvalidInputError("m must lie in [1, dim], got " + std::to_string(m));
  }
  if (k < 2 || static_cast<std::size_t>(k) >= n) {
    throw InvalidInputError("k must lie in [2, n_samples), got " + std::to_string(k));
  }

  DispersionReport report;
  report.m = m;
  report.k = k;
  report.n_samples = n;
  report.dim = d;

  const GramTraces traces = gram_traces(batch);
  if (trace_is_degenerate(traces.tr_k, max_abs(batch.data()), d)) {
    report.degenerate_reason = "zero covariance (all rows identical)";
    return report;
  }

  report.gini_index = gini_trace(batch);
  report.top_m_eigenvalue_ratio = top_m_eigenvalue_ratio(batch, m);
  const ClusterAssignment assignment = kmeans(batch, k, seed);
  report.f_test = f_test(batch, assignment);
  report.calinski_harabasz = calinski_harabasz(batch, assignment);
  return report;
}

}  // namespace becr
