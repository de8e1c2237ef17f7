#include "lectern/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lectern/error.hpp"
#include "lectern/rng.hpp"

namespace lectern::cluster {

namespace {

Matrix kmeanspp_init(const Matrix& m, std::size_t k, std::mt19937_64& rng) {
  const std::size_t n = m.rows();
  std::vector<std::size_t> chosen;
  chosen.reserve(k);
  std::vector<bool> is_chosen(n, false);

  chosen.push_back(uniform_index(rng, n));
  is_chosen[chosen.back()] = true;

  std::vector<double> dist2(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    dist2[i] = squared_distance(m.row(i), m.row(chosen[0]));

  while (chosen.size() < k) {
    double total = 0.0;
    for (double d : dist2) total += d;
    std::size_t next = n;
    if (total > 0.0) {
      const double r = uniform_unit(rng) * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += dist2[i];
        if (acc >= r && !is_chosen[i]) {
          next = i;
          break;
        }
      }
      // cumulative walk can land past the last positive-mass row
      if (next == n) {
        for (std::size_t i = n; i-- > 0;) {
          if (!is_chosen[i] && dist2[i] > 0.0) {
            next = i;
            break;
          }
        }
      }
    }
    if (next == n) {
      // no positive mass left (duplicate rows): lowest unchosen index
      for (std::size_t i = 0; i < n; ++i) {
        if (!is_chosen[i]) {
          next = i;
          break;
        }
      }
    }
    chosen.push_back(next);
    is_chosen[next] = true;
    for (std::size_t i = 0; i < n; ++i)
      dist2[i] = std::min(dist2[i], squared_distance(m.row(i), m.row(next)));
  }

  Matrix centroids(k, m.cols());
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t j = 0; j < m.cols(); ++j) centroids(c, j) = m(chosen[c], j);
  return centroids;
}

double data_diameter(const Matrix& m) {
  double best = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.rows(); ++j)
      best = std::max(best, squared_distance(m.row(i), m.row(j)));
  return std::sqrt(best);
}

// nearest centroid per row, ties toward the lowest cluster id
void assign_rows(const Matrix& m, const Matrix& centroids,
                 std::vector<std::size_t>& assignments) {
  const std::size_t n = m.rows();
  const std::size_t k = centroids.rows();
  assignments.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    double best_d = squared_distance(m.row(i), centroids.row(0));
    for (std::size_t c = 1; c < k; ++c) {
      const double d = squared_distance(m.row(i), centroids.row(c));
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    assignments[i] = best;
  }
}

// Give every empty cluster the row farthest from its current centroid,
// stealing only from clusters that keep at least one member. Returns true if
// anything moved.
bool reseed_empty_clusters(const Matrix& m, Matrix& centroids,
                           std::vector<std::size_t>& assignments, std::size_t k) {
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t a : assignments) ++counts[a];

  bool changed = false;
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] > 0) continue;
    std::size_t victim = m.rows();
    double worst = -1.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (counts[assignments[i]] < 2) continue;
      const double d = squared_distance(m.row(i), centroids.row(assignments[i]));
      if (d > worst) {
        worst = d;
        victim = i;
      }
    }
    // k <= N guarantees a donor cluster of size >= 2 exists
    --counts[assignments[victim]];
    assignments[victim] = c;
    counts[c] = 1;
    for (std::size_t j = 0; j < m.cols(); ++j) centroids(c, j) = m(victim, j);
    changed = true;
  }
  return changed;
}

double total_inertia(const Matrix& m, const Matrix& centroids,
                     const std::vector<std::size_t>& assignments) {
  double acc = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    acc += squared_distance(m.row(i), centroids.row(assignments[i]));
  return acc;
}

Matrix centroid_means(const Matrix& m, const std::vector<std::size_t>& assignments,
                      std::size_t k) {
  Matrix means(k, m.cols(), 0.0);
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < m.rows(); ++i) {  // fixed accumulation order
    const std::size_t c = assignments[i];
    ++counts[c];
    for (std::size_t j = 0; j < m.cols(); ++j) means(c, j) += m(i, j);
  }
  for (std::size_t c = 0; c < k; ++c)
    if (counts[c] > 0)
      for (std::size_t j = 0; j < m.cols(); ++j)
        means(c, j) /= static_cast<double>(counts[c]);
  return means;
}

}  // namespace

ClusterResult kmeans_fit(const Matrix& matrix, std::size_t k,
                         const KMeansOptions& options) {
  const std::size_t n = matrix.rows();
  if (n == 0) throw Error(ErrorCode::empty_matrix, "cannot cluster an empty matrix");
  if (k == 0) throw Error(ErrorCode::invalid_params, "k must be positive");
  if (k > n)
    throw Error(ErrorCode::k_too_large,
                "k=" + std::to_string(k) + " exceeds row count " + std::to_string(n));
  if (!matrix.all_finite())
    throw Error(ErrorCode::invalid_params, "matrix contains non-finite values");

  std::mt19937_64 rng(options.seed);
  ClusterResult result;
  result.k = k;
  result.centroids = kmeanspp_init(matrix, k, rng);

  const double diameter = data_diameter(matrix);
  const double shift_threshold = options.tol * diameter;

  assign_rows(matrix, result.centroids, result.assignments);
  bool reseeded = reseed_empty_clusters(matrix, result.centroids, result.assignments, k);
  result.inertia_trace.push_back(
      total_inertia(matrix, result.centroids, result.assignments));
  result.iterations = 1;

  std::vector<std::size_t> next_assignments;
  while (result.iterations < options.max_iter) {
    const Matrix updated = centroid_means(matrix, result.assignments, k);
    double max_shift = 0.0;
    for (std::size_t c = 0; c < k; ++c)
      max_shift =
          std::max(max_shift, euclidean_distance(result.centroids.row(c), updated.row(c)));
    result.centroids = updated;

    assign_rows(matrix, result.centroids, next_assignments);
    reseeded = reseed_empty_clusters(matrix, result.centroids, next_assignments, k);
    result.inertia_trace.push_back(
        total_inertia(matrix, result.centroids, next_assignments));
    ++result.iterations;

    const bool stable = !reseeded && next_assignments == result.assignments;
    result.assignments = next_assignments;
    if (stable || (!reseeded && max_shift <= shift_threshold)) break;
  }

  result.inertia = result.inertia_trace.back();

  result.selected.assign(k, n);
  std::vector<double> best(k, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = result.assignments[i];
    const double d = squared_distance(matrix.row(i), result.centroids.row(c));
    if (d < best[c]) {  // strict: ties keep the lowest row index
      best[c] = d;
      result.selected[c] = i;
    }
  }
  return result;
}

std::vector<std::size_t> select_centroid_sentences(const ClusterResult& result,
                                                   const Matrix& matrix) {
  if (result.assignments.size() != matrix.rows())
    throw Error(ErrorCode::invalid_params, "result does not belong to this matrix");
  std::vector<std::size_t> indices = result.selected;
  std::sort(indices.begin(), indices.end());
  return indices;
}

}  // namespace lectern::cluster
