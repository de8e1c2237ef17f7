#pragma once

#include <cstdint>
#include <vector>

#include "lectern/matrix.hpp"

namespace lectern::cluster {

struct KMeansOptions {
  std::uint64_t seed = 12345;
  std::size_t max_iter = 300;
  double tol = 1e-4;  // convergence: max centroid shift <= tol * data diameter
};

struct ClusterResult {
  std::size_t k = 0;
  std::vector<std::size_t> assignments;  // length N, values in [0, k)
  Matrix centroids;                      // k x E
  double inertia = 0.0;
  std::vector<std::size_t> selected;      // selected[c] = closest row of cluster c
  std::vector<double> inertia_trace;      // one entry per Lloyd iteration
  std::size_t iterations = 0;
};

/// Lloyd's algorithm with k-means++ initialization. Fully deterministic for a
/// given (matrix, k, seed): ties break toward the lowest cluster id / row
/// index, centroid means accumulate in row order, and the PRNG stream is
/// platform-stable. An emptied cluster is reseeded to the row farthest from
/// its own centroid. Distances are always computed in double precision.
ClusterResult kmeans_fit(const Matrix& matrix, std::size_t k,
                         const KMeansOptions& options = {});

/// Ascending row indices of each cluster's centroid-closest member.
std::vector<std::size_t> select_centroid_sentences(const ClusterResult& result,
                                                   const Matrix& matrix);

}  // namespace lectern::cluster
