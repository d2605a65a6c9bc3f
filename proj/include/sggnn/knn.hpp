#pragma once

#include "sggnn/graph.hpp"
#include "sggnn/types.hpp"

namespace sggnn {

struct KnnConfig {
  Index k = 3;
  // Union the directed nearest-neighbor edges into an undirected graph.
  bool symmetrize = true;
};

// All pairwise Euclidean distances between rows of z. Symmetric with a zero
// diagonal. Small inputs use the exact per-pair formula; larger ones use the
// Gram-matrix expansion with an exact recomputation of near-zero entries,
// where cancellation would otherwise corrupt ties between coincident rows.
Matrix pairwise_euclidean(const Matrix& z);

// Directed k-nearest-neighbor graph over rows of z: an edge i -> j with
// weight 1 for the k closest j != i, distance ties broken toward the smaller
// node index. Every out-degree is exactly k, which requires 1 <= k < N.
// With cfg.symmetrize the edges are unioned into an undirected graph.
Graph knn_graph(const Matrix& z, const KnnConfig& cfg);

}  // namespace sggnn
