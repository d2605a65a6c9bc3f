#pragma once

#include <span>
#include <vector>

#include "sggnn/types.hpp"

namespace sggnn {

/// Sparse graph in CSR form with sorted, duplicate-free column indices per
/// row. Row i holds the out-neighbors of node i; entry (i,j) is the weight of
/// edge i->j. Immutable after construction and safe to read from multiple
/// threads.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph from an edge list. Duplicate (src,dst) pairs collapse to
  /// the first occurrence; `num_duplicates`, when given, receives how many
  /// were dropped. Throws std::invalid_argument on out-of-range endpoints.
  static Graph from_edges(Index num_nodes, const std::vector<Triplet>& edges,
                          bool directed, std::size_t* num_duplicates = nullptr);

  /// Wraps an existing sparse matrix (compressed, sorted). When
  /// directed=false the matrix must be symmetric; this is verified.
  static Graph from_matrix(SpMat adjacency, bool directed);

  Index num_nodes() const { return adj_.rows(); }
  /// Number of stored entries (directed edge count).
  Index num_edges() const { return adj_.nonZeros(); }
  bool directed() const { return directed_; }

  const SpMat& adjacency() const { return adj_; }

  /// Column indices of row i, sorted ascending.
  std::span<const SpMat::StorageIndex> neighbors(Index i) const {
    const auto* idx = adj_.innerIndexPtr();
    const auto* off = adj_.outerIndexPtr();
    return {idx + off[i], idx + off[i + 1]};
  }

  std::span<const double> weights(Index i) const {
    const auto* val = adj_.valuePtr();
    const auto* off = adj_.outerIndexPtr();
    return {val + off[i], val + off[i + 1]};
  }

  Index out_degree(Index i) const {
    return adj_.outerIndexPtr()[i + 1] - adj_.outerIndexPtr()[i];
  }

  bool has_edge(Index src, Index dst) const;

 private:
  Graph(SpMat adj, bool directed) : adj_(std::move(adj)), directed_(directed) {}

  SpMat adj_;
  bool directed_ = true;
};

/// Symmetric closure: edge set is the union of the input's edges and their
/// reverses; a symmetrized pair keeps the max of the two directional weights.
/// Idempotent.
Graph to_undirected(const Graph& g);

/// The GCN propagation operator D^{-1/2} (I + A) D^{-1/2} with D the degree
/// matrix of I + A. Requires an undirected graph. Isolated nodes end up with
/// a lone diagonal entry 1.
Graph sym_normalized_adjacency(const Graph& g);

/// Divides every nonzero row by its row sum; zero rows stay zero.
Graph row_normalized_adjacency(const Graph& g);

/// Sparse-dense product A * M. Throws on row-count mismatch.
Matrix spmm(const Graph& g, const Matrix& m);

}  // namespace sggnn
