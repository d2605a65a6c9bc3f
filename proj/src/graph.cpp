#include "sggnn/graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace sggnn {

Graph Graph::from_edges(Index num_nodes, const std::vector<Triplet>& edges,
                        bool directed, std::size_t* num_duplicates) {
  std::vector<Triplet> sorted = edges;
  for (const auto& t : sorted) {
    if (t.row() < 0 || t.row() >= num_nodes || t.col() < 0 ||
        t.col() >= num_nodes) {
      throw std::invalid_argument(
          "edge endpoint out of range: (" + std::to_string(t.row()) + ", " +
          std::to_string(t.col()) + ") with num_nodes=" +
          std::to_string(num_nodes));
    }
  }
  // Stable sort keeps input order within equal keys, so "first occurrence
  // wins" is just std::unique afterwards.
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Triplet& a, const Triplet& b) {
                     return a.row() != b.row() ? a.row() < b.row()
                                               : a.col() < b.col();
                   });
  auto last = std::unique(sorted.begin(), sorted.end(),
                          [](const Triplet& a, const Triplet& b) {
                            return a.row() == b.row() && a.col() == b.col();
                          });
  if (num_duplicates != nullptr) {
    *num_duplicates = static_cast<std::size_t>(sorted.end() - last);
  }
  sorted.erase(last, sorted.end());

  SpMat adj(num_nodes, num_nodes);
  adj.setFromTriplets(sorted.begin(), sorted.end());
  adj.makeCompressed();
  return from_matrix(std::move(adj), directed);
}

Graph Graph::from_matrix(SpMat adjacency, bool directed) {
  if (adjacency.rows() != adjacency.cols()) {
    throw std::invalid_argument("adjacency must be square");
  }
  if (!adjacency.isCompressed()) adjacency.makeCompressed();
  if (!directed) {
    SpMat t = SpMat(adjacency.transpose());
    if (!adjacency.isApprox(t, 0.0)) {
      throw std::invalid_argument(
          "undirected graph requires a symmetric adjacency");
    }
  }
  return Graph(std::move(adjacency), directed);
}

bool Graph::has_edge(Index src, Index dst) const {
  auto row = neighbors(src);
  return std::binary_search(row.begin(), row.end(),
                            static_cast<SpMat::StorageIndex>(dst));
}

Graph to_undirected(const Graph& g) {
  const SpMat& a = g.adjacency();
  SpMat at = SpMat(a.transpose());  // materialized row-major, rows sorted

  const Index n = g.num_nodes();
  std::vector<Triplet> merged;
  merged.reserve(static_cast<std::size_t>(a.nonZeros()) * 2);
  for (Index i = 0; i < n; ++i) {
    SpMat::InnerIterator ia(a, i), it(at, i);
    while (ia || it) {
      if (ia && (!it || ia.col() < it.col())) {
        merged.emplace_back(i, ia.col(), ia.value());
        ++ia;
      } else if (it && (!ia || it.col() < ia.col())) {
        merged.emplace_back(i, it.col(), it.value());
        ++it;
      } else {
        merged.emplace_back(i, ia.col(), std::max(ia.value(), it.value()));
        ++ia;
        ++it;
      }
    }
  }
  SpMat sym(n, n);
  sym.setFromTriplets(merged.begin(), merged.end());
  sym.makeCompressed();
  return Graph::from_matrix(std::move(sym), false);
}

Graph sym_normalized_adjacency(const Graph& g) {
  if (g.directed()) {
    throw std::invalid_argument(
        "sym_normalized_adjacency requires an undirected graph");
  }
  const Index n = g.num_nodes();
  SpMat tilde = g.adjacency();
  SpMat eye(n, n);
  eye.setIdentity();
  tilde = tilde + eye;  // every node gains a self-loop
  tilde.makeCompressed();

  Vector deg = tilde * Vector::Ones(n);
  Vector dinv_sqrt = deg.array().sqrt().inverse();
  SpMat result = dinv_sqrt.asDiagonal() * tilde * dinv_sqrt.asDiagonal();
  result.makeCompressed();
  return Graph::from_matrix(std::move(result), false);
}

Graph row_normalized_adjacency(const Graph& g) {
  SpMat norm = g.adjacency();
  const Index n = g.num_nodes();
  for (Index i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (SpMat::InnerIterator it(norm, i); it; ++it) row_sum += it.value();
    if (row_sum == 0.0) continue;
    for (SpMat::InnerIterator it(norm, i); it; ++it) it.valueRef() /= row_sum;
  }
  // Row scaling breaks symmetry in general, so the result is directed.
  return Graph::from_matrix(std::move(norm), true);
}

Matrix spmm(const Graph& g, const Matrix& m) {
  if (g.num_nodes() != m.rows()) {
    throw std::invalid_argument("spmm: graph has " +
                                std::to_string(g.num_nodes()) +
                                " nodes but matrix has " +
                                std::to_string(m.rows()) + " rows");
  }
  return g.adjacency() * m;
}

}  // namespace sggnn
