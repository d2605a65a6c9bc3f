#include "sggnn/knn.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace sggnn {

namespace {

constexpr Index kExactPathLimit = 512;

double exact_distance(const Matrix& z, Index i, Index j) {
  return (z.row(i) - z.row(j)).norm();
}

Matrix pairwise_exact(const Matrix& z) {
  const Index n = z.rows();
  Matrix d = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = exact_distance(z, i, j);
  return d;
}

Matrix pairwise_gram(const Matrix& z) {
  const Index n = z.rows();
  Vector sq = z.rowwise().squaredNorm();
  Matrix d2 = (-2.0 * z * z.transpose()).rowwise() + sq.transpose();
  d2.colwise() += sq;
  d2 = d2.cwiseMax(0.0);
  d2.diagonal().setZero();

  // Entries near zero lose most of their significant digits to cancellation;
  // recompute them exactly so coincident rows come out at distance 0.
  const double suspicious = 1e-8 * std::max(1.0, sq.maxCoeff());
  Matrix d(n, n);
  for (Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Index j = i + 1; j < n; ++j) {
      double v = d2(i, j) < suspicious ? exact_distance(z, i, j)
                                       : std::sqrt(d2(i, j));
      d(i, j) = d(j, i) = v;
    }
  }
  return d;
}

}  // namespace

Matrix pairwise_euclidean(const Matrix& z) {
  return z.rows() <= kExactPathLimit ? pairwise_exact(z) : pairwise_gram(z);
}

Graph knn_graph(const Matrix& z, const KnnConfig& cfg) {
  const Index n = z.rows();
  if (cfg.k < 1 || cfg.k >= n)
    throw std::invalid_argument("knn_graph: k must satisfy 1 <= k < N, got k=" +
                                std::to_string(cfg.k) + " with N=" +
                                std::to_string(n));

  Matrix d = pairwise_euclidean(z);
  std::vector<Triplet> edges;
  edges.reserve(static_cast<std::size_t>(n * cfg.k));
  std::vector<Index> order(static_cast<std::size_t>(n - 1));
  for (Index i = 0; i < n; ++i) {
    order.clear();
    for (Index j = 0; j < n; ++j)
      if (j != i) order.push_back(j);
    auto closer = [&](Index a, Index b) {
      return d(i, a) != d(i, b) ? d(i, a) < d(i, b) : a < b;
    };
    std::partial_sort(order.begin(), order.begin() + cfg.k, order.end(), closer);
    for (Index r = 0; r < cfg.k; ++r)
      edges.emplace_back(i, order[static_cast<std::size_t>(r)], 1.0);
  }

  Graph directed = Graph::from_edges(n, edges, true);
  return cfg.symmetrize ? to_undirected(directed) : directed;
}

}  // namespace sggnn
