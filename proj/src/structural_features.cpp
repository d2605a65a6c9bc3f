#include "sggnn/structural_features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace sggnn {
namespace {

// Undirected simple view: symmetrized, self-loops dropped, weights ignored.
// All structure features except in/out degree are defined on this view.
struct SimpleGraph {
  Index n = 0;
  std::vector<std::vector<Index>> adj;  // sorted

  Index degree(Index i) const { return static_cast<Index>(adj[i].size()); }
};

SimpleGraph simple_undirected(const Graph& g) {
  Graph sym = g.directed() ? to_undirected(g) : g;
  SimpleGraph s;
  s.n = sym.num_nodes();
  s.adj.resize(s.n);
  for (Index i = 0; i < s.n; ++i) {
    auto cols = sym.neighbors(i);
    s.adj[i].reserve(cols.size());
    for (auto c : cols)
      if (c != i) s.adj[i].push_back(c);
  }
  return s;
}

Index sorted_intersection_size(const std::vector<Index>& a,
                               const std::vector<Index>& b) {
  Index count = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib)
      ++ia;
    else if (*ib < *ia)
      ++ib;
    else {
      ++count;
      ++ia;
      ++ib;
    }
  }
  return count;
}

Vector triangle_counts(const SimpleGraph& s) {
  Vector t = Vector::Zero(s.n);
  for (Index i = 0; i < s.n; ++i) {
    Index paths = 0;
    for (Index j : s.adj[i]) paths += sorted_intersection_size(s.adj[i], s.adj[j]);
    t[i] = static_cast<double>(paths) / 2.0;  // each triangle seen via two neighbors
  }
  return t;
}

Vector two_hop_sizes(const SimpleGraph& s) {
  Vector out = Vector::Zero(s.n);
  std::vector<Index> stamp(s.n, -1);  // stamp[v] == i marks v as seen for source i
  for (Index i = 0; i < s.n; ++i) {
    Index count = 0;
    stamp[i] = i;  // the node itself never counts
    for (Index j : s.adj[i]) {
      if (stamp[j] != i) {
        stamp[j] = i;
        ++count;
      }
    }
    for (Index j : s.adj[i]) {
      for (Index k : s.adj[j]) {
        if (stamp[k] != i) {
          stamp[k] = i;
          ++count;
        }
      }
    }
    out[i] = static_cast<double>(count);
  }
  return out;
}

Vector core_numbers(const SimpleGraph& s) {
  // Peeling in bucket order (Batagelj-Zaversnik).
  const Index n = s.n;
  std::vector<Index> deg(n), vert(n), pos(n), bin;
  Index max_deg = 0;
  for (Index i = 0; i < n; ++i) {
    deg[i] = s.degree(i);
    max_deg = std::max(max_deg, deg[i]);
  }
  bin.assign(max_deg + 1, 0);
  for (Index i = 0; i < n; ++i) ++bin[deg[i]];
  Index start = 0;
  for (Index d = 0; d <= max_deg; ++d) {
    Index count = bin[d];
    bin[d] = start;
    start += count;
  }
  for (Index i = 0; i < n; ++i) {
    pos[i] = bin[deg[i]]++;
    vert[pos[i]] = i;
  }
  for (Index d = max_deg; d > 0; --d) bin[d] = bin[d - 1];
  bin[0] = 0;

  std::vector<Index> core = deg;
  for (Index idx = 0; idx < n; ++idx) {
    Index v = vert[idx];
    for (Index u : s.adj[v]) {
      if (core[u] > core[v]) {
        Index du = core[u], pu = pos[u];
        Index pw = bin[du], w = vert[pw];
        if (u != w) {
          std::swap(vert[pu], vert[pw]);
          pos[u] = pw;
          pos[w] = pu;
        }
        ++bin[du];
        --core[u];
      }
    }
  }
  Vector out(n);
  for (Index i = 0; i < n; ++i) out[i] = static_cast<double>(core[i]);
  return out;
}

std::vector<Index> bfs_distances(const SimpleGraph& s, Index source) {
  std::vector<Index> dist(s.n, -1);
  dist[source] = 0;
  std::queue<Index> q;
  q.push(source);
  while (!q.empty()) {
    Index v = q.front();
    q.pop();
    for (Index w : s.adj[v]) {
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        q.push(w);
      }
    }
  }
  return dist;
}

Vector harmonic_closeness(const SimpleGraph& s) {
  Vector h = Vector::Zero(s.n);
  for (Index i = 0; i < s.n; ++i) {
    auto dist = bfs_distances(s, i);
    double acc = 0.0;
    for (Index j = 0; j < s.n; ++j)
      if (j != i && dist[j] > 0) acc += 1.0 / static_cast<double>(dist[j]);
    h[i] = acc;
  }
  return h;
}

Vector eccentricities(const SimpleGraph& s) {
  Vector ecc = Vector::Zero(s.n);
  for (Index i = 0; i < s.n; ++i) {
    auto dist = bfs_distances(s, i);
    Index m = 0;
    for (Index j = 0; j < s.n; ++j) m = std::max(m, dist[j]);
    ecc[i] = static_cast<double>(m);
  }
  return ecc;
}

Vector component_sizes(const SimpleGraph& s) {
  Vector out = Vector::Zero(s.n);
  std::vector<Index> comp(s.n, -1);
  std::vector<Index> members;
  for (Index i = 0; i < s.n; ++i) {
    if (comp[i] >= 0) continue;
    members.clear();
    comp[i] = i;
    std::queue<Index> q;
    q.push(i);
    members.push_back(i);
    while (!q.empty()) {
      Index v = q.front();
      q.pop();
      for (Index w : s.adj[v]) {
        if (comp[w] < 0) {
          comp[w] = i;
          members.push_back(w);
          q.push(w);
        }
      }
    }
    for (Index m : members) out[m] = static_cast<double>(members.size());
  }
  return out;
}

// Brandes' exact algorithm; each unordered pair contributes once (the
// all-sources accumulation double counts on undirected graphs, so halve).
Vector betweenness(const SimpleGraph& s) {
  const Index n = s.n;
  Vector cb = Vector::Zero(n);
  std::vector<Index> stack_order;
  std::vector<std::vector<Index>> preds(n);
  std::vector<double> sigma(n), delta(n);
  std::vector<Index> dist(n);
  stack_order.reserve(n);
  for (Index src = 0; src < n; ++src) {
    stack_order.clear();
    for (Index i = 0; i < n; ++i) {
      preds[i].clear();
      sigma[i] = 0.0;
      dist[i] = -1;
    }
    sigma[src] = 1.0;
    dist[src] = 0;
    std::queue<Index> q;
    q.push(src);
    while (!q.empty()) {
      Index v = q.front();
      q.pop();
      stack_order.push_back(v);
      for (Index w : s.adj[v]) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          q.push(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          preds[w].push_back(v);
        }
      }
    }
    std::fill(delta.begin(), delta.end(), 0.0);
    for (auto it = stack_order.rbegin(); it != stack_order.rend(); ++it) {
      Index w = *it;
      for (Index v : preds[w])
        delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != src) cb[w] += delta[w];
    }
  }
  return cb / 2.0;
}

Vector pagerank(const Graph& g, double damping, double tol, int max_iter) {
  Graph sym = g.directed() ? to_undirected(g) : g;
  const Index n = sym.num_nodes();
  Vector row_sum = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    for (double w : sym.weights(i)) row_sum[i] += w;
  }
  Vector pr = Vector::Constant(n, 1.0 / static_cast<double>(n));
  Vector next(n);
  for (int it = 0; it < max_iter; ++it) {
    double dangling = 0.0;
    for (Index i = 0; i < n; ++i)
      if (row_sum[i] == 0.0) dangling += pr[i];
    const double base =
        (1.0 - damping + damping * dangling) / static_cast<double>(n);
    next.setConstant(base);
    for (Index i = 0; i < n; ++i) {
      if (row_sum[i] == 0.0) continue;
      const double share = damping * pr[i] / row_sum[i];
      auto cols = sym.neighbors(i);
      auto vals = sym.weights(i);
      for (std::size_t t = 0; t < cols.size(); ++t)
        next[cols[t]] += share * vals[t];
    }
    const double diff = (next - pr).cwiseAbs().sum();
    pr.swap(next);
    if (diff < tol) break;
  }
  return pr;
}

Vector degrees_of(const SimpleGraph& s) {
  Vector d(s.n);
  for (Index i = 0; i < s.n; ++i) d[i] = static_cast<double>(s.degree(i));
  return d;
}

Vector eigenvector_centrality(const SimpleGraph& s, FeatureReport* report) {
  constexpr int kMaxIter = 1000;
  constexpr double kTol = 1e-10;
  const Index n = s.n;
  bool has_edge = false;
  for (Index i = 0; i < n && !has_edge; ++i) has_edge = !s.adj[i].empty();
  if (!has_edge) {
    if (report) {
      report->eigenvector_converged = true;
      report->eigenvector_iterations = 0;
    }
    return Vector::Zero(n);
  }
  Vector v = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  Vector w(n);
  for (int it = 1; it <= kMaxIter; ++it) {
    w.setZero();
    for (Index i = 0; i < n; ++i) {
      double acc = 0.0;
      for (Index j : s.adj[i]) acc += v[j];
      w[i] = acc;
    }
    const double norm = w.norm();
    if (norm == 0.0) break;
    w /= norm;
    if ((w - v).norm() < kTol) {
      if (report) {
        report->eigenvector_converged = true;
        report->eigenvector_iterations = it;
      }
      return w;
    }
    v.swap(w);
  }
  if (report) {
    report->eigenvector_converged = false;
    report->eigenvector_iterations = kMaxIter;
  }
  return degrees_of(s);  // fallback keeps the column informative
}

}  // namespace

const std::vector<std::string>& role_feature_catalog() {
  static const std::vector<std::string> names = {
      "in_degree",
      "out_degree",
      "total_degree",
      "triangle_count",
      "local_clustering_coefficient",
      "egonet_edge_count",
      "egonet_size",
      "average_neighbor_degree",
      "two_hop_neighborhood_size",
      "core_number",
  };
  return names;
}

const std::vector<std::string>& global_feature_catalog() {
  static const std::vector<std::string> names = {
      "pagerank",         "harmonic_closeness", "betweenness",
      "eigenvector_centrality", "eccentricity",       "component_size",
  };
  return names;
}

FeatureSpec default_role_spec(bool standardize) {
  return {FeatureKind::role, role_feature_catalog(), standardize};
}

FeatureSpec default_global_spec(bool standardize) {
  return {FeatureKind::global, global_feature_catalog(), standardize};
}

Matrix role_features(const Graph& g, const FeatureSpec& spec) {
  if (spec.kind != FeatureKind::role)
    throw std::invalid_argument("role_features needs a role FeatureSpec");
  if (spec.selected.empty())
    throw std::invalid_argument("FeatureSpec.selected is empty");

  const Index n = g.num_nodes();
  SimpleGraph s = simple_undirected(g);
  Vector deg = degrees_of(s);

  Vector tri;  // computed on demand, shared by three columns
  auto triangles = [&]() -> const Vector& {
    if (tri.size() == 0) tri = triangle_counts(s);
    return tri;
  };

  Matrix z(n, static_cast<Index>(spec.selected.size()));
  for (std::size_t c = 0; c < spec.selected.size(); ++c) {
    const std::string& name = spec.selected[c];
    Vector col;
    if (name == "in_degree") {
      col = Vector::Zero(n);
      const SpMat& a = g.adjacency();
      for (Index i = 0; i < n; ++i)
        for (SpMat::InnerIterator it(a, i); it; ++it) col[it.col()] += 1.0;
    } else if (name == "out_degree") {
      col = Vector::Zero(n);
      for (Index i = 0; i < n; ++i)
        col[i] = static_cast<double>(g.out_degree(i));
    } else if (name == "total_degree") {
      col = deg;
    } else if (name == "triangle_count") {
      col = triangles();
    } else if (name == "local_clustering_coefficient") {
      col = Vector::Zero(n);
      const Vector& t = triangles();
      for (Index i = 0; i < n; ++i)
        if (deg[i] >= 2.0) col[i] = 2.0 * t[i] / (deg[i] * (deg[i] - 1.0));
    } else if (name == "egonet_edge_count") {
      // spokes to the ego plus edges among neighbors (one per triangle at i)
      col = deg + triangles();
    } else if (name == "egonet_size") {
      col = deg.array() + 1.0;
    } else if (name == "average_neighbor_degree") {
      col = Vector::Zero(n);
      for (Index i = 0; i < n; ++i) {
        if (s.adj[i].empty()) continue;
        double acc = 0.0;
        for (Index j : s.adj[i]) acc += deg[j];
        col[i] = acc / deg[i];
      }
    } else if (name == "two_hop_neighborhood_size") {
      col = two_hop_sizes(s);
    } else if (name == "core_number") {
      col = core_numbers(s);
    } else {
      throw std::invalid_argument("unknown role feature '" + name + "'");
    }
    z.col(static_cast<Index>(c)) = col;
  }
  return spec.standardize ? standardize(z) : z;
}

Matrix global_features(const Graph& g, const FeatureSpec& spec,
                       FeatureReport* report) {
  if (spec.kind != FeatureKind::global)
    throw std::invalid_argument("global_features needs a global FeatureSpec");
  if (spec.selected.empty())
    throw std::invalid_argument("FeatureSpec.selected is empty");

  const Index n = g.num_nodes();
  SimpleGraph s = simple_undirected(g);

  Matrix z(n, static_cast<Index>(spec.selected.size()));
  for (std::size_t c = 0; c < spec.selected.size(); ++c) {
    const std::string& name = spec.selected[c];
    Vector col;
    if (name == "pagerank") {
      col = pagerank(g, 0.85, 1e-10, 200);
    } else if (name == "harmonic_closeness") {
      col = harmonic_closeness(s);
    } else if (name == "betweenness") {
      col = betweenness(s);
    } else if (name == "eigenvector_centrality") {
      col = eigenvector_centrality(s, report);
    } else if (name == "eccentricity") {
      col = eccentricities(s);
    } else if (name == "component_size") {
      col = component_sizes(s);
    } else {
      throw std::invalid_argument("unknown global feature '" + name + "'");
    }
    z.col(static_cast<Index>(c)) = col;
  }
  return spec.standardize ? standardize(z) : z;
}

Matrix standardize(const Matrix& z) {
  Matrix out(z.rows(), z.cols());
  const double n = static_cast<double>(z.rows());
  for (Index j = 0; j < z.cols(); ++j) {
    const auto col = z.col(j);
    if (col.maxCoeff() == col.minCoeff()) {
      out.col(j).setZero();
      continue;
    }
    const double mean = col.mean();
    const double var = (col.array() - mean).square().sum() / n;
    out.col(j) = (col.array() - mean) / std::sqrt(var);
  }
  return out;
}

}  // namespace sggnn
