#include "sggnn/homophily.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sggnn {

double total_variation(const LabelVector& y, const Graph& g,
                       TvConvention convention) {
  if (y.labels.size() != g.num_nodes())
    throw std::invalid_argument("total_variation: label count " +
                                std::to_string(y.labels.size()) +
                                " does not match node count " +
                                std::to_string(g.num_nodes()));
  Vector yr = y.labels.cast<double>();
  Vector smoothed;
  switch (convention) {
    case TvConvention::raw:
      smoothed = g.adjacency() * yr;
      break;
    case TvConvention::row_normalized:
      smoothed = row_normalized_adjacency(g).adjacency() * yr;
      break;
    case TvConvention::sym_normalized:
      smoothed = sym_normalized_adjacency(g).adjacency() * yr;
      break;
  }
  return (yr - smoothed).lpNorm<1>() / static_cast<double>(g.num_nodes());
}

double edge_homophily(const Graph& g, const LabelVector& y) {
  if (y.labels.size() != g.num_nodes())
    throw std::invalid_argument("edge_homophily: label count does not match node count");
  Index total = 0;
  Index same = 0;
  for (Index i = 0; i < g.num_nodes(); ++i) {
    for (auto j : g.neighbors(i)) {
      if (j == i) continue;
      ++total;
      if (y.labels[i] == y.labels[j]) ++same;
    }
  }
  if (total == 0)
    throw std::invalid_argument("edge_homophily: graph has no non-loop edges");
  return static_cast<double>(same) / static_cast<double>(total);
}

Vector node_homophily(const Graph& g, const LabelVector& y) {
  if (y.labels.size() != g.num_nodes())
    throw std::invalid_argument("node_homophily: label count does not match node count");
  Vector h(g.num_nodes());
  for (Index i = 0; i < g.num_nodes(); ++i) {
    Index total = 0;
    Index same = 0;
    for (auto j : g.neighbors(i)) {
      if (j == i) continue;
      ++total;
      if (y.labels[i] == y.labels[j]) ++same;
    }
    h[i] = total == 0 ? std::numeric_limits<double>::quiet_NaN()
                      : static_cast<double>(same) / static_cast<double>(total);
  }
  return h;
}

std::vector<Index> homophily_histogram(const Vector& values, Index bins) {
  if (bins < 1)
    throw std::invalid_argument("homophily_histogram: bins must be >= 1");
  std::vector<Index> counts(static_cast<std::size_t>(bins), 0);
  for (Index i = 0; i < values.size(); ++i) {
    double v = values[i];
    if (std::isnan(v)) continue;
    auto bin = static_cast<Index>(std::floor(v * static_cast<double>(bins)));
    bin = std::min(std::max(bin, Index{0}), bins - 1);
    ++counts[static_cast<std::size_t>(bin)];
  }
  return counts;
}

double mean_defined(const Vector& values) {
  double sum = 0.0;
  Index count = 0;
  for (Index i = 0; i < values.size(); ++i) {
    if (std::isnan(values[i])) continue;
    sum += values[i];
    ++count;
  }
  return count == 0 ? std::numeric_limits<double>::quiet_NaN()
                    : sum / static_cast<double>(count);
}

}  // namespace sggnn
