#pragma once

#include <vector>

#include "sggnn/dataset.hpp"
#include "sggnn/graph.hpp"
#include "sggnn/types.hpp"

namespace sggnn {

// Adjacency normalization used when measuring label smoothness.
enum class TvConvention { raw, row_normalized, sym_normalized };

// Label total variation ||y - Ay||_1 / N with y the integer class indices as
// reals and A the adjacency under the chosen convention.
double total_variation(const LabelVector& y, const Graph& g,
                       TvConvention convention = TvConvention::row_normalized);

// Fraction of stored edges whose endpoints share a label. Self-loops are
// excluded on both sides of the ratio; throws if no countable edge remains.
double edge_homophily(const Graph& g, const LabelVector& y);

// Per-node fraction of out-neighbors sharing the node's label, self-loops
// excluded. Nodes with no remaining neighbors get NaN.
Vector node_homophily(const Graph& g, const LabelVector& y);

// Equal-width bin counts over [0,1] with a right-closed last bin. NaN entries
// are dropped.
std::vector<Index> homophily_histogram(const Vector& values, Index bins);

// Mean of the non-NaN entries; NaN if none are defined.
double mean_defined(const Vector& values);

}  // namespace sggnn
