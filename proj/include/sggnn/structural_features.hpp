#pragma once

#include <string>
#include <vector>

#include "sggnn/graph.hpp"
#include "sggnn/types.hpp"

namespace sggnn {

enum class FeatureKind { role, global };

/// Selects which structural feature columns to compute. Names must come from
/// role_feature_catalog() / global_feature_catalog(). When standardize is set
/// the returned matrix has zero-mean, unit-variance columns.
struct FeatureSpec {
  FeatureKind kind = FeatureKind::role;
  std::vector<std::string> selected;
  bool standardize = true;
};

FeatureSpec default_role_spec(bool standardize = true);
FeatureSpec default_global_spec(bool standardize = true);

const std::vector<std::string>& role_feature_catalog();
const std::vector<std::string>& global_feature_catalog();

/// Filled in by global_features for anything worth surfacing in run metadata.
struct FeatureReport {
  bool eigenvector_converged = true;
  int eigenvector_iterations = 0;
};

/// Local connectivity descriptors, one column per selected name:
///   in_degree, out_degree, total_degree, triangle_count,
///   local_clustering_coefficient, egonet_edge_count, egonet_size,
///   average_neighbor_degree, two_hop_neighborhood_size, core_number
/// in_degree/out_degree read the directed graph as stored; everything else is
/// computed on the undirected simple graph (symmetrized, self-loops dropped,
/// weights ignored). Deterministic.
Matrix role_features(const Graph& g, const FeatureSpec& spec);

/// Whole-graph positional descriptors, one column per selected name:
///   pagerank, harmonic_closeness, betweenness, eigenvector_centrality,
///   eccentricity, component_size
/// pagerank runs on the symmetrized weighted graph; the rest use the
/// undirected simple graph. Betweenness is exact (Brandes), unnormalized,
/// with each unordered pair counted once. Eigenvector centrality uses power
/// iteration; if it fails to converge the column falls back to degree and the
/// report is flagged. Eccentricity is per connected component.
Matrix global_features(const Graph& g, const FeatureSpec& spec,
                       FeatureReport* report = nullptr);

/// Shifts each column to mean 0 and scales to (population) standard
/// deviation 1. Constant columns become all-zero.
Matrix standardize(const Matrix& z);

}  // namespace sggnn
