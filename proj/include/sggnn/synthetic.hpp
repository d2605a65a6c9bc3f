#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "sggnn/dataset.hpp"
#include "sggnn/graph.hpp"
#include "sggnn/types.hpp"

namespace sggnn {

/// Hub-weighted random graph with an exact edge count and an exact number of
/// same-label edges, plus Gaussian class-cluster features. Node sampling is
/// biased toward a few heavy nodes, giving the skewed degree profile of
/// citation and web graphs.
struct HubQuotaParams {
  std::vector<Index> class_sizes;
  Index num_edges = 0;
  // Target fraction of same-label edges; hit exactly up to rounding.
  double edge_homophily = 0.1;
  Index feature_dim = 64;
  // Distance between class feature centers relative to per-node noise.
  double center_scale = 1.0;
  double noise_scale = 0.55;
  // Node sampling weight (rank+1)^-hub_exponent; 0 gives uniform sampling.
  double hub_exponent = 0.8;
};

/// Heavy-tailed random graph whose labels are degree quantiles. Edges start
/// from weighted endpoint sampling, then degree-preserving edge swaps move
/// the same-label edge count to the target exactly, so labels stay perfectly
/// aligned with structural role while edge homophily is pinned.
struct DegreeQuantileParams {
  Index num_nodes = 0;
  int num_classes = 5;
  Index num_edges = 0;
  double edge_homophily = 0.2;
  Index feature_dim = 64;
  double center_scale = 1.0;
  double noise_scale = 0.55;
  // Endpoint weight (rank+1)^-weight_exponent controls degree tail heaviness.
  double weight_exponent = 0.75;
};

Dataset generate_hub_quota(const std::string& name, const HubQuotaParams& p,
                           std::uint64_t seed);
Dataset generate_degree_quantile(const std::string& name,
                                 const DegreeQuantileParams& p,
                                 std::uint64_t seed);

/// Two equal blocks; within-block edges appear with p_in, cross-block with
/// p_out. Labels are the block ids.
struct SbmResult {
  Graph graph;
  LabelVector labels;
};
SbmResult sbm_two_block(Index n, double p_in, double p_out,
                        std::mt19937_64& rng);

Graph erdos_renyi(Index n, double p, std::mt19937_64& rng);

/// One calibrated benchmark instance: its generator parameters plus the
/// summary statistics the generator pins.
struct BenchmarkSpec {
  std::string name;
  Index num_nodes;
  double edge_homophily;
  bool degree_quantile_family;
  HubQuotaParams hub;
  DegreeQuantileParams quantile;
};

/// The six benchmark instances, each pinned to a fixed node count and edge
/// homophily.
const std::vector<BenchmarkSpec>& benchmark_suite();

/// Generates one suite entry by name (seed offsets keep instances distinct).
Dataset generate_benchmark(const std::string& name, std::uint64_t seed);

/// Writes edges.tsv, features.csv, and labels.csv under dir/<name>/.
void write_dataset(const Dataset& d, const std::filesystem::path& dir);

}  // namespace sggnn
