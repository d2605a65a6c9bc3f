#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sggnn/homophily.hpp"
#include "sggnn/trainer.hpp"
#include "sggnn/types.hpp"

namespace sggnn {

struct KnnSettings {
  // Neighbor counts used by the run and coefs commands; the metrics and
  // histogram commands always use k = 3.
  std::vector<Index> k_values{3, 7};
  bool symmetrize = true;
};

struct ModelSettings {
  Index hidden_dim = 16;
  Index embedding_dim = 16;
  Index mlp_hidden = 32;
  Index filter_order = 3;
  double dropout = 0.5;
};

/// Everything a command needs beyond its output directory. Loaded from a
/// single JSON file; every field has a default, unknown keys are rejected.
struct HarnessConfig {
  // Resolved against the config file's directory when relative.
  std::filesystem::path data_dir = "data";
  std::vector<std::string> datasets{"texas",     "wisconsin", "cornell",
                                    "actor",     "chameleon", "squirrel"};
  // Structural feature selections; empty means the full catalog.
  std::vector<std::string> role_features;
  std::vector<std::string> global_features;
  KnnSettings knn;
  TvConvention tv_convention = TvConvention::row_normalized;
  ModelSettings model;
  TrainConfig train;
  Index histogram_bins = 10;
  // Master seed; every per-cell seed derives from it.
  std::uint64_t seed = 0;

  // FNV-1a hash of the raw config file bytes, recorded in run metadata.
  std::uint64_t config_hash = 0;
};

HarnessConfig load_config(const std::filesystem::path& json_path);

/// Each command reads datasets under cfg.data_dir, writes its CSV artifacts
/// plus a metadata.json under out_dir, and returns a description of every
/// cell that failed (empty means complete success). Outputs are a pure
/// function of (config, dataset files, seed): reruns are bit-identical.
///
/// metrics:        metrics.csv with total variation and edge homophily of
///                 the original graph and the three k=3 KNN graphs per
///                 dataset, plus knn-{source}-3.tsv edge-file exports.
/// homophily_hist: hist_<dataset>.csv node-homophily histograms comparing
///                 the original graph with KNN-Global-3.
/// run:            results.csv with per-split test accuracies for GCN and
///                 FB-GCN on each graph, and SG-GNN / SG-GNN-Node across all
///                 graphs per dataset.
/// coefs:          coefs_gcn.csv and coefs_fbgcn.csv, the split-averaged
///                 mixture weights of SG-GNN over the graph set, one file
///                 per branch family.
std::vector<std::string> cmd_metrics(const HarnessConfig& cfg,
                                     const std::filesystem::path& out_dir);
std::vector<std::string> cmd_homophily_hist(
    const HarnessConfig& cfg, const std::filesystem::path& out_dir);
std::vector<std::string> cmd_run(const HarnessConfig& cfg,
                                 const std::filesystem::path& out_dir);
std::vector<std::string> cmd_coefs(const HarnessConfig& cfg,
                                   const std::filesystem::path& out_dir);

}  // namespace sggnn
