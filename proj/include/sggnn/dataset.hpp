#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sggnn/graph.hpp"
#include "sggnn/types.hpp"

namespace sggnn {

/// Per-node class indices in [0, num_classes).
struct LabelVector {
  IntVector labels;
  int num_classes = 0;

  Index size() const { return labels.size(); }
};

/// Disjoint train/val/test node masks; train is never empty.
struct SplitMask {
  BoolArray train;
  BoolArray val;
  BoolArray test;
};

struct Dataset {
  Graph graph;
  Matrix features;  // N x F, finite entries
  LabelVector labels;
  std::string name;
};

/// Reads the three on-disk files of a dataset:
///   edges:    one `src<TAB>dst[<TAB>weight]` per line, `#` comments ignored
///   features: headerless CSV, one all-numeric row per node in id order
///   labels:   CSV `node_id,label` (header row optional), labels 0..C-1
/// The node count comes from the feature file; the other two must agree.
/// Malformed or inconsistent input throws with file and line number.
/// Duplicate edges collapse to the first occurrence with a warning on stderr;
/// self-loops are kept as given. The loaded graph is directed.
Dataset load_dataset(const std::filesystem::path& edge_file,
                     const std::filesystem::path& feature_file,
                     const std::filesystem::path& label_file,
                     const std::string& name = "");

/// Writes a graph in the edge-file format accepted by load_dataset.
void write_edge_file(const std::filesystem::path& path, const Graph& g);

/// Writes a feature matrix as CSV with one named column per feature.
void write_features_csv(const std::filesystem::path& path, const Matrix& z,
                        const std::vector<std::string>& column_names);

/// Writes a headerless feature matrix in the format load_dataset accepts.
void write_feature_matrix(const std::filesystem::path& path, const Matrix& z);

/// Writes labels as `node_id,label` with a header row.
void write_labels_csv(const std::filesystem::path& path, const LabelVector& y);

}  // namespace sggnn
