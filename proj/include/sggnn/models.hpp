#pragma once

#include <map>
#include <memory>
#include <vector>

#include "sggnn/autodiff.hpp"
#include "sggnn/graph.hpp"
#include "sggnn/types.hpp"

namespace sggnn {

struct GcnConfig {
  // Feature widths from input to output, at least two entries.
  std::vector<Index> layer_dims;
  double dropout_rate = 0.5;
};

struct FbGcnConfig {
  std::vector<Index> layer_dims;
  // Number of filter taps R; each layer sums A^r X Theta_r for r < R.
  Index filter_order = 3;
  double dropout_rate = 0.5;
  // Propagate with the raw adjacency instead of the symmetric-normalized
  // operator. Raw powers can overflow for larger R; off by default.
  bool raw_adjacency = false;
};

enum class BranchFamily { gcn, fbgcn };
enum class AlphaMode { global, per_node };

struct BranchConfig {
  BranchFamily family = BranchFamily::gcn;
  std::vector<Index> layer_dims;
  Index filter_order = 3;
  bool raw_adjacency = false;
};

struct SgGnnConfig {
  // One branch per input graph; every branch must end at embedding_dim.
  std::vector<BranchConfig> branch_configs;
  Index embedding_dim = 32;
  // Head widths after the concatenated input, ending at the class count.
  std::vector<Index> mlp_dims;
  double dropout_rate = 0.5;
  AlphaMode alpha_mode = AlphaMode::global;
};

struct ForwardOptions {
  bool training = false;
  // Required when training with a nonzero dropout rate.
  std::mt19937_64* rng = nullptr;
};

struct ParamRef {
  Matrix* value;
  // Whether the trainer applies L2 weight decay to this parameter. Mixture
  // logits and biases are exempt.
  bool weight_decay;
};

/// A trainable architecture. forward() registers the current parameters on
/// the tape; their tensor handles, aligned with parameters(), stay available
/// through param_tensors() until the next forward. Models derive their
/// propagation operators from the base graphs they are given and cache them
/// by graph address, so callers must keep graphs alive and in place across
/// calls. Instances are single-threaded.
class Model {
 public:
  virtual ~Model() = default;

  virtual Tensor forward(Tape& tape, const std::vector<const Graph*>& graphs,
                         const Matrix& x, const ForwardOptions& opts) = 0;
  virtual std::vector<ParamRef> parameters() = 0;
  // How many graphs forward() expects.
  virtual Index num_graphs() const = 0;

  const std::vector<Tensor>& param_tensors() const { return param_tensors_; }

 protected:
  std::vector<Tensor> param_tensors_;
};

/// Stack of graph convolutions X <- relu(op X Theta) with the
/// symmetric-normalized operator, no biases, raw logits from the last layer.
class GcnModel : public Model {
 public:
  GcnModel(GcnConfig cfg, std::mt19937_64& rng);

  Tensor forward(Tape& tape, const std::vector<const Graph*>& graphs,
                 const Matrix& x, const ForwardOptions& opts) override;
  std::vector<ParamRef> parameters() override;
  Index num_graphs() const override { return 1; }

 private:
  GcnConfig cfg_;
  std::vector<Matrix> weights_;
  std::map<const Graph*, Graph> operator_cache_;
};

/// Filter-bank convolutions: each layer computes
/// relu(sum_r A^r X Theta_r), with A^0 X = X so filter_order 1 ignores the
/// graph entirely.
class FbGcnModel : public Model {
 public:
  FbGcnModel(FbGcnConfig cfg, std::mt19937_64& rng);

  Tensor forward(Tape& tape, const std::vector<const Graph*>& graphs,
                 const Matrix& x, const ForwardOptions& opts) override;
  std::vector<ParamRef> parameters() override;
  Index num_graphs() const override { return 1; }

 private:
  FbGcnConfig cfg_;
  // weights_[layer][tap]
  std::vector<std::vector<Matrix>> weights_;
  std::map<const Graph*, Graph> operator_cache_;
};

/// Multi-graph model: one GNN branch per graph produces an embedding Z_i,
/// softmaxed mixture weights scale each branch (a single global weight per
/// graph, or one weight per node and graph), the scaled embeddings are
/// concatenated and classified by an MLP head. Parameter order: branch
/// weights in graph order, then the mixture logits, then the head's
/// weight/bias pairs.
class SgGnnModel : public Model {
 public:
  // num_nodes sizes the per-node logit matrix; unused in global mode.
  SgGnnModel(SgGnnConfig cfg, Index num_nodes, std::mt19937_64& rng);

  Tensor forward(Tape& tape, const std::vector<const Graph*>& graphs,
                 const Matrix& x, const ForwardOptions& opts) override;
  std::vector<ParamRef> parameters() override;
  Index num_graphs() const override {
    return static_cast<Index>(branches_.size());
  }

  AlphaMode alpha_mode() const { return cfg_.alpha_mode; }
  const Matrix& alpha_logits() const { return alpha_logits_; }

 private:
  struct Branch {
    BranchConfig cfg;
    std::vector<std::vector<Matrix>> weights_;  // [layer][tap]; GCN has 1 tap
  };

  Tensor branch_forward(Tape& tape, Branch& branch, const Graph& g,
                        Tensor x, const ForwardOptions& opts);

  SgGnnConfig cfg_;
  std::vector<Branch> branches_;
  // 1 x I (global) or N x I (per-node), zero-initialized.
  Matrix alpha_logits_;
  std::vector<Matrix> mlp_weights_;
  std::vector<Matrix> mlp_biases_;
  std::map<const Graph*, Graph> operator_cache_;
};

struct AlphaReport {
  // Per-graph weights: the softmaxed logits in global mode, column means of
  // the row-softmaxed matrix in per-node mode.
  Vector graph_weights;
  // Row-softmaxed N x I matrix; empty in global mode.
  Matrix per_node;
};

// Softmaxed mixture coefficients of an SgGnnModel, in input-graph order.
// Throws when the model has no mixture.
AlphaReport extract_alphas(const Model& model);

}  // namespace sggnn
