#include "sggnn/models.hpp"

#include <stdexcept>
#include <string>

namespace sggnn {

namespace {

void check_layer_dims(const std::vector<Index>& dims, const char* who) {
  if (dims.size() < 2)
    throw std::invalid_argument(std::string(who) +
                                ": layer_dims needs input and output widths");
  for (Index d : dims)
    if (d < 1)
      throw std::invalid_argument(std::string(who) + ": layer width " +
                                  std::to_string(d) + " is not positive");
}

void check_dropout(double rate, const char* who) {
  if (rate < 0.0 || rate >= 1.0)
    throw std::invalid_argument(std::string(who) + ": dropout_rate " +
                                std::to_string(rate) + " outside [0, 1)");
}

Tensor dropout(Tape& tape, Tensor h, double rate, const ForwardOptions& opts) {
  if (!opts.training || rate == 0.0) return h;
  if (opts.rng == nullptr)
    throw std::invalid_argument("forward: training with dropout requires an rng");
  const Matrix& v = tape.value(h);
  std::bernoulli_distribution keep(1.0 - rate);
  const double scale = 1.0 / (1.0 - rate);
  Matrix mask(v.rows(), v.cols());
  for (Index j = 0; j < mask.cols(); ++j)
    for (Index i = 0; i < mask.rows(); ++i)
      mask(i, j) = keep(*opts.rng) ? scale : 0.0;
  return elementwise_scale(tape, h, mask);
}

const Graph& sym_operator(std::map<const Graph*, Graph>& cache, const Graph& g) {
  auto it = cache.find(&g);
  if (it == cache.end()) it = cache.emplace(&g, sym_normalized_adjacency(g)).first;
  return it->second;
}

Matrix softmax_rows_value(const Matrix& logits) {
  Matrix shifted = logits.colwise() - logits.rowwise().maxCoeff();
  Matrix e = shifted.array().exp().matrix();
  return (e.array().colwise() / e.rowwise().sum().array()).matrix();
}

}  // namespace

GcnModel::GcnModel(GcnConfig cfg, std::mt19937_64& rng) : cfg_(std::move(cfg)) {
  check_layer_dims(cfg_.layer_dims, "GcnModel");
  check_dropout(cfg_.dropout_rate, "GcnModel");
  for (std::size_t l = 0; l + 1 < cfg_.layer_dims.size(); ++l)
    weights_.push_back(glorot_init(cfg_.layer_dims[l], cfg_.layer_dims[l + 1], rng));
}

Tensor GcnModel::forward(Tape& tape, const std::vector<const Graph*>& graphs,
                         const Matrix& x, const ForwardOptions& opts) {
  if (graphs.size() != 1)
    throw std::invalid_argument("GcnModel::forward: expected 1 graph, got " +
                                std::to_string(graphs.size()));
  const Graph& op = sym_operator(operator_cache_, *graphs[0]);
  param_tensors_.clear();
  Tensor h = tape.input(x, false);
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Tensor w = tape.input(weights_[l], true);
    param_tensors_.push_back(w);
    h = sparse_matmul(tape, op, matmul(tape, h, w));
    if (l + 1 < weights_.size())
      h = dropout(tape, relu(tape, h), cfg_.dropout_rate, opts);
  }
  return h;
}

std::vector<ParamRef> GcnModel::parameters() {
  std::vector<ParamRef> out;
  for (Matrix& w : weights_) out.push_back({&w, true});
  return out;
}

FbGcnModel::FbGcnModel(FbGcnConfig cfg, std::mt19937_64& rng)
    : cfg_(std::move(cfg)) {
  check_layer_dims(cfg_.layer_dims, "FbGcnModel");
  check_dropout(cfg_.dropout_rate, "FbGcnModel");
  if (cfg_.filter_order < 1)
    throw std::invalid_argument("FbGcnModel: filter_order must be >= 1");
  for (std::size_t l = 0; l + 1 < cfg_.layer_dims.size(); ++l) {
    std::vector<Matrix> taps;
    for (Index r = 0; r < cfg_.filter_order; ++r)
      taps.push_back(glorot_init(cfg_.layer_dims[l], cfg_.layer_dims[l + 1], rng));
    weights_.push_back(std::move(taps));
  }
}

Tensor FbGcnModel::forward(Tape& tape, const std::vector<const Graph*>& graphs,
                           const Matrix& x, const ForwardOptions& opts) {
  if (graphs.size() != 1)
    throw std::invalid_argument("FbGcnModel::forward: expected 1 graph, got " +
                                std::to_string(graphs.size()));
  const Graph& op =
      cfg_.raw_adjacency ? *graphs[0] : sym_operator(operator_cache_, *graphs[0]);
  param_tensors_.clear();
  Tensor h = tape.input(x, false);
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Tensor p = h;
    Tensor acc{};
    for (Index r = 0; r < cfg_.filter_order; ++r) {
      if (r > 0) p = sparse_matmul(tape, op, p);
      Tensor w = tape.input(weights_[l][static_cast<std::size_t>(r)], true);
      param_tensors_.push_back(w);
      Tensor term = matmul(tape, p, w);
      acc = r == 0 ? term : add(tape, acc, term);
    }
    h = acc;
    if (l + 1 < weights_.size())
      h = dropout(tape, relu(tape, h), cfg_.dropout_rate, opts);
  }
  return h;
}

std::vector<ParamRef> FbGcnModel::parameters() {
  std::vector<ParamRef> out;
  for (auto& taps : weights_)
    for (Matrix& w : taps) out.push_back({&w, true});
  return out;
}

SgGnnModel::SgGnnModel(SgGnnConfig cfg, Index num_nodes, std::mt19937_64& rng)
    : cfg_(std::move(cfg)) {
  if (cfg_.branch_configs.empty())
    throw std::invalid_argument("SgGnnModel: at least one branch required");
  check_dropout(cfg_.dropout_rate, "SgGnnModel");
  if (cfg_.mlp_dims.empty())
    throw std::invalid_argument("SgGnnModel: mlp_dims must end at the class count");
  for (const BranchConfig& bc : cfg_.branch_configs) {
    check_layer_dims(bc.layer_dims, "SgGnnModel branch");
    if (bc.layer_dims.back() != cfg_.embedding_dim)
      throw std::invalid_argument(
          "SgGnnModel: branch output width " +
          std::to_string(bc.layer_dims.back()) + " != embedding_dim " +
          std::to_string(cfg_.embedding_dim));
    if (bc.family == BranchFamily::fbgcn && bc.filter_order < 1)
      throw std::invalid_argument("SgGnnModel: branch filter_order must be >= 1");
  }

  const auto num_branches = static_cast<Index>(cfg_.branch_configs.size());
  for (const BranchConfig& bc : cfg_.branch_configs) {
    Branch branch;
    branch.cfg = bc;
    Index taps = bc.family == BranchFamily::gcn ? 1 : bc.filter_order;
    for (std::size_t l = 0; l + 1 < bc.layer_dims.size(); ++l) {
      std::vector<Matrix> layer;
      for (Index r = 0; r < taps; ++r)
        layer.push_back(glorot_init(bc.layer_dims[l], bc.layer_dims[l + 1], rng));
      branch.weights_.push_back(std::move(layer));
    }
    branches_.push_back(std::move(branch));
  }

  if (cfg_.alpha_mode == AlphaMode::per_node) {
    if (num_nodes < 1)
      throw std::invalid_argument("SgGnnModel: per-node mixing needs num_nodes");
    alpha_logits_ = Matrix::Zero(num_nodes, num_branches);
  } else {
    alpha_logits_ = Matrix::Zero(1, num_branches);
  }

  Index in = cfg_.embedding_dim * num_branches;
  for (Index width : cfg_.mlp_dims) {
    if (width < 1)
      throw std::invalid_argument("SgGnnModel: mlp width must be positive");
    mlp_weights_.push_back(glorot_init(in, width, rng));
    mlp_biases_.push_back(Matrix::Zero(1, width));
    in = width;
  }
}

Tensor SgGnnModel::branch_forward(Tape& tape, Branch& branch, const Graph& g,
                                  Tensor x, const ForwardOptions& opts) {
  const Graph& op =
      branch.cfg.family == BranchFamily::fbgcn && branch.cfg.raw_adjacency
          ? g
          : sym_operator(operator_cache_, g);
  Tensor h = x;
  for (auto& layer : branch.weights_) {
    if (branch.cfg.family == BranchFamily::gcn) {
      Tensor w = tape.input(layer[0], true);
      param_tensors_.push_back(w);
      h = sparse_matmul(tape, op, matmul(tape, h, w));
    } else {
      Tensor p = h;
      Tensor acc{};
      for (std::size_t r = 0; r < layer.size(); ++r) {
        if (r > 0) p = sparse_matmul(tape, op, p);
        Tensor w = tape.input(layer[r], true);
        param_tensors_.push_back(w);
        Tensor term = matmul(tape, p, w);
        acc = r == 0 ? term : add(tape, acc, term);
      }
      h = acc;
    }
    // branches end in an embedding, so every layer is activated
    h = dropout(tape, relu(tape, h), cfg_.dropout_rate, opts);
  }
  return h;
}

Tensor SgGnnModel::forward(Tape& tape, const std::vector<const Graph*>& graphs,
                           const Matrix& x, const ForwardOptions& opts) {
  if (graphs.size() != branches_.size())
    throw std::invalid_argument(
        "SgGnnModel::forward: expected " + std::to_string(branches_.size()) +
        " graphs, got " + std::to_string(graphs.size()));
  if (cfg_.alpha_mode == AlphaMode::per_node && alpha_logits_.rows() != x.rows())
    throw std::invalid_argument(
        "SgGnnModel::forward: model was built for " +
        std::to_string(alpha_logits_.rows()) + " nodes, input has " +
        std::to_string(x.rows()));

  param_tensors_.clear();
  Tensor x0 = tape.input(x, false);
  std::vector<Tensor> embeddings;
  for (std::size_t i = 0; i < branches_.size(); ++i)
    embeddings.push_back(branch_forward(tape, branches_[i], *graphs[i], x0, opts));

  Tensor logits_param = tape.input(alpha_logits_, true);
  param_tensors_.push_back(logits_param);

  std::vector<Tensor> parts;
  if (cfg_.alpha_mode == AlphaMode::global) {
    Tensor alpha = softmax_vector(tape, logits_param);
    for (std::size_t i = 0; i < embeddings.size(); ++i)
      parts.push_back(
          scale_by_entry(tape, embeddings[i], alpha, static_cast<Index>(i)));
  } else {
    Tensor alpha = softmax_rows(tape, logits_param);
    for (std::size_t i = 0; i < embeddings.size(); ++i)
      parts.push_back(scale_rows(tape, embeddings[i],
                                 column(tape, alpha, static_cast<Index>(i))));
  }

  Tensor h = concat_cols(tape, parts);
  for (std::size_t j = 0; j < mlp_weights_.size(); ++j) {
    Tensor w = tape.input(mlp_weights_[j], true);
    Tensor b = tape.input(mlp_biases_[j], true);
    param_tensors_.push_back(w);
    param_tensors_.push_back(b);
    h = add_rowvec(tape, matmul(tape, h, w), b);
    if (j + 1 < mlp_weights_.size())
      h = dropout(tape, relu(tape, h), cfg_.dropout_rate, opts);
  }
  return h;
}

std::vector<ParamRef> SgGnnModel::parameters() {
  std::vector<ParamRef> out;
  for (Branch& branch : branches_)
    for (auto& layer : branch.weights_)
      for (Matrix& w : layer) out.push_back({&w, true});
  out.push_back({&alpha_logits_, false});
  for (std::size_t j = 0; j < mlp_weights_.size(); ++j) {
    out.push_back({&mlp_weights_[j], true});
    out.push_back({&mlp_biases_[j], false});
  }
  return out;
}

AlphaReport extract_alphas(const Model& model) {
  const auto* m = dynamic_cast<const SgGnnModel*>(&model);
  if (m == nullptr)
    throw std::invalid_argument("extract_alphas: model has no mixture coefficients");
  AlphaReport report;
  Matrix soft = softmax_rows_value(m->alpha_logits());
  if (m->alpha_mode() == AlphaMode::global) {
    report.graph_weights = soft.row(0).transpose();
  } else {
    report.per_node = soft;
    report.graph_weights = soft.colwise().mean().transpose();
  }
  return report;
}

}  // namespace sggnn
