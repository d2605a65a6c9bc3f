#include "sggnn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sggnn {

namespace {

void check_config(const TrainConfig& cfg) {
  if (cfg.learning_rate <= 0.0)
    throw std::invalid_argument("TrainConfig: learning_rate must be positive");
  if (cfg.weight_decay < 0.0)
    throw std::invalid_argument("TrainConfig: weight_decay must be >= 0");
  if (cfg.max_epochs < 1)
    throw std::invalid_argument("TrainConfig: max_epochs must be >= 1");
  if (cfg.patience < 0 || cfg.patience > cfg.max_epochs)
    throw std::invalid_argument("TrainConfig: patience must lie in [0, max_epochs]");
  if (cfg.train_fraction <= 0.0 || cfg.val_fraction <= 0.0 ||
      cfg.test_fraction <= 0.0)
    throw std::invalid_argument("TrainConfig: split fractions must be positive");
  if (cfg.train_fraction + cfg.val_fraction + cfg.test_fraction > 1.0 + 1e-12)
    throw std::invalid_argument("TrainConfig: split fractions sum above 1");
  if (cfg.num_splits < 1)
    throw std::invalid_argument("TrainConfig: num_splits must be >= 1");
}

std::mt19937_64 seeded_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

SplitMask make_splits(const LabelVector& y, const TrainConfig& cfg,
                      Index split_index) {
  check_config(cfg);
  if (split_index < 0 || split_index >= cfg.num_splits)
    throw std::invalid_argument("make_splits: split_index " +
                                std::to_string(split_index) +
                                " outside [0, num_splits)");
  const Index n = y.labels.size();
  SplitMask masks;
  masks.train = BoolArray::Constant(n, false);
  masks.val = BoolArray::Constant(n, false);
  masks.test = BoolArray::Constant(n, false);

  auto rng = seeded_rng(cfg.seed, static_cast<std::uint64_t>(split_index));
  for (int c = 0; c < y.num_classes; ++c) {
    std::vector<Index> members;
    for (Index i = 0; i < n; ++i)
      if (y.labels[i] == c) members.push_back(i);
    const auto size = static_cast<double>(members.size());
    const auto n_train = static_cast<Index>(std::floor(cfg.train_fraction * size));
    const auto n_val = static_cast<Index>(std::floor(cfg.val_fraction * size));
    if (n_train < 1)
      throw std::invalid_argument(
          "make_splits: class " + std::to_string(c) + " has only " +
          std::to_string(members.size()) + " nodes, too few to appear in train");
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t r = 0; r < members.size(); ++r) {
      const auto rank = static_cast<Index>(r);
      if (rank < n_train)
        masks.train[members[r]] = true;
      else if (rank < n_train + n_val)
        masks.val[members[r]] = true;
      else
        masks.test[members[r]] = true;
    }
  }
  return masks;
}

double evaluate(Model& model, const std::vector<const Graph*>& graphs,
                const Matrix& x, const LabelVector& y, const BoolArray& mask) {
  if (mask.count() == 0)
    throw std::invalid_argument("evaluate: empty mask");
  Tape tape;
  Matrix logits = tape.value(model.forward(tape, graphs, x, {}));
  Index correct = 0;
  for (Index i = 0; i < logits.rows(); ++i) {
    if (!mask[i]) continue;
    Index best = 0;
    for (Index c = 1; c < logits.cols(); ++c)
      if (logits(i, c) > logits(i, best)) best = c;
    if (best == y.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(mask.count());
}

RunResult train(Model& model, const std::vector<const Graph*>& graphs,
                const Matrix& x, const LabelVector& y, const SplitMask& masks,
                const TrainConfig& cfg, const EpochObserver& observer) {
  check_config(cfg);
  auto dropout_rng = seeded_rng(cfg.seed, 0x64726f70ULL);

  std::vector<ParamRef> params = model.parameters();
  std::vector<AdamState> states(params.size());
  std::vector<Matrix> best_params;
  RunResult result;
  double best_val = -1.0;
  Index since_best = 0;

  for (Index epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    Tape tape;
    ForwardOptions opts{true, &dropout_rng};
    Tensor loss =
        masked_cross_entropy(tape, model.forward(tape, graphs, x, opts), y,
                             masks.train);
    const double loss_value = tape.value(loss)(0, 0);
    if (!std::isfinite(loss_value))
      throw std::runtime_error("train: loss became " +
                               std::to_string(loss_value) + " at epoch " +
                               std::to_string(epoch) +
                               "; lower the learning rate");
    result.loss_curve.push_back(loss_value);
    tape.backward(loss);

    for (std::size_t p = 0; p < params.size(); ++p) {
      Matrix grad = tape.grad(model.param_tensors()[p]);
      if (params[p].weight_decay) grad += cfg.weight_decay * *params[p].value;
      adam_step(*params[p].value, grad, states[p], cfg.learning_rate);
    }
    if (observer) observer(epoch, model);

    const double val_acc =
        masks.val.count() == 0 ? 0.0 : evaluate(model, graphs, x, y, masks.val);
    result.val_curve.push_back(val_acc);
    if (val_acc > best_val) {
      best_val = val_acc;
      result.best_epoch = epoch;
      since_best = 0;
      best_params.clear();
      for (const ParamRef& p : params) best_params.push_back(*p.value);
    } else {
      ++since_best;
    }
    if (since_best >= cfg.patience) break;
  }

  for (std::size_t p = 0; p < params.size(); ++p)
    *params[p].value = best_params[p];
  result.best_val_accuracy = best_val;
  result.test_accuracy = evaluate(model, graphs, x, y, masks.test);
  if (dynamic_cast<const SgGnnModel*>(&model) != nullptr)
    result.alphas = extract_alphas(model).graph_weights;
  return result;
}

}  // namespace sggnn
