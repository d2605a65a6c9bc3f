#pragma once

#include <functional>
#include <vector>

#include "sggnn/dataset.hpp"
#include "sggnn/models.hpp"
#include "sggnn/types.hpp"

namespace sggnn {

struct TrainConfig {
  double learning_rate = 0.01;
  // L2 coefficient added to the gradients of decaying parameters.
  double weight_decay = 5e-4;
  Index max_epochs = 500;
  // Epochs to continue past the best validation accuracy; 0 trains for
  // exactly one epoch.
  Index patience = 100;
  double train_fraction = 0.48;
  double val_fraction = 0.32;
  double test_fraction = 0.20;
  Index num_splits = 10;
  std::uint64_t seed = 0;
};

// Outcome of training on one split.
struct RunResult {
  double test_accuracy = 0.0;
  Index best_epoch = 0;
  double best_val_accuracy = 0.0;
  // Mixture weights of the restored model; empty for single-graph models.
  Vector alphas;
  std::vector<double> loss_curve;
  std::vector<double> val_curve;
};

// Stratified random split: per class, floor(fraction * class size) nodes go
// to train and validation, the remainder to test. Deterministic per
// (cfg.seed, split_index). Throws when a class is too small to appear in
// train or when split_index >= cfg.num_splits.
SplitMask make_splits(const LabelVector& y, const TrainConfig& cfg,
                      Index split_index);

// Accuracy of argmax predictions over mask-selected nodes, ties toward the
// smaller class index. Runs the model in eval mode; throws on an empty mask.
double evaluate(Model& model, const std::vector<const Graph*>& graphs,
                const Matrix& x, const LabelVector& y, const BoolArray& mask);

// Called after each optimizer step with the epoch index and the live model.
using EpochObserver = std::function<void(Index, Model&)>;

// Adam minimization of masked cross-entropy on the train mask with epoch-wise
// validation tracking. Restores the parameters of the best-validation epoch
// (earliest on ties) before computing test accuracy. An empty validation mask
// scores 0 every epoch, so the first epoch's parameters are kept. Throws on a
// non-finite loss.
RunResult train(Model& model, const std::vector<const Graph*>& graphs,
                const Matrix& x, const LabelVector& y, const SplitMask& masks,
                const TrainConfig& cfg, const EpochObserver& observer = {});

}  // namespace sggnn
