#pragma once

#include <functional>
#include <random>
#include <vector>

#include "sggnn/dataset.hpp"
#include "sggnn/graph.hpp"
#include "sggnn/types.hpp"

namespace sggnn {

// Handle to a value recorded on a Tape.
struct Tensor {
  int id = -1;
};

/// Reverse-mode differentiation tape over dense matrices. Operations append
/// nodes in topological order; backward() replays pullbacks in reverse.
/// A tape is built fresh per forward pass and is single-threaded.
class Tape {
 public:
  // Registers a leaf value. Gradients are tracked only when requires_grad.
  Tensor input(Matrix value, bool requires_grad);

  const Matrix& value(Tensor t) const { return node(t).value; }
  // Gradient of the last backward() target w.r.t. t; zero matrix when t was
  // unused, throws when t does not track gradients.
  const Matrix& grad(Tensor t) const;

  // Accumulates gradients for every requires_grad tensor reachable from
  // loss, which must be 1x1.
  void backward(Tensor loss);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    std::function<void(Tape&)> pullback;
  };

  Node& node(Tensor t);
  const Node& node(Tensor t) const;
  Tensor emplace(Matrix value, bool requires_grad,
                 std::function<void(Tape&)> pullback);
  void add_grad(Tensor t, const Matrix& g);

  std::vector<Node> nodes_;

  friend Tensor matmul(Tape&, Tensor, Tensor);
  friend Tensor sparse_matmul(Tape&, const Graph&, Tensor);
  friend Tensor add(Tape&, Tensor, Tensor);
  friend Tensor add_rowvec(Tape&, Tensor, Tensor);
  friend Tensor relu(Tape&, Tensor);
  friend Tensor concat_cols(Tape&, const std::vector<Tensor>&);
  friend Tensor scale_rows(Tape&, Tensor, Tensor);
  friend Tensor scale_by_entry(Tape&, Tensor, Tensor, Index);
  friend Tensor column(Tape&, Tensor, Index);
  friend Tensor elementwise_scale(Tape&, Tensor, const Matrix&);
  friend Tensor softmax_vector(Tape&, Tensor);
  friend Tensor softmax_rows(Tape&, Tensor);
  friend Tensor sum_squares(Tape&, Tensor);
  friend Tensor masked_cross_entropy(Tape&, Tensor, const LabelVector&,
                                     const BoolArray&);
};

Tensor matmul(Tape& tape, Tensor a, Tensor b);
// A * x with the graph acting as a constant operator; no gradient w.r.t. the
// adjacency. The graph must outlive the tape's backward pass.
Tensor sparse_matmul(Tape& tape, const Graph& g, Tensor x);
Tensor add(Tape& tape, Tensor a, Tensor b);
// Adds a 1 x F row vector to every row of an N x F tensor.
Tensor add_rowvec(Tape& tape, Tensor a, Tensor row);
Tensor relu(Tape& tape, Tensor a);
Tensor concat_cols(Tape& tape, const std::vector<Tensor>& parts);
// Scales row i of z by weights(i, 0); weights is N x 1.
Tensor scale_rows(Tape& tape, Tensor z, Tensor weights);
// Scales all of z by the single entry weights(0, i) of a 1 x I tensor.
Tensor scale_by_entry(Tape& tape, Tensor z, Tensor weights, Index i);
// Column j of m as an N x 1 tensor.
Tensor column(Tape& tape, Tensor m, Index j);
// Elementwise product with a constant factor (dropout masks).
Tensor elementwise_scale(Tape& tape, Tensor z, const Matrix& factor);
// Softmax over all entries of a single-row or single-column tensor.
Tensor softmax_vector(Tape& tape, Tensor logits);
Tensor softmax_rows(Tape& tape, Tensor logits);
Tensor sum_squares(Tape& tape, Tensor z);
// Mean negative log-likelihood over mask-selected rows, log-sum-exp
// stabilized. Rows outside the mask contribute nothing, in value or gradient.
Tensor masked_cross_entropy(Tape& tape, Tensor logits, const LabelVector& y,
                            const BoolArray& mask);

struct AdamState {
  Matrix m;
  Matrix v;
  long t = 0;
};

// One Adam update with bias correction; state tensors are allocated on first
// use.
void adam_step(Matrix& param, const Matrix& grad, AdamState& state, double lr,
               double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

// Uniform(-a, a) with a = sqrt(6 / (rows + cols)).
Matrix glorot_init(Index rows, Index cols, std::mt19937_64& rng);

}  // namespace sggnn
