#include "sggnn/autodiff.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sggnn {

namespace {

std::string shape_of(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

[[noreturn]] void shape_error(const char* op, const Matrix& a, const Matrix& b) {
  throw std::invalid_argument(std::string(op) + ": incompatible shapes " +
                              shape_of(a) + " and " + shape_of(b));
}

}  // namespace

Tape::Node& Tape::node(Tensor t) {
  return nodes_.at(static_cast<std::size_t>(t.id));
}

const Tape::Node& Tape::node(Tensor t) const {
  return nodes_.at(static_cast<std::size_t>(t.id));
}

Tensor Tape::input(Matrix value, bool requires_grad) {
  return emplace(std::move(value), requires_grad, nullptr);
}

Tensor Tape::emplace(Matrix value, bool requires_grad,
                     std::function<void(Tape&)> pullback) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  if (requires_grad) {
    n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
    n.pullback = std::move(pullback);
  }
  nodes_.push_back(std::move(n));
  return Tensor{static_cast<int>(nodes_.size()) - 1};
}

const Matrix& Tape::grad(Tensor t) const {
  const Node& n = node(t);
  if (!n.requires_grad)
    throw std::logic_error("Tape::grad: tensor does not track gradients");
  return n.grad;
}

void Tape::add_grad(Tensor t, const Matrix& g) {
  Node& n = node(t);
  if (n.requires_grad) n.grad += g;
}

void Tape::backward(Tensor loss) {
  Node& target = node(loss);
  if (target.value.rows() != 1 || target.value.cols() != 1)
    throw std::invalid_argument("backward: loss must be 1x1, got " +
                                shape_of(target.value));
  if (!target.requires_grad)
    throw std::invalid_argument("backward: loss does not depend on any parameter");
  for (Node& n : nodes_)
    if (n.requires_grad) n.grad.setZero();
  target.grad(0, 0) = 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it)
    if (it->requires_grad && it->pullback) it->pullback(*this);
}

Tensor matmul(Tape& tape, Tensor a, Tensor b) {
  const Matrix& av = tape.value(a);
  const Matrix& bv = tape.value(b);
  if (av.cols() != bv.rows()) shape_error("matmul", av, bv);
  bool rg = tape.node(a).requires_grad || tape.node(b).requires_grad;
  Tensor out{static_cast<int>(tape.size())};
  return tape.emplace(av * bv, rg, [a, b, out](Tape& t) {
    const Matrix& up = t.grad(out);
    t.add_grad(a, up * t.value(b).transpose());
    t.add_grad(b, t.value(a).transpose() * up);
  });
}

Tensor sparse_matmul(Tape& tape, const Graph& g, Tensor x) {
  const Matrix& xv = tape.value(x);
  const SpMat* a = &g.adjacency();
  if (a->cols() != xv.rows())
    throw std::invalid_argument("sparse_matmul: operator has " +
                                std::to_string(a->cols()) + " columns but input has " +
                                std::to_string(xv.rows()) + " rows");
  bool rg = tape.node(x).requires_grad;
  Tensor out{static_cast<int>(tape.size())};
  return tape.emplace(*a * xv, rg, [a, x, out](Tape& t) {
    t.add_grad(x, a->transpose() * t.grad(out));
  });
}

Tensor add(Tape& tape, Tensor a, Tensor b) {
  const Matrix& av = tape.value(a);
  const Matrix& bv = tape.value(b);
  if (av.rows() != bv.rows() || av.cols() != bv.cols())
    shape_error("add", av, bv);
  bool rg = tape.node(a).requires_grad || tape.node(b).requires_grad;
  Tensor out{static_cast<int>(tape.size())};
  return tape.emplace(av + bv, rg, [a, b, out](Tape& t) {
    t.add_grad(a, t.grad(out));
    t.add_grad(b, t.grad(out));
  });
}

Tensor add_rowvec(Tape& tape, Tensor a, Tensor row) {
  const Matrix& av = tape.value(a);
  const Matrix& rv = tape.value(row);
  if (rv.rows() != 1 || rv.cols() != av.cols()) shape_error("add_rowvec", av, rv);
  bool rg = tape.node(a).requires_grad || tape.node(row).requires_grad;
  Tensor out{static_cast<int>(tape.size())};
  return tape.emplace(av.rowwise() + rv.row(0), rg, [a, row, out](Tape& t) {
    t.add_grad(a, t.grad(out));
    t.add_grad(row, t.grad(out).colwise().sum());
  });
}

Tensor relu(Tape& tape, Tensor a) {
  const Matrix& av = tape.value(a);
  bool rg = tape.node(a).requires_grad;
  Tensor out{static_cast<int>(tape.size())};
  return tape.emplace(av.cwiseMax(0.0), rg, [a, out](Tape& t) {
    Matrix mask = (t.value(a).array() > 0.0).cast<double>().matrix();
    t.add_grad(a, t.grad(out).cwiseProduct(mask));
  });
}

Tensor concat_cols(Tape& tape, const std::vector<Tensor>& parts) {
  if (parts.empty())
    throw std::invalid_argument("concat_cols: no tensors given");
  const Index rows = tape.value(parts.front()).rows();
  Index cols = 0;
  bool rg = false;
  for (Tensor p : parts) {
    if (tape.value(p).rows() != rows)
      shape_error("concat_cols", tape.value(parts.front()), tape.value(p));
    cols += tape.value(p).cols();
    rg = rg || tape.node(p).requires_grad;
  }
  Matrix v(rows, cols);
  Index at = 0;
  for (Tensor p : parts) {
    v.middleCols(at, tape.value(p).cols()) = tape.value(p);
    at += tape.value(p).cols();
  }
  Tensor out{static_cast<int>(tape.size())};
  return tape.emplace(std::move(v), rg, [parts, out](Tape& t) {
    const Matrix& up = t.grad(out);
    Index offset = 0;
    for (Tensor p : parts) {
      Index w = t.value(p).cols();
      t.add_grad(p, up.middleCols(offset, w));
      offset += w;
    }
  });
}

Tensor scale_rows(Tape& tape, Tensor z, Tensor weights) {
  const Matrix& zv = tape.value(z);
  const Matrix& wv = tape.value(weights);
  if (wv.cols() != 1 || wv.rows() != zv.rows()) shape_error("scale_rows", zv, wv);
  bool rg = tape.node(z).requires_grad || tape.node(weights).requires_grad;
  Tensor out{static_cast<int>(tape.size())};
  return tape.emplace((zv.array().colwise() * wv.col(0).array()).matrix(), rg,
                      [z, weights, out](Tape& t) {
                        const Matrix& up = t.grad(out);
                        const Matrix& zv2 = t.value(z);
                        const Matrix& wv2 = t.value(weights);
                        t.add_grad(z, (up.array().colwise() * wv2.col(0).array()).matrix());
                        t.add_grad(weights, up.cwiseProduct(zv2).rowwise().sum());
                      });
}

Tensor scale_by_entry(Tape& tape, Tensor z, Tensor weights, Index i) {
  const Matrix& zv = tape.value(z);
  const Matrix& wv = tape.value(weights);
  if (wv.rows() != 1 || i < 0 || i >= wv.cols())
    throw std::invalid_argument("scale_by_entry: index " + std::to_string(i) +
                                " out of range for " + shape_of(wv));
  bool rg = tape.node(z).requires_grad || tape.node(weights).requires_grad;
  Tensor out{static_cast<int>(tape.size())};
  return tape.emplace(zv * wv(0, i), rg, [z, weights, i, out](Tape& t) {
    const Matrix& up = t.grad(out);
    t.add_grad(z, up * t.value(weights)(0, i));
    Matrix wg = Matrix::Zero(1, t.value(weights).cols());
    wg(0, i) = up.cwiseProduct(t.value(z)).sum();
    t.add_grad(weights, wg);
  });
}

Tensor column(Tape& tape, Tensor m, Index j) {
  const Matrix& mv = tape.value(m);
  if (j < 0 || j >= mv.cols())
    throw std::invalid_argument("column: index " + std::to_string(j) +
                                " out of range for " + shape_of(mv));
  bool rg = tape.node(m).requires_grad;
  Tensor out{static_cast<int>(tape.size())};
  return tape.emplace(mv.col(j), rg, [m, j, out](Tape& t) {
    Matrix g = Matrix::Zero(t.value(m).rows(), t.value(m).cols());
    g.col(j) = t.grad(out);
    t.add_grad(m, g);
  });
}

Tensor elementwise_scale(Tape& tape, Tensor z, const Matrix& factor) {
  const Matrix& zv = tape.value(z);
  if (factor.rows() != zv.rows() || factor.cols() != zv.cols())
    shape_error("elementwise_scale", zv, factor);
  bool rg = tape.node(z).requires_grad;
  Tensor out{static_cast<int>(tape.size())};
  return tape.emplace(zv.cwiseProduct(factor), rg, [z, factor, out](Tape& t) {
    t.add_grad(z, t.grad(out).cwiseProduct(factor));
  });
}

namespace {

Matrix stable_softmax_rows(const Matrix& logits) {
  Matrix shifted = logits.colwise() - logits.rowwise().maxCoeff();
  Matrix e = shifted.array().exp().matrix();
  return (e.array().colwise() / e.rowwise().sum().array()).matrix();
}

}  // namespace

Tensor softmax_vector(Tape& tape, Tensor logits) {
  const Matrix& lv = tape.value(logits);
  if (lv.rows() != 1 && lv.cols() != 1)
    throw std::invalid_argument("softmax_vector: expected a vector, got " +
                                shape_of(lv));
  Matrix row = lv.rows() == 1 ? lv : Matrix(lv.transpose());
  Matrix s = stable_softmax_rows(row);
  Matrix value = lv.rows() == 1 ? s : Matrix(s.transpose());
  bool rg = tape.node(logits).requires_grad;
  Tensor out{static_cast<int>(tape.size())};
  return tape.emplace(std::move(value), rg, [logits, out](Tape& t) {
    const Matrix& sv = t.value(out);
    const Matrix& up = t.grad(out);
    double dot = sv.cwiseProduct(up).sum();
    t.add_grad(logits, (sv.array() * (up.array() - dot)).matrix());
  });
}

Tensor softmax_rows(Tape& tape, Tensor logits) {
  const Matrix& lv = tape.value(logits);
  bool rg = tape.node(logits).requires_grad;
  Tensor out{static_cast<int>(tape.size())};
  return tape.emplace(stable_softmax_rows(lv), rg, [logits, out](Tape& t) {
    const Matrix& sv = t.value(out);
    const Matrix& up = t.grad(out);
    Vector dots = sv.cwiseProduct(up).rowwise().sum();
    t.add_grad(logits, (sv.array() * (up.array().colwise() - dots.array())).matrix());
  });
}

Tensor sum_squares(Tape& tape, Tensor z) {
  const Matrix& zv = tape.value(z);
  bool rg = tape.node(z).requires_grad;
  Tensor out{static_cast<int>(tape.size())};
  Matrix v(1, 1);
  v(0, 0) = zv.squaredNorm();
  return tape.emplace(std::move(v), rg, [z, out](Tape& t) {
    t.add_grad(z, 2.0 * t.grad(out)(0, 0) * t.value(z));
  });
}

Tensor masked_cross_entropy(Tape& tape, Tensor logits, const LabelVector& y,
                            const BoolArray& mask) {
  const Matrix& lv = tape.value(logits);
  if (y.labels.size() != lv.rows() || mask.size() != lv.rows())
    throw std::invalid_argument(
        "masked_cross_entropy: labels/mask length must equal logit rows");
  const Index count = mask.count();
  if (count == 0)
    throw std::invalid_argument("masked_cross_entropy: empty mask");

  Vector max = lv.rowwise().maxCoeff();
  Vector lse = ((lv.colwise() - max).array().exp().rowwise().sum().log() +
                max.array())
                   .matrix();
  double total = 0.0;
  for (Index i = 0; i < lv.rows(); ++i)
    if (mask[i]) total += lse[i] - lv(i, y.labels[i]);

  bool rg = tape.node(logits).requires_grad;
  Tensor out{static_cast<int>(tape.size())};
  Matrix v(1, 1);
  v(0, 0) = total / static_cast<double>(count);
  return tape.emplace(std::move(v), rg, [logits, y, mask, count, out](Tape& t) {
    const Matrix& lv2 = t.value(logits);
    double up = t.grad(out)(0, 0);
    Matrix probs = stable_softmax_rows(lv2);
    Matrix g = Matrix::Zero(lv2.rows(), lv2.cols());
    for (Index i = 0; i < lv2.rows(); ++i) {
      if (!mask[i]) continue;
      g.row(i) = probs.row(i);
      g(i, y.labels[i]) -= 1.0;
    }
    t.add_grad(logits, g * (up / static_cast<double>(count)));
  });
}

void adam_step(Matrix& param, const Matrix& grad, AdamState& state, double lr,
               double beta1, double beta2, double eps) {
  if (param.rows() != grad.rows() || param.cols() != grad.cols())
    shape_error("adam_step", param, grad);
  if (state.m.size() == 0) {
    state.m = Matrix::Zero(param.rows(), param.cols());
    state.v = Matrix::Zero(param.rows(), param.cols());
  }
  state.t += 1;
  state.m = beta1 * state.m + (1.0 - beta1) * grad;
  state.v = beta2 * state.v + (1.0 - beta2) * grad.cwiseProduct(grad);
  double c1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
  double c2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
  Matrix m_hat = state.m / c1;
  Matrix v_hat = state.v / c2;
  param.array() -= lr * m_hat.array() / (v_hat.array().sqrt() + eps);
}

Matrix glorot_init(Index rows, Index cols, std::mt19937_64& rng) {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("glorot_init: dimensions must be positive");
  double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> u(-a, a);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = u(rng);
  return m;
}

}  // namespace sggnn
