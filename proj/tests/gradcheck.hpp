#pragma once

#include <functional>
#include <vector>

#include "sggnn/types.hpp"

namespace testutil {

// Central-difference gradient check. analytic_grads() runs one backward pass
// and returns gradients aligned with params; loss_value() evaluates the loss
// at the current parameter values. Every parameter entry is perturbed in
// place by +-step. Returns the worst relative error, with the denominator
// floored at 1 so near-zero gradients are compared absolutely.
inline double max_rel_grad_error(
    const std::vector<sggnn::Matrix*>& params,
    const std::function<std::vector<sggnn::Matrix>()>& analytic_grads,
    const std::function<double()>& loss_value, double step = 1e-6) {
  using sggnn::Index;
  std::vector<sggnn::Matrix> grads = analytic_grads();
  double worst = 0.0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    sggnn::Matrix& theta = *params[p];
    for (Index i = 0; i < theta.rows(); ++i) {
      for (Index j = 0; j < theta.cols(); ++j) {
        const double saved = theta(i, j);
        theta(i, j) = saved + step;
        const double up = loss_value();
        theta(i, j) = saved - step;
        const double down = loss_value();
        theta(i, j) = saved;
        const double fd = (up - down) / (2.0 * step);
        const double a = grads[p](i, j);
        const double denom = std::max({1.0, std::abs(a), std::abs(fd)});
        worst = std::max(worst, std::abs(a - fd) / denom);
      }
    }
  }
  return worst;
}

}  // namespace testutil
