#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace sggnn {

using Index = Eigen::Index;

// Double precision throughout: gradient checks need ~1e-5 relative tolerance.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;
using BoolArray = Eigen::Array<bool, Eigen::Dynamic, 1>;

// Row-major sparse = CSR: outerIndexPtr/innerIndexPtr/valuePtr are the
// row_offsets/col_indices/values arrays.
using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

}  // namespace sggnn
