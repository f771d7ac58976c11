#pragma once

#include <vector>

#include "tsbench/matrix.hpp"

namespace tsbench {

struct JacobiOptions {
  double relative_tolerance = 1e-12;
  int max_sweeps = 100;
};

struct EigenResult {
  std::vector<double> values;  // descending
  int sweeps = 0;
};

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations. Stops once
/// every off-diagonal magnitude is below tolerance * ||S||_F. Throws
/// ConvergenceError (carrying the largest remaining off-diagonal) otherwise.
EigenResult symmetric_eigenvalues(const Matrix& s, const JacobiOptions& opts = {});

/// Singular values of W, descending, length min(rows, cols). Computed from the
/// smaller Gram matrix (W^T W or W W^T).
std::vector<double> singular_values(const Matrix& w, const JacobiOptions& opts = {});

}  // namespace tsbench
