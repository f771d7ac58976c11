#include "tsbench/singular_values.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "tsbench/errors.hpp"

namespace tsbench {

EigenResult symmetric_eigenvalues(const Matrix& s, const JacobiOptions& opts) {
  if (s.rows() != s.cols()) throw ShapeError("symmetric_eigenvalues: matrix is not square");
  const std::size_t n = s.rows();
  Matrix a = s;
  const double threshold = opts.relative_tolerance * s.frobenius_norm();

  auto max_off_diagonal = [&] {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) m = std::max(m, std::abs(a(i, j)));
    return m;
  };

  EigenResult result;
  double residual = max_off_diagonal();
  while (residual >= threshold && residual > 0.0) {
    if (result.sweeps == opts.max_sweeps) {
      throw ConvergenceError("Jacobi eigensolver did not converge in " +
                                 std::to_string(opts.max_sweeps) + " sweeps",
                             residual);
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle that annihilates a(p, q).
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
      }
    }
    ++result.sweeps;
    residual = max_off_diagonal();
  }

  result.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) result.values[i] = a(i, i);
  std::sort(result.values.begin(), result.values.end(), std::greater<>());
  return result;
}

std::vector<double> singular_values(const Matrix& w, const JacobiOptions& opts) {
  for (double v : w.data()) {
    if (!std::isfinite(v)) throw ValidationError("singular_values: non-finite entry");
  }
  const Matrix wt = w.transpose();
  const Matrix gram = w.rows() >= w.cols() ? matmul(wt, w) : matmul(w, wt);
  std::vector<double> sv = symmetric_eigenvalues(gram, opts).values;
  for (double& v : sv) v = std::sqrt(std::max(v, 0.0));
  return sv;
}

}  // namespace tsbench
