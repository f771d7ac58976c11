#include "tsbench/teacher.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "tsbench/errors.hpp"
#include "tsbench/format.hpp"
#include "tsbench/kernels.hpp"

namespace tsbench {

void Gamma::validate() const {
  if (d < 1 || m < 1) throw ValidationError("gamma: d and M must be >= 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ValidationError("gamma: sigma must be > 0");
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out{Matrix(rows.size(), dim()), std::vector<double>(rows.size()),
              std::vector<double>(rows.size())};
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::size_t r = rows[k];
    auto src = xs.row(r);
    std::copy(src.begin(), src.end(), out.xs.row(k).begin());
    out.ys[k] = ys[r];
    out.ys_noiseless[k] = ys_noiseless[r];
  }
  return out;
}

TeacherNet sample_teacher(const Gamma& gamma, RandomSource& rng) {
  gamma.validate();
  const double in_std = 1.0 / std::sqrt(static_cast<double>(gamma.d + 1));
  const double out_std = 1.0 / std::sqrt(static_cast<double>(gamma.m));
  TeacherNet g{Matrix(gamma.m, gamma.d), std::vector<double>(gamma.m),
               std::vector<double>(gamma.m), gamma};
  rng.fill_normal(g.a.data(), in_std);
  rng.fill_normal(g.b, in_std);
  rng.fill_normal(g.theta, out_std);
  return g;
}

double teacher_forward(const TeacherNet& g, std::span<const double> x) {
  if (x.size() != g.a.cols()) {
    throw ShapeError("teacher_forward: input has " + std::to_string(x.size()) +
                     " entries, expected " + std::to_string(g.a.cols()));
  }
  double out = 0.0;
  for (std::size_t i = 0; i < g.a.rows(); ++i) {
    double pre = g.b[i];
    auto ai = g.a.row(i);
    for (std::size_t j = 0; j < x.size(); ++j) pre += ai[j] * x[j];
    out += g.theta[i] * std::max(pre, 0.0);
  }
  return out;
}

std::vector<double> teacher_forward_batch(const TeacherNet& g, const Matrix& xs) {
  if (xs.cols() != g.a.cols()) throw ShapeError("teacher_forward_batch: dimension mismatch");
  std::vector<double> out(xs.rows());
  kernels::teacher_forward_batch(xs.data(), g.a.data(), g.b, g.theta, out, xs.rows(),
                                 xs.cols(), g.a.rows());
  return out;
}

Dataset generate_dataset(const TeacherNet& g, std::size_t n, RandomSource& rng) {
  if (n < 1) throw InsufficientDataError("generate_dataset: N must be >= 1");
  Dataset data{Matrix(n, g.gamma.d), {}, {}};
  rng.fill_normal(data.xs.data());
  data.ys_noiseless = teacher_forward_batch(g, data.xs);
  data.ys.resize(n);
  for (std::size_t j = 0; j < n; ++j) data.ys[j] = data.ys_noiseless[j] + g.gamma.sigma * rng.normal();
  return data;
}

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t j = 0; j < data.dim(); ++j) out << "x_" << (j + 1) << ',';
  out << "y,y_noiseless\n";
  for (std::size_t r = 0; r < data.size(); ++r) {
    for (double v : data.xs.row(r)) out << format_double(v) << ',';
    out << format_double(data.ys[r]) << ',' << format_double(data.ys_noiseless[r]) << '\n';
  }
}

}  // namespace tsbench
