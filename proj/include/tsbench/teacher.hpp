#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "tsbench/matrix.hpp"
#include "tsbench/random.hpp"

namespace tsbench {

/// Teacher hyperparameters: input dimension, hidden width, label noise.
struct Gamma {
  std::size_t d = 1;
  std::size_t m = 1;
  double sigma = 0.1;

  void validate() const;
  bool operator==(const Gamma&) const = default;
};

/// Single-hidden-layer ReLU teacher g(x) = sum_i theta_i relu(a_i . x + b_i).
struct TeacherNet {
  Matrix a;  // M x d, row i is a_i
  std::vector<double> b;
  std::vector<double> theta;
  Gamma gamma;
};

struct Dataset {
  Matrix xs;  // N x d
  std::vector<double> ys;
  std::vector<double> ys_noiseless;

  std::size_t size() const noexcept { return ys.size(); }
  std::size_t dim() const noexcept { return xs.cols(); }
  /// Rows picked by index, in the given order.
  Dataset subset(std::span<const std::size_t> rows) const;
};

/// a, b ~ N(0, 1/(d+1)); theta ~ N(0, 1/M). Draw order: a row-major, b, theta.
TeacherNet sample_teacher(const Gamma& gamma, RandomSource& rng);

double teacher_forward(const TeacherNet& g, std::span<const double> x);

/// g evaluated on every row of xs.
std::vector<double> teacher_forward_batch(const TeacherNet& g, const Matrix& xs);

/// xs rows ~ N(0, I_d), then ys = g(x) + N(0, sigma^2) noise. Draws xs
/// row-major first, then the noise.
Dataset generate_dataset(const TeacherNet& g, std::size_t n, RandomSource& rng);

/// Columns x_1..x_d, y, y_noiseless with a header row.
void write_dataset_csv(const Dataset& data, const std::filesystem::path& path);

}  // namespace tsbench
