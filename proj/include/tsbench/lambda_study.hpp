#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "tsbench/matrix.hpp"
#include "tsbench/random.hpp"

namespace tsbench {

/// d x M matrix with entries G[i][j] * h[j]; G ~ N(0, 1/d) i.i.d., h ~ N(0, 1/M).
/// Draws G row-major, then h.
Matrix sample_weight_matrix(std::size_t d, std::size_t m, RandomSource& rng);

struct LambdaSample {
  std::size_t d = 0;
  std::size_t m = 0;
  std::size_t trial = 0;
  double log_lambda = 0.0;  // natural log
  std::vector<double> singular_values;
  bool overflow = false;    // smallest singular value fell below the clamp
};

inline constexpr double kSingularValueFloor = 1e-300;

/// ln of (prod_{i<=k} s_i) / s_k^k with k = min(d, M), summed in log space.
LambdaSample compute_lambda(const Matrix& w);

struct LambdaRow {
  std::size_t m = 0;
  std::size_t d = 0;
  std::size_t trials = 0;
  std::size_t overflow = 0;  // excluded from the quantiles
  double median_log10 = 0.0;
  double p05_log10 = 0.0;
  double p95_log10 = 0.0;
};

struct LambdaSweep {
  std::vector<LambdaRow> rows;
  std::vector<LambdaSample> samples;
};

/// For each M: `trials` matrices with d = 2M, seeded by (seed, M, trial).
LambdaSweep lambda_sweep(const std::vector<std::size_t>& m_list, std::size_t trials,
                         std::uint64_t seed);

/// Linear-interpolated quantile (q in [0, 1]) of unsorted values.
double quantile(std::vector<double> values, double q);

/// Columns M, d, trial, log10_lambda.
void write_lambda_samples_csv(const LambdaSweep& sweep, const std::filesystem::path& path);
/// Columns M, d, trials, overflow, median_log10, p05_log10, p95_log10.
void write_lambda_summary_csv(const LambdaSweep& sweep, const std::filesystem::path& path);
std::vector<LambdaSample> read_lambda_samples_csv(const std::filesystem::path& path);

}  // namespace tsbench
