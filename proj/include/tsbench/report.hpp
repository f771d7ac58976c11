#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tsbench/experiment.hpp"
#include "tsbench/svg_plot.hpp"

namespace tsbench {

struct LambdaSample;

/// Least-squares fit of log10 y on log10 x, plus the constant c of the
/// unit-slope fit y = c x (geometric mean of y/x).
struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;  // log10 space
  double r_squared = 0.0;
  double unit_slope_constant = 0.0;
  std::size_t points = 0;
};

/// Needs at least two strictly positive points (ValidationError otherwise).
/// The result does not depend on the order of the points.
LogLogFit fit_reference(std::span<const std::pair<double, double>> points);

/// Ordinary least squares y = slope x + intercept with R^2.
LogLogFit fit_linear(std::span<const std::pair<double, double>> points);

/// Figures built from a results table.
PlotSpec sample_complexity_plot(const std::vector<SampleComplexity>& table, double sigma);
PlotSpec sample_ratio_plot(const std::vector<SampleComplexity>& table, double sigma);
PlotSpec query_plot(const std::vector<TrialResult>& trials, double sigma);

struct ReportOptions {
  std::filesystem::path results;  // results CSV
  std::filesystem::path out_dir;
  std::vector<double> epsilons{1.0};
  /// samples, ratio, queries, appendix, or all
  std::string figure = "all";
};

/// Renders the requested figures next to a plain-text summary
/// (<out_dir>/report.txt). Reads the results CSV only. Returns the paths written.
std::vector<std::filesystem::path> make_report(const ReportOptions& opts);

/// log10 lambda against M, from a lambda samples CSV.
PlotSpec lambda_plot(const std::vector<LambdaSample>& samples);

}  // namespace tsbench
