#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tsbench {

struct PlotPoint {
  double x = 0.0;
  double y = 0.0;
  std::string label;
  std::optional<double> y_low;   // error bar, data units
  std::optional<double> y_high;
};

/// Straight line in plot space: for log axes, log10 y = slope * log10 x + intercept.
struct ReferenceLine {
  double slope = 1.0;
  double intercept = 0.0;
  std::string label;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotPoint> points;
  std::vector<ReferenceLine> references;
  bool log_x = true;
  bool log_y = true;
  /// One unit of plot space (a decade on log axes) spans the same length on both axes.
  bool equal_aspect = true;
};

/// Throws ValidationError for an empty series, non-finite values, or
/// nonpositive values on a log axis.
void validate_plot(const PlotSpec& spec);

/// Standalone SVG. Points are <circle> elements and each reference is one
/// <line>; axes, ticks and error bars are <path>s. Output is byte-identical
/// for identical specs.
std::string render_svg(const PlotSpec& spec);
void write_svg(const PlotSpec& spec, const std::filesystem::path& path);

}  // namespace tsbench
