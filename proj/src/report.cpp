#include "tsbench/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "tsbench/errors.hpp"
#include "tsbench/format.hpp"
#include "tsbench/lambda_study.hpp"
#include "tsbench/results_io.hpp"

namespace tsbench {

LogLogFit fit_linear(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw ValidationError("fit: need at least 2 points");
  // Sorting makes every sum below independent of the caller's ordering.
  std::vector<std::pair<double, double>> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end());
  const double n = static_cast<double>(pts.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (sxx == 0.0) throw ValidationError("fit: all x values are equal");
  LogLogFit fit;
  fit.points = pts.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

LogLogFit fit_reference(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw ValidationError("fit: need at least 2 points");
  std::vector<std::pair<double, double>> logs;
  std::vector<double> offsets;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y))
      throw ValidationError("fit: points must be finite and strictly positive");
    logs.emplace_back(std::log10(x), std::log10(y));
    offsets.push_back(std::log10(y) - std::log10(x));
  }
  LogLogFit fit = fit_linear(logs);
  std::sort(offsets.begin(), offsets.end());
  double s = 0.0;
  for (double o : offsets) s += o;
  fit.unit_slope_constant = std::pow(10.0, s / static_cast<double>(offsets.size()));
  return fit;
}

namespace {

std::string gamma_label(const Gamma& g) {
  std::ostringstream os;
  os << "d=" << g.d << " M=" << g.m << " sigma=" << format_double(g.sigma);
  return os.str();
}

// Geometric mean of y/x: the constant of the best unit-slope line in log
// space. Unlike a full fit this is defined when every x is the same.
double unit_slope_constant(std::vector<std::pair<double, double>> pts) {
  std::sort(pts.begin(), pts.end());
  double s = 0.0;
  for (const auto& [x, y] : pts) s += std::log10(y) - std::log10(x);
  return std::pow(10.0, s / static_cast<double>(pts.size()));
}

bool distinct_x(const std::vector<std::pair<double, double>>& pts) {
  return std::any_of(pts.begin(), pts.end(), [&](const auto& p) { return p.first != pts.front().first; });
}

ReferenceLine unit_slope_reference(const std::vector<std::pair<double, double>>& pts,
                                   const std::string& what) {
  ReferenceLine ref{1.0, 0.0, "unit slope"};
  if (pts.empty()) return ref;
  const double c = unit_slope_constant(pts);
  ref.intercept = std::log10(c);
  ref.label = what + " = " + format_double(std::round(c * 1000.0) / 1000.0) + " x";
  return ref;
}

// The scaling figures and fits use the one-hidden-layer, tuned-width runs;
// other depths and schemes are ablations.
bool main_series(int depth, WidthVariant scheme) {
  return depth == 1 && scheme == WidthVariant::tune;
}

}  // namespace

PlotSpec sample_complexity_plot(const std::vector<SampleComplexity>& table, double sigma) {
  PlotSpec spec;
  spec.title = "sample complexity, sigma=" + format_double(sigma);
  spec.x_label = "dM";
  spec.y_label = "eps * N_eps";
  std::vector<std::pair<double, double>> pts;
  for (const auto& s : table) {
    if (s.gamma.sigma != sigma || !s.n_eps || !main_series(s.depth, s.scheme)) continue;
    const double x = static_cast<double>(s.gamma.d * s.gamma.m);
    const double y = s.epsilon * static_cast<double>(*s.n_eps);
    spec.points.push_back({x, y, gamma_label(s.gamma) + " eps=" + format_double(s.epsilon), {}, {}});
    pts.emplace_back(x, y);
  }
  spec.references.push_back(unit_slope_reference(pts, "eps N_eps"));
  return spec;
}

PlotSpec sample_ratio_plot(const std::vector<SampleComplexity>& table, double sigma) {
  PlotSpec spec;
  spec.title = "N_eps / dM against 1/eps, sigma=" + format_double(sigma);
  spec.x_label = "1 / eps";
  spec.y_label = "N_eps / dM";
  std::vector<std::pair<double, double>> pts;
  for (const auto& s : table) {
    if (s.gamma.sigma != sigma || !s.n_eps || !main_series(s.depth, s.scheme)) continue;
    const double x = 1.0 / s.epsilon;
    const double y = static_cast<double>(*s.n_eps) / static_cast<double>(s.gamma.d * s.gamma.m);
    spec.points.push_back({x, y, gamma_label(s.gamma) + " eps=" + format_double(s.epsilon), {}, {}});
    pts.emplace_back(x, y);
  }
  spec.references.push_back(unit_slope_reference(pts, "N_eps/dM"));
  return spec;
}

PlotSpec query_plot(const std::vector<TrialResult>& trials, double sigma) {
  PlotSpec spec;
  spec.title = "queries against samples, sigma=" + format_double(sigma);
  spec.x_label = "N";
  spec.y_label = "T";
  std::vector<std::pair<double, double>> pts;
  for (const auto& t : trials) {
    if (t.gamma.sigma != sigma || t.queries == 0 || !main_series(t.depth, t.scheme)) continue;
    const double x = static_cast<double>(t.n);
    const double y = static_cast<double>(t.queries);
    spec.points.push_back({x, y, gamma_label(t.gamma) + " trial " + std::to_string(t.trial), {}, {}});
    pts.emplace_back(x, y);
  }
  spec.references.push_back(unit_slope_reference(pts, "T"));
  return spec;
}

PlotSpec lambda_plot(const std::vector<LambdaSample>& samples) {
  PlotSpec spec;
  spec.title = "lambda against M (d = 2M)";
  spec.x_label = "M";
  spec.y_label = "log10 lambda";
  spec.log_x = false;
  spec.log_y = false;
  spec.equal_aspect = false;
  for (const auto& s : samples) {
    if (s.overflow) continue;
    spec.points.push_back({static_cast<double>(s.m), s.log_lambda / std::numbers::ln10,
                           "M=" + std::to_string(s.m) + " trial " + std::to_string(s.trial), {}, {}});
  }
  return spec;
}

std::vector<std::filesystem::path> make_report(const ReportOptions& opts) {
  const auto trials = read_results_csv(opts.results);
  if (trials.empty()) throw ValidationError("report: no rows in " + opts.results.string());
  std::filesystem::create_directories(opts.out_dir);
  const auto cells = summarize_cells(trials);
  const auto table = sample_complexity(cells, [&](const Gamma&) { return opts.epsilons; });

  std::set<double> sigmas;
  for (const auto& t : trials) sigmas.insert(t.gamma.sigma);
  const bool all = opts.figure == "all";
  static const std::set<std::string> kFigures = {"all", "samples", "ratio", "queries", "appendix"};
  if (!kFigures.contains(opts.figure)) throw ValidationError("report: unknown figure '" + opts.figure + "'");

  std::vector<std::filesystem::path> written;
  auto emit = [&](const PlotSpec& spec, const std::string& name) {
    if (spec.points.empty()) return;
    const auto path = opts.out_dir / name;
    write_svg(spec, path);
    written.push_back(path);
  };

  for (double sigma : sigmas) {
    const std::string tag = "sigma" + format_double(sigma);
    if (all || opts.figure == "samples") emit(sample_complexity_plot(table, sigma), "samples_" + tag + ".svg");
    if (all || opts.figure == "ratio") emit(sample_ratio_plot(table, sigma), "ratio_" + tag + ".svg");
    if (all || opts.figure == "queries") emit(query_plot(trials, sigma), "queries_" + tag + ".svg");
    if (all || opts.figure == "appendix") {
      // N_eps against M for each d, and against d for each M; N_eps is only
      // known to within a factor of two, hence the bars.
      std::map<std::pair<int, std::size_t>, PlotSpec> plots;
      for (const auto& s : table) {
        if (s.gamma.sigma != sigma || !s.n_eps || !main_series(s.depth, s.scheme)) continue;
        const double n = static_cast<double>(*s.n_eps);
        const std::string lbl = gamma_label(s.gamma) + " eps=" + format_double(s.epsilon);
        auto& by_d = plots[{0, s.gamma.d}];
        by_d.title = "N_eps against M, d=" + std::to_string(s.gamma.d) + ", " + tag;
        by_d.x_label = "M";
        by_d.y_label = "N_eps";
        by_d.points.push_back({static_cast<double>(s.gamma.m), n, lbl, n / 2.0, n});
        auto& by_m = plots[{1, s.gamma.m}];
        by_m.title = "N_eps against d, M=" + std::to_string(s.gamma.m) + ", " + tag;
        by_m.x_label = "d";
        by_m.y_label = "N_eps";
        by_m.points.push_back({static_cast<double>(s.gamma.d), n, lbl, n / 2.0, n});
      }
      for (auto& [key, spec] : plots) {
        spec.equal_aspect = false;
        emit(spec, std::string(key.first == 0 ? "appendix_d" : "appendix_M") +
                       std::to_string(key.second) + "_" + tag + ".svg");
      }
    }
  }

  // Text summary.
  std::ostringstream txt;
  txt << "cells (gamma, depth, scheme, N): trials, mean error, mean queries\n";
  for (const auto& c : cells) {
    txt << gamma_label(c.gamma) << " depth=" << c.depth << " scheme=" << to_string(c.scheme)
        << " N=" << c.n << ": " << c.trials << ", " << format_double(c.mean_error) << ", "
        << format_double(c.mean_queries) << '\n';
  }
  txt << "\nsample complexity\n";
  for (const auto& s : table) {
    txt << gamma_label(s.gamma) << " depth=" << s.depth << " scheme=" << to_string(s.scheme)
        << " eps=" << format_double(s.epsilon) << ": "
        << (s.n_eps ? std::to_string(*s.n_eps) : "not reached (largest N " + std::to_string(s.largest_n) + ")")
        << '\n';
  }
  for (double sigma : sigmas) {
    std::vector<std::pair<double, double>> samples, raw, queries;
    for (const auto& s : table) {
      if (s.gamma.sigma != sigma || !s.n_eps || !main_series(s.depth, s.scheme)) continue;
      const double dm = static_cast<double>(s.gamma.d * s.gamma.m);
      samples.emplace_back(dm, s.epsilon * static_cast<double>(*s.n_eps));
      raw.emplace_back(dm, static_cast<double>(*s.n_eps));
    }
    for (const auto& t : trials)
      if (t.gamma.sigma == sigma && t.queries > 0 && main_series(t.depth, t.scheme))
        queries.emplace_back(static_cast<double>(t.n), static_cast<double>(t.queries));
    txt << "\nsigma=" << format_double(sigma) << ", depth 1, tuned width\n";
    if (!samples.empty()) {
      txt << "  eps N_eps = " << format_double(unit_slope_constant(samples)) << " dM (unit-slope fit)\n";
      if (distinct_x(raw))
        txt << "  slope of log N_eps on log dM: " << format_double(fit_reference(raw).slope) << '\n';
    }
    if (!queries.empty()) {
      txt << "  T = " << format_double(unit_slope_constant(queries)) << " N (unit-slope fit)";
      if (distinct_x(queries)) txt << ", slope " << format_double(fit_reference(queries).slope);
      txt << '\n';
    }
  }
  const auto txt_path = opts.out_dir / "report.txt";
  std::ofstream(txt_path) << txt.str();
  written.push_back(txt_path);
  return written;
}

}  // namespace tsbench
