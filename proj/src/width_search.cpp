#include "tsbench/width_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

#include "tsbench/errors.hpp"

namespace tsbench {

std::string_view to_string(WidthVariant v) {
  switch (v) {
    case WidthVariant::same: return "same";
    case WidthVariant::four_m: return "4M";
    case WidthVariant::tune: return "tune";
    case WidthVariant::best: return "best";
  }
  return "?";
}

WidthVariant parse_width_variant(std::string_view s) {
  if (s == "same") return WidthVariant::same;
  if (s == "4M" || s == "four_m" || s == "4m") return WidthVariant::four_m;
  if (s == "tune") return WidthVariant::tune;
  if (s == "best") return WidthVariant::best;
  throw ValidationError("unknown width scheme '" + std::string(s) + "'");
}

std::size_t max_width(std::size_t n, std::size_t d, std::size_t m, int depth) {
  const double nn = static_cast<double>(n);
  const double dd = static_cast<double>(d);
  const double mm = static_cast<double>(m);
  const double arch = std::sqrt(dd * mm) + std::max(dd, mm);
  double w = 0.0;
  switch (depth) {
    case 1: w = 32.0 + 8.0 * std::max(nn, arch); break;
    case 2: w = 32.0 + 2.0 * std::max(2.0 * std::sqrt(nn), 2.0 * arch); break;
    case 3: w = 16.0 + 2.0 * std::max(2.0 * std::sqrt(nn), 2.0 * arch); break;
    default: throw ValidationError("max_width: depth must be 1, 2 or 3");
  }
  return static_cast<std::size_t>(std::floor(w));
}

GoldenSectionResult golden_section_minimize(const std::function<double(double)>& f, double lo,
                                            double hi, double tol) {
  if (!(lo < hi)) throw ValidationError("golden_section_minimize: need lo < hi");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  GoldenSectionResult r;
  auto eval = [&](double u) {
    const double v = f(u);
    r.evaluations.emplace_back(u, v);
    return v;
  };

  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eval(d);
    }
    ++r.iterations;
  }

  auto best = std::min_element(r.evaluations.begin(), r.evaluations.end(),
                               [](const auto& x, const auto& y) { return x.second < y.second; });
  r.best_point = best->first;
  r.best_value = best->second;
  return r;
}

WidthTuneResult tune_width(const std::function<WidthEvaluation(std::size_t)>& evaluate,
                           std::size_t max_w, double tol) {
  if (max_w < 2) throw ValidationError("tune_width: max width must be >= 2");
  WidthTuneResult result;
  std::map<std::size_t, std::size_t> index_of;  // width -> evaluations index

  auto width_of = [&](double u) {
    const double w = std::round(std::exp2(u));
    return static_cast<std::size_t>(std::clamp(w, 2.0, static_cast<double>(max_w)));
  };
  auto objective = [&](double u) {
    ++result.probes;
    const std::size_t w = width_of(u);
    auto it = index_of.find(w);
    if (it == index_of.end()) {
      WidthEvaluation e = evaluate(w);
      e.width = w;
      it = index_of.emplace(w, result.evaluations.size()).first;
      result.evaluations.push_back(e);
    }
    const auto& e = result.evaluations[it->second];
    return e.flagged ? std::numeric_limits<double>::infinity() : e.val_loss;
  };

  if (max_w == 2) {
    objective(1.0);
  } else {
    golden_section_minimize(objective, 1.0, std::log2(static_cast<double>(max_w)), tol);
  }

  // Lowest finite loss wins; ties go to the first evaluated width.
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < result.evaluations.size(); ++i) {
    const auto& e = result.evaluations[i];
    if (e.flagged || !std::isfinite(e.val_loss)) continue;
    if (!best || e.val_loss < result.evaluations[*best].val_loss) best = i;
  }
  result.best_width = best ? result.evaluations[*best].width : 0;
  return result;
}

std::size_t median_width(std::vector<std::size_t> widths) {
  if (widths.empty()) throw ValidationError("median_width: no widths");
  std::sort(widths.begin(), widths.end());
  const std::size_t n = widths.size();
  if (n % 2 == 1) return widths[n / 2];
  return static_cast<std::size_t>(
      std::llround((static_cast<double>(widths[n / 2 - 1]) + static_cast<double>(widths[n / 2])) / 2.0));
}

SearchOutcome select_and_train(const Gamma& gamma, const Dataset& s, int depth,
                               const WidthScheme& scheme, RandomSource& rng,
                               const TrainOptions& opts) {
  gamma.validate();
  if (s.dim() != gamma.d) throw ShapeError("select_and_train: dataset dimension differs from gamma.d");
  RandomSource split_rng = rng.child(0);
  auto [train_part, val_part] = split_dataset(s, split_rng);

  std::map<std::size_t, TrainReport> reports;
  auto evaluate = [&](std::size_t width) {
    RandomSource width_rng = rng.child(1).child(width);
    TrainReport rep = train_on_split(train_part, val_part, depth, width, width_rng, opts);
    WidthEvaluation e{width, rep.best_val_loss, rep.queries,
                      rep.diverged || !std::isfinite(rep.best_val_loss)};
    reports.emplace(width, std::move(rep));
    return e;
  };

  SearchOutcome out;
  if (scheme.variant == WidthVariant::tune) {
    const auto tuned = tune_width(evaluate, max_width(s.size(), gamma.d, gamma.m, depth));
    out.evaluations = tuned.evaluations;
    out.best_width = tuned.best_width;
  } else {
    std::size_t width = 0;
    switch (scheme.variant) {
      case WidthVariant::same: width = gamma.m; break;
      case WidthVariant::four_m: width = 4 * gamma.m; break;
      case WidthVariant::best: width = scheme.width; break;
      case WidthVariant::tune: break;
    }
    if (width < 1) throw ValidationError("select_and_train: scheme 'best' needs a width");
    WidthEvaluation e = evaluate(width);
    out.evaluations.push_back(e);
    out.best_width = e.flagged ? 0 : width;
  }

  for (const auto& e : out.evaluations) out.total_queries += e.queries;
  if (out.best_width == 0) {
    // Every width diverged: keep the least-bad report for diagnostics.
    out.failed = true;
    out.best_width = out.evaluations.front().width;
  }
  out.best_report = std::move(reports.at(out.best_width));
  out.lr_fallback = out.best_report.lr_fallback;
  return out;
}

}  // namespace tsbench
