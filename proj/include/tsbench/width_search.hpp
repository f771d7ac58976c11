#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "tsbench/random.hpp"
#include "tsbench/teacher.hpp"
#include "tsbench/trainer.hpp"

namespace tsbench {

enum class WidthVariant { same, four_m, tune, best };

/// How the student width is chosen. `width` is only used by `best`, where it
/// holds the median of previously tuned widths.
struct WidthScheme {
  WidthVariant variant = WidthVariant::tune;
  std::size_t width = 0;
};

std::string_view to_string(WidthVariant v);
/// Accepts same, 4M / four_m, tune, best. Throws ValidationError otherwise.
WidthVariant parse_width_variant(std::string_view s);

/// Largest width searched for a student of the given depth:
///   1: 32 + 8 max(N, sqrt(dM) + max(d, M))
///   2: 32 + 2 max(2 sqrt(N), 2 sqrt(dM) + 2 max(d, M))
///   3: 16 + 2 max(2 sqrt(N), 2 sqrt(dM) + 2 max(d, M))
std::size_t max_width(std::size_t n, std::size_t d, std::size_t m, int depth);

struct GoldenSectionResult {
  double best_point = 0.0;
  double best_value = 0.0;
  std::vector<std::pair<double, double>> evaluations;  // (point, value) in call order
  int iterations = 0;
};

/// Golden-section minimization of f on [lo, hi]; contracts until the bracket
/// is no wider than tol. Returns the best point actually evaluated.
GoldenSectionResult golden_section_minimize(const std::function<double(double)>& f, double lo,
                                            double hi, double tol);

struct WidthEvaluation {
  std::size_t width = 0;
  double val_loss = 0.0;
  std::size_t queries = 0;
  bool flagged = false;
};

struct WidthTuneResult {
  std::size_t best_width = 0;
  std::vector<WidthEvaluation> evaluations;  // distinct widths, in first-evaluation order
  int probes = 0;                            // golden-section probes, including repeats
};

/// Golden-section search over log2(width) on [log2 2, log2 max_w]. Each probe
/// rounds 2^u to the nearest integer in [2, max_w]; a width already
/// evaluated is answered from the cache. Flagged widths count as +inf.
WidthTuneResult tune_width(const std::function<WidthEvaluation(std::size_t)>& evaluate,
                           std::size_t max_w, double tol = 0.25);

struct SearchOutcome {
  std::size_t best_width = 0;
  TrainReport best_report;
  std::vector<WidthEvaluation> evaluations;
  std::size_t total_queries = 0;
  bool lr_fallback = false;  // the selected run's LR finder fell back
  bool failed = false;       // no width produced a usable model
};

/// Picks the width per `scheme` and trains. All widths share one 80/20 split;
/// each width gets its own generator keyed by the width.
SearchOutcome select_and_train(const Gamma& gamma, const Dataset& s, int depth,
                               const WidthScheme& scheme, RandomSource& rng,
                               const TrainOptions& opts = {});

/// Median of tuned widths (mean of the two middle values, rounded, for even counts).
std::size_t median_width(std::vector<std::size_t> widths);

}  // namespace tsbench
