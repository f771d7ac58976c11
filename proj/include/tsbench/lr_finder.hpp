#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <vector>

#include "tsbench/random.hpp"

namespace tsbench {

class StudentNet;
struct Dataset;

struct LrFinderOptions {
  double start_lr = 1e-8;
  double max_lr = 10.0;
  int steps_per_decade = 100;
  double smoothing = 0.98;        // exponential moving average factor
  double divergence_factor = 4.0; // stop when smoothed loss > factor * running min
  double minimum_divisor = 20.0;
  double valley_band = 0.05;
  double fallback_lr = 1e-3;
  /// Trace points ignored by the suggestions at either end: the debiased
  /// average is noisy for the first few steps and the last few are diverging.
  std::size_t skip_start = 10;
  std::size_t skip_end = 5;
  /// The steep suggestion differences log loss across this many steps;
  /// single-step differences are dominated by mini-batch noise.
  std::size_t steep_window = 20;
  std::size_t batch_size = 64;
};

struct LrTracePoint {
  double lr = 0.0;
  double smoothed_loss = 0.0;
};

struct LrFinderResult {
  double lr_steep = 0.0;
  double lr_minimum = 0.0;
  double lr_valley = 0.0;
  double chosen = 0.0;   // median of the three
  bool fallback = false; // no finite decrease was seen; chosen is the fallback lr
  std::vector<LrTracePoint> trace;
  std::size_t steps = 0;
  std::size_t queries = 0;
};

/// Runs the exponential ramp. `step(lr)` must perform one optimization step
/// at that rate and return the loss of the batch it used (measured before
/// the update). Stops on divergence, a non-finite loss, or the lr cap, then
/// fills in the suggestions.
LrFinderResult lr_range_test(const std::function<double(double)>& step,
                             const LrFinderOptions& opts = {});

/// The steep / minimum / valley suggestions and their median for a trace.
/// Sets `fallback` when the smoothed loss never decreases.
void suggest_learning_rates(LrFinderResult& result, const LrFinderOptions& opts = {});

/// LR range test of a copy of `net` trained with Adam on mini-batches of
/// `train` (reshuffled on every pass). The copy is discarded; `net` is not
/// touched. queries = sum of batch sizes consumed.
LrFinderResult lr_find(const StudentNet& net, const Dataset& train, RandomSource& rng,
                       const LrFinderOptions& opts = {});

/// Columns lr, smoothed_loss.
void write_lr_trace_csv(const LrFinderResult& result, const std::filesystem::path& path);

}  // namespace tsbench
