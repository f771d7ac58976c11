#include "tsbench/lr_finder.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "tsbench/errors.hpp"
#include "tsbench/format.hpp"
#include "tsbench/optimizer.hpp"
#include "tsbench/student.hpp"
#include "tsbench/teacher.hpp"

namespace tsbench {

LrFinderResult lr_range_test(const std::function<double(double)>& step,
                             const LrFinderOptions& opts) {
  LrFinderResult result;
  const double log_ratio = std::log(10.0) / opts.steps_per_decade;
  double avg = 0.0;
  double running_min = std::numeric_limits<double>::infinity();
  for (int i = 0;; ++i) {
    const double lr = opts.start_lr * std::exp(log_ratio * i);
    if (lr > opts.max_lr * (1.0 + 1e-9)) break;
    const double loss = step(lr);
    ++result.steps;
    if (!std::isfinite(loss)) break;
    avg = opts.smoothing * avg + (1.0 - opts.smoothing) * loss;
    const double smoothed = avg / (1.0 - std::pow(opts.smoothing, i + 1));
    result.trace.push_back({lr, smoothed});
    running_min = std::min(running_min, smoothed);
    if (smoothed > opts.divergence_factor * running_min) break;
  }
  suggest_learning_rates(result, opts);
  return result;
}

void suggest_learning_rates(LrFinderResult& result, const LrFinderOptions& opts) {
  std::span<const LrTracePoint> trace = result.trace;
  if (trace.size() > opts.skip_start + opts.skip_end + 2)
    trace = trace.subspan(opts.skip_start, trace.size() - opts.skip_start - opts.skip_end);
  auto fall_back = [&] {
    result.fallback = true;
    result.lr_steep = result.lr_minimum = result.lr_valley = opts.fallback_lr;
    result.chosen = opts.fallback_lr;
  };
  if (trace.size() < 2) {
    fall_back();
    return;
  }

  auto log_loss = [&](std::size_t i) { return std::log(std::max(trace[i].smoothed_loss, 1e-300)); };

  // Steep: window with the most negative change in log loss; reported at
  // the window's geometric midpoint.
  const std::size_t window = std::clamp<std::size_t>(opts.steep_window, 1, trace.size() - 1);
  std::size_t steep = 0;
  double steepest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + window < trace.size(); ++i) {
    const double slope = log_loss(i + window) - log_loss(i);
    if (slope < steepest) {
      steepest = slope;
      steep = i;
    }
  }
  if (!(steepest < 0.0)) {
    fall_back();
    return;
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < trace.size(); ++i)
    if (trace[i].smoothed_loss < trace[best].smoothed_loss) best = i;

  // Valley: longest run of points within the band above the minimum.
  const double band = (1.0 + opts.valley_band) * trace[best].smoothed_loss;
  std::size_t run_begin = best;
  std::size_t run_end = best;
  for (std::size_t i = 0; i < trace.size();) {
    if (trace[i].smoothed_loss > band) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < trace.size() && trace[j + 1].smoothed_loss <= band) ++j;
    if (j - i > run_end - run_begin) {
      run_begin = i;
      run_end = j;
    }
    i = j + 1;
  }

  result.fallback = false;
  result.lr_steep = std::sqrt(trace[steep].lr * trace[steep + window].lr);
  result.lr_minimum = trace[best].lr / opts.minimum_divisor;
  result.lr_valley = std::sqrt(trace[run_begin].lr * trace[run_end].lr);
  std::array<double, 3> lrs{result.lr_steep, result.lr_minimum, result.lr_valley};
  std::sort(lrs.begin(), lrs.end());
  result.chosen = lrs[1];
}

LrFinderResult lr_find(const StudentNet& net, const Dataset& train, RandomSource& rng,
                       const LrFinderOptions& opts) {
  if (train.size() == 0) throw InsufficientDataError("lr_find: empty training set");
  StudentNet probe = net;
  AdamState adam(probe.parameter_count(), opts.start_lr);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t pos = 0;
  std::size_t queries = 0;

  const std::size_t d = train.dim();
  std::vector<double> xb;
  std::vector<double> yb;
  ForwardCache cache;
  GradientSet grads;
  BackwardWorkspace work;

  auto step = [&](double lr) {
    if (pos == 0) rng.shuffle(std::span<std::size_t>(order));
    const std::size_t b = std::min(opts.batch_size, order.size() - pos);
    xb.resize(b * d);
    yb.resize(b);
    for (std::size_t k = 0; k < b; ++k) {
      auto row = train.xs.row(order[pos + k]);
      std::copy(row.begin(), row.end(), xb.begin() + k * d);
      yb[k] = train.ys[order[pos + k]];
    }
    pos += b;
    if (pos == order.size()) pos = 0;
    queries += b;

    forward(probe, xb, b, cache);
    const double loss = backward(probe, cache, yb, grads, work);
    adam.lr = lr;
    adam_step(adam, probe.parameters(), grads.values);
    return loss;
  };

  LrFinderResult result = lr_range_test(step, opts);
  result.queries = queries;
  return result;
}

void write_lr_trace_csv(const LrFinderResult& result, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "lr,smoothed_loss\n";
  for (const auto& p : result.trace)
    out << format_double(p.lr) << ',' << format_double(p.smoothed_loss) << '\n';
}

}  // namespace tsbench
