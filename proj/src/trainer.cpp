#include "tsbench/trainer.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "tsbench/errors.hpp"
#include "tsbench/format.hpp"
#include "tsbench/optimizer.hpp"

namespace tsbench {

std::pair<Dataset, Dataset> split_dataset(const Dataset& s, RandomSource& rng) {
  const std::size_t n = s.size();
  if (n < 2) throw InsufficientDataError("split_dataset: need at least 2 samples, got " + std::to_string(n));
  auto n_train = static_cast<std::size_t>(std::llround(0.8 * static_cast<double>(n)));
  n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));
  std::span<const std::size_t> all(order);
  return {s.subset(all.first(n_train)), s.subset(all.subspan(n_train))};
}

TrainReport train_on_split(const Dataset& train, const Dataset& val, int depth,
                           std::size_t width, RandomSource& rng, const TrainOptions& opts) {
  if (train.size() == 0 || val.size() == 0) throw InsufficientDataError("train: empty split");
  if (train.dim() != val.dim()) throw ShapeError("train: split dimensions differ");
  const std::size_t d = train.dim();

  RandomSource init_rng = rng.child(0);
  RandomSource finder_rng = rng.child(1);
  RandomSource epoch_rng = rng.child(2);

  StudentNet net = init_student(d, depth, width, init_rng);

  TrainReport report;
  LrFinderOptions finder_opts = opts.finder;
  finder_opts.batch_size = opts.batch_size;
  const LrFinderResult finder = lr_find(net, train, finder_rng, finder_opts);
  report.finder_queries = finder.queries;
  report.finder_steps = finder.steps;
  report.queries = finder.queries;
  report.initial_lr = finder.chosen;
  report.lr_fallback = finder.fallback;

  AdamState adam(net.parameter_count(), finder.chosen);
  PlateauScheduler scheduler(finder.chosen, opts.plateau_patience, opts.plateau_threshold);

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> xb;
  std::vector<double> yb;
  ForwardCache cache;
  GradientSet grads;
  BackwardWorkspace work;

  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_after;  // best_after[e] = best val loss after epoch e (0 = none yet)
  best_after.push_back(best);
  report.best_params = net;

  for (int epoch = 1; epoch <= opts.max_epochs; ++epoch) {
    epoch_rng.shuffle(std::span<std::size_t>(order));
    double train_sum = 0.0;
    for (std::size_t pos = 0; pos < order.size(); pos += opts.batch_size) {
      const std::size_t b = std::min(opts.batch_size, order.size() - pos);
      xb.resize(b * d);
      yb.resize(b);
      for (std::size_t k = 0; k < b; ++k) {
        auto row = train.xs.row(order[pos + k]);
        std::copy(row.begin(), row.end(), xb.begin() + k * d);
        yb[k] = train.ys[order[pos + k]];
      }
      forward(net, xb, b, cache);
      const double loss = backward(net, cache, yb, grads, work);
      report.queries += b;
      if (!std::isfinite(loss)) {
        report.diverged = true;
        break;
      }
      train_sum += loss * static_cast<double>(b);
      adam_step(adam, net.parameters(), grads.values);
    }
    if (report.diverged) break;
    if (!net.all_finite()) {
      report.diverged = true;
      break;
    }

    const double val_loss = mean_squared_error(net, val.xs, val.ys);
    if (!std::isfinite(val_loss)) {
      report.diverged = true;
      break;
    }
    report.epochs_run = epoch;
    report.val_history.push_back(val_loss);
    if (opts.keep_epoch_log) {
      report.log.push_back(
          {epoch, train_sum / static_cast<double>(train.size()), val_loss, adam.lr});
    }
    if (val_loss < best) {
      best = val_loss;
      report.best_params = net;
      report.best_epoch = epoch;
    }
    best_after.push_back(best);
    adam.lr = scheduler.update(val_loss);

    const int window = opts.early_stop_window;
    if (window > 0 && epoch > window &&
        !(best_after[epoch] < (1.0 - opts.early_stop_rel) * best_after[epoch - window])) {
      break;
    }
  }
  report.capped = !report.diverged && report.epochs_run == opts.max_epochs;

  if (std::isfinite(best)) {
    report.best_val_loss = best;
  } else {
    // Nothing finite was ever logged; fall back to the initial weights.
    report.best_val_loss = mean_squared_error(report.best_params, val.xs, val.ys);
    if (!std::isfinite(report.best_val_loss))
      report.best_val_loss = std::numeric_limits<double>::infinity();
  }
  return report;
}

TrainReport train(const Gamma& gamma, const Dataset& s, int depth, std::size_t width,
                  RandomSource& rng, const TrainOptions& opts) {
  gamma.validate();
  if (s.dim() != gamma.d) throw ShapeError("train: dataset dimension differs from gamma.d");
  RandomSource split_rng = rng.child(100);
  auto [train_part, val_part] = split_dataset(s, split_rng);
  RandomSource run_rng = rng.child(101);
  return train_on_split(train_part, val_part, depth, width, run_rng, opts);
}

void write_epoch_log_csv(const TrainReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "epoch,train_loss,val_loss,lr\n";
  for (const auto& e : report.log) {
    out << e.epoch << ',' << format_double(e.train_loss) << ',' << format_double(e.val_loss) << ','
        << format_double(e.lr) << '\n';
  }
}

}  // namespace tsbench
