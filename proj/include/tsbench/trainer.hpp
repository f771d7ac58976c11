#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "tsbench/lr_finder.hpp"
#include "tsbench/random.hpp"
#include "tsbench/student.hpp"
#include "tsbench/teacher.hpp"

namespace tsbench {

struct TrainOptions {
  std::size_t batch_size = 64;
  int max_epochs = 1500;
  /// Stop once the best validation loss has not dropped by more than
  /// `early_stop_rel` within this many epochs. 0 disables early stopping.
  int early_stop_window = 24;
  double early_stop_rel = 0.01;
  int plateau_patience = 12;
  double plateau_threshold = 1e-4;
  LrFinderOptions finder;
  bool keep_epoch_log = false;
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0;
};

struct TrainReport {
  double best_val_loss = 0.0;
  int best_epoch = 0;  // 1-based; 0 means the initial weights
  int epochs_run = 0;
  std::size_t queries = 0;
  std::size_t finder_queries = 0;
  std::size_t finder_steps = 0;
  double initial_lr = 0.0;
  bool lr_fallback = false;
  bool diverged = false;  // a non-finite loss ended the run early
  bool capped = false;    // hit max_epochs
  StudentNet best_params;
  std::vector<double> val_history;  // one entry per epoch run
  std::vector<EpochLog> log;        // filled when keep_epoch_log is set
};

/// Uniform random 80/20 partition; the training part has round(0.8 N) rows,
/// clamped so both parts are non-empty. Throws InsufficientDataError for N < 2.
std::pair<Dataset, Dataset> split_dataset(const Dataset& s, RandomSource& rng);

/// One training run at a fixed architecture on an existing split: LR range
/// test, then Adam epochs with plateau decay and early stopping. Returns the
/// best-validation checkpoint.
TrainReport train_on_split(const Dataset& train, const Dataset& val, int depth,
                           std::size_t width, RandomSource& rng, const TrainOptions& opts = {});

/// split_dataset followed by train_on_split.
TrainReport train(const Gamma& gamma, const Dataset& s, int depth, std::size_t width,
                  RandomSource& rng, const TrainOptions& opts = {});

/// Columns epoch, train_loss, val_loss, lr.
void write_epoch_log_csv(const TrainReport& report, const std::filesystem::path& path);

}  // namespace tsbench
