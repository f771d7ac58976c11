#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tsbench/random.hpp"
#include "tsbench/student.hpp"
#include "tsbench/teacher.hpp"
#include "tsbench/trainer.hpp"
#include "tsbench/width_search.hpp"

namespace tsbench {

/// Squared errors (student(x_j) - g(x_j))^2 on n_mc fresh x_j ~ N(0, I_d),
/// drawn row-major from rng, so a longer run extends a shorter one.
std::vector<double> squared_error_terms(const StudentNet& student, const TeacherNet& g,
                                        std::size_t n_mc, RandomSource& rng);

/// Monte-Carlo estimate of E[(student(X) - g(X))^2] / (2 sigma^2).
double estimate_error(const StudentNet& student, const TeacherNet& g, double sigma,
                      std::size_t n_mc, RandomSource& rng);

/// Content-addressed seed for one trial.
std::uint64_t trial_seed(std::uint64_t master, const Gamma& gamma, std::size_t n,
                         std::size_t trial);

struct TrialOptions {
  std::size_t n_mc = 8192;
  TrainOptions train;
};

struct TrialResult {
  Gamma gamma;
  int depth = 1;
  WidthVariant scheme = WidthVariant::tune;
  std::size_t n = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double error = 0.0;
  std::size_t queries = 0;
  std::size_t width = 0;
  std::string flag = "none";  // none, lr_fallback, failed

  bool flagged() const { return flag != "none"; }
};

/// Everything a single trial produced, for the `trial` subcommand and tests.
struct TrialRun {
  TrialResult result;
  TeacherNet teacher;
  SearchOutcome search;
};

TrialRun run_trial_detailed(const Gamma& gamma, std::size_t n, int depth,
                            const WidthScheme& scheme, std::uint64_t seed,
                            std::size_t trial_index = 0, const TrialOptions& opts = {});

TrialResult run_trial(const Gamma& gamma, std::size_t n, int depth, const WidthScheme& scheme,
                      std::uint64_t seed, std::size_t trial_index = 0,
                      const TrialOptions& opts = {});

struct EpsilonOverride {
  std::size_t d = 0;
  std::size_t m = 0;
  std::vector<double> epsilons;
};

struct SweepConfig {
  std::vector<std::size_t> d_list{1};
  std::vector<std::size_t> m_list{1};
  std::vector<double> sigmas{0.1};
  std::vector<int> depths{1};
  std::vector<WidthVariant> schemes{WidthVariant::tune};
  std::vector<double> epsilons{1.0};
  std::vector<EpsilonOverride> epsilon_overrides;
  std::size_t trials = 32;
  std::size_t n0 = 16;
  std::size_t n_cap = std::size_t{1} << 20;
  /// When non-empty, run exactly these sample sizes instead of doubling
  /// until the targets are met.
  std::vector<std::size_t> n_list;
  std::uint64_t seed = 1;
  int parallelism = 0;  // 0: OpenMP default
  std::filesystem::path out_dir = "results";
  std::size_t n_mc = 8192;
  TrainOptions train;

  std::vector<double> epsilons_for(const Gamma& gamma) const;
  void validate() const;
};

/// Mean error and queries of the trials in one (gamma, depth, scheme, N) cell.
struct CellSummary {
  Gamma gamma;
  int depth = 1;
  WidthVariant scheme = WidthVariant::tune;
  std::size_t n = 0;
  std::size_t trials = 0;
  double mean_error = 0.0;
  double mean_queries = 0.0;
};

/// Smallest tested N whose mean error is at most epsilon; empty when no
/// tested N reached it.
struct SampleComplexity {
  Gamma gamma;
  int depth = 1;
  WidthVariant scheme = WidthVariant::tune;
  double epsilon = 0.0;
  std::optional<std::size_t> n_eps;
  std::size_t largest_n = 0;
};

struct SweepResult {
  std::vector<TrialResult> trials;
  std::vector<CellSummary> cells;
  std::vector<SampleComplexity> n_eps;
};

/// Groups trials into cells (sorted by gamma, depth, scheme, N).
std::vector<CellSummary> summarize_cells(const std::vector<TrialResult>& trials);

std::vector<SampleComplexity> sample_complexity(
    const std::vector<CellSummary>& cells,
    const std::function<std::vector<double>(const Gamma&)>& epsilons_for);

/// Runs the sweep, resuming from <out_dir>/results.csv if present, appending
/// each finished cell, and rewriting <out_dir>/summary.json after each cell.
SweepResult run_sweep(const SweepConfig& config, std::ostream* progress = nullptr);

}  // namespace tsbench
