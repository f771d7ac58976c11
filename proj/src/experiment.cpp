#include "tsbench/experiment.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <ostream>
#include <tuple>

#include <omp.h>

#include "tsbench/errors.hpp"
#include "tsbench/kernels.hpp"
#include "tsbench/results_io.hpp"

namespace tsbench {

std::vector<double> squared_error_terms(const StudentNet& student, const TeacherNet& g,
                                        std::size_t n_mc, RandomSource& rng) {
  if (n_mc < 1) throw ValidationError("estimate_error: n_mc must be >= 1");
  const std::size_t d = g.a.cols();
  if (student.input_dim() != d) throw ShapeError("estimate_error: student and teacher dimensions differ");
  Matrix xs(n_mc, d);
  rng.fill_normal(xs.data());
  const std::vector<double> predicted = predict(student, xs);
  const std::vector<double> truth = teacher_forward_batch(g, xs);
  std::vector<double> terms(n_mc);
#pragma omp parallel for schedule(static) if (n_mc >= kernels::kParallelThreshold)
  for (std::size_t j = 0; j < n_mc; ++j) {
    const double diff = predicted[j] - truth[j];
    terms[j] = diff * diff;
  }
  return terms;
}

double estimate_error(const StudentNet& student, const TeacherNet& g, double sigma,
                      std::size_t n_mc, RandomSource& rng) {
  const std::vector<double> terms = squared_error_terms(student, g, n_mc, rng);
  double sum = 0.0;
  for (double t : terms) sum += t;
  return sum / static_cast<double>(n_mc) / (2.0 * sigma * sigma);
}

std::uint64_t trial_seed(std::uint64_t master, const Gamma& gamma, std::size_t n,
                         std::size_t trial) {
  std::uint64_t h = hash_combine(master, gamma.d);
  h = hash_combine(h, gamma.m);
  h = hash_combine(h, std::bit_cast<std::uint64_t>(gamma.sigma));
  h = hash_combine(h, n);
  return hash_combine(h, trial);
}

TrialRun run_trial_detailed(const Gamma& gamma, std::size_t n, int depth,
                            const WidthScheme& scheme, std::uint64_t seed,
                            std::size_t trial_index, const TrialOptions& opts) {
  gamma.validate();
  RandomSource rng(seed);
  RandomSource teacher_rng = rng.child(0);
  RandomSource data_rng = rng.child(1);
  RandomSource search_rng = rng.child(2);
  RandomSource eval_rng = rng.child(3);

  TrialRun run{{}, sample_teacher(gamma, teacher_rng), {}};
  const Dataset data = generate_dataset(run.teacher, n, data_rng);
  run.search = select_and_train(gamma, data, depth, scheme, search_rng, opts.train);

  TrialResult& r = run.result;
  r.gamma = gamma;
  r.depth = depth;
  r.scheme = scheme.variant;
  r.n = n;
  r.trial = trial_index;
  r.seed = seed;
  r.queries = run.search.total_queries;
  r.width = run.search.best_width;
  if (run.search.failed) {
    r.error = std::numeric_limits<double>::infinity();
    r.flag = "failed";
  } else {
    r.error = estimate_error(run.search.best_report.best_params, run.teacher, gamma.sigma,
                             opts.n_mc, eval_rng);
    r.flag = run.search.lr_fallback ? "lr_fallback" : "none";
  }
  return run;
}

TrialResult run_trial(const Gamma& gamma, std::size_t n, int depth, const WidthScheme& scheme,
                      std::uint64_t seed, std::size_t trial_index, const TrialOptions& opts) {
  return run_trial_detailed(gamma, n, depth, scheme, seed, trial_index, opts).result;
}

std::vector<double> SweepConfig::epsilons_for(const Gamma& gamma) const {
  for (const auto& o : epsilon_overrides)
    if (o.d == gamma.d && o.m == gamma.m) return o.epsilons;
  return epsilons;
}

void SweepConfig::validate() const {
  if (d_list.empty() || m_list.empty() || sigmas.empty())
    throw ValidationError("config: d, M and sigma lists must be non-empty");
  for (auto d : d_list)
    for (auto m : m_list)
      for (auto s : sigmas) Gamma{d, m, s}.validate();
  if (depths.empty() || schemes.empty()) throw ValidationError("config: depth and scheme must be set");
  for (int depth : depths)
    if (depth < 1 || depth > 3) throw ValidationError("config: depth must be 1, 2 or 3");
  if (trials < 1) throw ValidationError("config: trials must be >= 1");
  if (n0 < 2) throw ValidationError("config: n0 must be >= 2");
  if (n_cap < n0) throw ValidationError("config: n_cap must be >= n0");
  for (auto n : n_list)
    if (n < 2) throw ValidationError("config: every entry of n_list must be >= 2");
  if (n_mc < 1) throw ValidationError("config: n_mc must be >= 1");
  auto check_eps = [](const std::vector<double>& eps) {
    if (eps.empty()) throw ValidationError("config: epsilon list must be non-empty");
    for (double e : eps)
      if (!(e > 0.0)) throw ValidationError("config: epsilon targets must be > 0");
  };
  check_eps(epsilons);
  for (const auto& o : epsilon_overrides) check_eps(o.epsilons);
}

namespace {

using CellKey = std::tuple<std::size_t, std::size_t, double, int, int, std::size_t>;

CellKey cell_key(const Gamma& g, int depth, WidthVariant scheme, std::size_t n) {
  return {g.d, g.m, g.sigma, depth, static_cast<int>(scheme), n};
}

using TrialKey = std::tuple<CellKey, std::size_t>;

}  // namespace

std::vector<CellSummary> summarize_cells(const std::vector<TrialResult>& trials) {
  std::map<CellKey, std::map<std::size_t, const TrialResult*>> groups;
  for (const auto& t : trials) groups[cell_key(t.gamma, t.depth, t.scheme, t.n)].emplace(t.trial, &t);

  std::vector<CellSummary> cells;
  for (const auto& [key, rows] : groups) {
    const TrialResult& first = *rows.begin()->second;
    CellSummary c{first.gamma, first.depth, first.scheme, first.n, rows.size(), 0.0, 0.0};
    double err = 0.0;
    double q = 0.0;
    for (const auto& [idx, row] : rows) {
      err += row->error;
      q += static_cast<double>(row->queries);
    }
    c.mean_error = err / static_cast<double>(rows.size());
    c.mean_queries = q / static_cast<double>(rows.size());
    cells.push_back(c);
  }
  return cells;
}

std::vector<SampleComplexity> sample_complexity(
    const std::vector<CellSummary>& cells,
    const std::function<std::vector<double>(const Gamma&)>& epsilons_for) {
  // Cells arrive sorted by (gamma, depth, scheme, N); walk each group.
  std::vector<SampleComplexity> out;
  std::size_t i = 0;
  while (i < cells.size()) {
    std::size_t j = i;
    auto same_group = [&](const CellSummary& a, const CellSummary& b) {
      return a.gamma == b.gamma && a.depth == b.depth && a.scheme == b.scheme;
    };
    while (j < cells.size() && same_group(cells[i], cells[j])) ++j;
    std::vector<CellSummary> group(cells.begin() + i, cells.begin() + j);
    std::sort(group.begin(), group.end(), [](const auto& a, const auto& b) { return a.n < b.n; });
    for (double eps : epsilons_for(cells[i].gamma)) {
      SampleComplexity sc{cells[i].gamma, cells[i].depth, cells[i].scheme, eps, std::nullopt,
                          group.back().n};
      for (const auto& c : group) {
        if (c.mean_error <= eps) {
          sc.n_eps = c.n;
          break;
        }
      }
      out.push_back(sc);
    }
    i = j;
  }
  return out;
}

SweepResult run_sweep(const SweepConfig& config, std::ostream* progress) {
  config.validate();
  const std::filesystem::path out_dir = config.out_dir.empty() ? "results" : config.out_dir;
  std::filesystem::create_directories(out_dir);
  const auto csv_path = out_dir / "results.csv";
  const auto summary_path = out_dir / "summary.json";
  const auto evals_path = out_dir / "evaluations.csv";

  std::vector<TrialResult> rows;
  std::map<TrialKey, std::size_t> done;  // key -> index into rows
  for (auto& r : read_results_csv(csv_path)) {
    TrialKey key{cell_key(r.gamma, r.depth, r.scheme, r.n), r.trial};
    if (done.contains(key)) continue;
    done.emplace(key, rows.size());
    rows.push_back(std::move(r));
  }

  TrialOptions trial_opts;
  trial_opts.n_mc = config.n_mc;
  trial_opts.train = config.train;
  const int threads = config.parallelism > 0 ? config.parallelism : omp_get_max_threads();

  auto ensure_cell = [&](const Gamma& gamma, int depth, const WidthScheme& scheme,
                         std::size_t n) {
    const CellKey ck = cell_key(gamma, depth, scheme.variant, n);
    std::vector<std::size_t> missing;
    for (std::size_t t = 0; t < config.trials; ++t)
      if (!done.contains(TrialKey{ck, t})) missing.push_back(t);

    std::vector<TrialResult> fresh(missing.size());
    std::vector<std::vector<WidthEvaluation>> evaluations(missing.size());
    std::vector<std::exception_ptr> errors(missing.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::size_t i = 0; i < missing.size(); ++i) {
      try {
        const std::size_t t = missing[i];
        TrialRun run = run_trial_detailed(gamma, n, depth, scheme,
                                          trial_seed(config.seed, gamma, n, t), t, trial_opts);
        fresh[i] = std::move(run.result);
        evaluations[i] = std::move(run.search.evaluations);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);

    for (std::size_t i = 0; i < fresh.size(); ++i)
      append_evaluations_csv(evals_path, fresh[i], evaluations[i]);
    append_results_csv(csv_path, fresh);
    for (auto& r : fresh) {
      done.emplace(TrialKey{ck, r.trial}, rows.size());
      rows.push_back(std::move(r));
    }
    std::vector<TrialResult> cell;
    for (std::size_t t = 0; t < config.trials; ++t) cell.push_back(rows[done.at(TrialKey{ck, t})]);
    return std::pair{cell, missing.size()};
  };

  auto current_result = [&] {
    SweepResult result;
    result.trials = rows;
    result.cells = summarize_cells(rows);
    result.n_eps = sample_complexity(result.cells,
                                     [&](const Gamma& g) { return config.epsilons_for(g); });
    return result;
  };

  for (std::size_t d : config.d_list) {
    for (std::size_t m : config.m_list) {
      for (double sigma : config.sigmas) {
        const Gamma gamma{d, m, sigma};
        const auto eps = config.epsilons_for(gamma);
        const double target = *std::min_element(eps.begin(), eps.end());
        for (int depth : config.depths) {
          for (WidthVariant variant : config.schemes) {
            std::size_t list_pos = 0;
            std::size_t n = config.n_list.empty() ? config.n0 : config.n_list.front();
            while (true) {
              WidthScheme scheme{variant, 0};
              if (variant == WidthVariant::best) {
                auto [tuned, ran] = ensure_cell(gamma, depth, {WidthVariant::tune, 0}, n);
                std::vector<std::size_t> widths;
                for (const auto& t : tuned)
                  if (!t.flagged() || t.flag == "lr_fallback") widths.push_back(t.width);
                scheme.width = median_width(widths);
              }
              auto [cell, ran] = ensure_cell(gamma, depth, scheme, n);
              double mean = 0.0;
              for (const auto& t : cell) mean += t.error;
              mean /= static_cast<double>(cell.size());
              if (progress) {
                *progress << "d=" << d << " M=" << m << " sigma=" << sigma << " depth=" << depth
                          << " scheme=" << to_string(variant) << " N=" << n
                          << " mean_error=" << mean << " (" << ran << " new trials)" << std::endl;
              }
              write_summary_json(summary_path, config, current_result());

              if (!config.n_list.empty()) {
                if (++list_pos == config.n_list.size()) break;
                n = config.n_list[list_pos];
                continue;
              }
              if (mean <= target || n * 2 > config.n_cap) break;
              n *= 2;
            }
          }
        }
      }
    }
  }
  SweepResult result = current_result();
  write_summary_json(summary_path, config, result);
  return result;
}

}  // namespace tsbench
