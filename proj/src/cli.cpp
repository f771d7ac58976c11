#include "tsbench/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "tsbench/config.hpp"
#include "tsbench/experiment.hpp"
#include "tsbench/lambda_study.hpp"
#include "tsbench/lr_finder.hpp"
#include "tsbench/report.hpp"
#include "tsbench/results_io.hpp"
#include "tsbench/selftest.hpp"

namespace tsbench {

namespace {

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::string> out;
  std::optional<int> parallelism;
};

// Flags win over config values, which win over the environment.
std::filesystem::path resolve_out_dir(const GlobalFlags& g, const std::filesystem::path& from_config,
                                      const char* fallback) {
  if (g.out) return *g.out;
  if (!from_config.empty()) return from_config;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return fallback;
}

struct TeacherFlags {
  std::size_t d = 4;
  std::size_t m = 4;
  double sigma = 0.1;
  std::size_t n = 256;
  int depth = 1;
};

void add_teacher_flags(CLI::App* cmd, TeacherFlags& t) {
  cmd->add_option("--d", t.d, "input dimension")->check(CLI::PositiveNumber);
  cmd->add_option("--M", t.m, "teacher width")->check(CLI::PositiveNumber);
  cmd->add_option("--sigma", t.sigma, "label noise standard deviation")->check(CLI::PositiveNumber);
  cmd->add_option("--N", t.n, "number of samples")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 30));
  cmd->add_option("--depth", t.depth, "student hidden layers")->check(CLI::Range(1, 3));
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Teacher-student sample complexity benchmark"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags global;
  app.add_option("--seed", global.seed, "master seed");
  app.add_option("--trials", global.trials, "trials per cell");
  app.add_option("--out", global.out, "output directory");
  app.add_option("--parallelism", global.parallelism, "worker threads (0: all cores)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run a sample-complexity sweep from a config file");
  std::string config_path;
  sweep->add_option("--config", config_path, "YAML config")->required();

  // trial
  auto* trial = app.add_subcommand("trial", "run a single trial");
  TeacherFlags tf;
  std::string scheme_name = "tune";
  std::size_t best_width = 0;
  std::size_t n_mc = 8192;
  std::size_t trial_index = 0;
  std::string snapshot_path;
  std::string dataset_path;
  std::string epoch_log_path;
  add_teacher_flags(trial, tf);
  trial->add_option("--scheme", scheme_name, "same, 4M, tune or best");
  trial->add_option("--width", best_width, "width for the best scheme");
  trial->add_option("--n-mc", n_mc, "Monte-Carlo test points")->check(CLI::PositiveNumber);
  trial->add_option("--index", trial_index, "trial index used in the seed");
  trial->add_option("--snapshot", snapshot_path, "write the selected student as JSON");
  trial->add_option("--dataset", dataset_path, "write the training set as CSV");
  trial->add_option("--epoch-log", epoch_log_path, "retrain the selected width and write its epoch log CSV");

  // lambda
  auto* lambda = app.add_subcommand("lambda", "conditioning study with d = 2M");
  std::vector<std::size_t> lambda_ms{2, 4, 8, 16, 32};
  std::size_t lambda_trials = 1000;
  lambda->add_option("--M", lambda_ms, "widths")->delimiter(',');
  lambda->add_option("--count", lambda_trials, "trials per width (--trials also works)");

  // lrfind
  auto* lrfind = app.add_subcommand("lrfind", "dump a learning-rate finder trace");
  TeacherFlags lf;
  std::size_t lr_width = 16;
  add_teacher_flags(lrfind, lf);
  lrfind->add_option("--width", lr_width, "student width")->check(CLI::PositiveNumber);

  // report
  auto* report = app.add_subcommand("report", "render figures and tables from result files");
  ReportOptions ropts;
  std::string report_in;
  std::string lambda_in;
  report->add_option("--in", report_in, "results CSV");
  report->add_option("--lambda", lambda_in, "lambda samples CSV");
  report->add_option("--fig", ropts.figure, "samples, ratio, queries, appendix or all");
  report->add_option("--eps", ropts.epsilons, "error targets")->delimiter(',');

  auto* selftest = app.add_subcommand("selftest", "run the invariant suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sweep) {
      SweepConfig cfg;
      try {
        cfg = load_sweep_config(config_path);
      } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
      }
      if (global.seed) cfg.seed = *global.seed;
      if (global.trials) cfg.trials = *global.trials;
      if (global.parallelism) cfg.parallelism = *global.parallelism;
      cfg.out_dir = resolve_out_dir(global, cfg.out_dir, "results");
      const SweepResult res = run_sweep(cfg, &std::cout);
      std::cout << "wrote " << (cfg.out_dir / "results.csv").string() << " and "
                << (cfg.out_dir / "summary.json").string() << '\n';
      for (const auto& s : res.n_eps) {
        std::cout << "d=" << s.gamma.d << " M=" << s.gamma.m << " sigma=" << s.gamma.sigma
                  << " eps=" << s.epsilon << " N_eps="
                  << (s.n_eps ? std::to_string(*s.n_eps) : "not reached") << '\n';
      }
      return 0;
    }

    if (*trial) {
      const Gamma gamma{tf.d, tf.m, tf.sigma};
      const WidthScheme scheme{parse_width_variant(scheme_name), best_width};
      const std::uint64_t master = global.seed.value_or(1);
      const std::uint64_t seed = trial_seed(master, gamma, tf.n, trial_index);
      TrialOptions topts;
      topts.n_mc = n_mc;
      const TrialRun run = run_trial_detailed(gamma, tf.n, tf.depth, scheme, seed, trial_index, topts);
      std::cout << kResultsHeader << '\n' << format_trial_row(run.result) << "\n\nwidth,val_loss,queries,flagged\n";
      for (const auto& e : run.search.evaluations)
        std::cout << e.width << ',' << e.val_loss << ',' << e.queries << ',' << e.flagged << '\n';
      for (const std::string& p : {snapshot_path, dataset_path, epoch_log_path}) {
        const auto parent = std::filesystem::path(p).parent_path();
        if (!p.empty() && !parent.empty()) std::filesystem::create_directories(parent);
      }
      if (!snapshot_path.empty()) save_snapshot(run.search.best_report.best_params, snapshot_path);
      if (!dataset_path.empty() || !epoch_log_path.empty()) {
        // Regenerate the trial's data from its seed; identical by construction.
        RandomSource rng(seed);
        RandomSource data_rng = rng.child(1);
        const Dataset data = generate_dataset(run.teacher, tf.n, data_rng);
        if (!dataset_path.empty()) write_dataset_csv(data, dataset_path);
        if (!epoch_log_path.empty()) {
          RandomSource search_rng = rng.child(2);
          TrainOptions opts;
          opts.keep_epoch_log = true;
          const WidthScheme fixed{WidthVariant::best, run.result.width};
          const auto redo = select_and_train(gamma, data, tf.depth, fixed, search_rng, opts);
          write_epoch_log_csv(redo.best_report, epoch_log_path);
        }
      }
      return run.result.flag == "failed" ? 1 : 0;
    }

    if (*lambda) {
      const auto out_dir = resolve_out_dir(global, {}, "results/lambda");
      std::filesystem::create_directories(out_dir);
      const std::size_t count = global.trials.value_or(lambda_trials);
      const auto res = lambda_sweep(lambda_ms, count, global.seed.value_or(1));
      write_lambda_samples_csv(res, out_dir / "lambda_samples.csv");
      write_lambda_summary_csv(res, out_dir / "lambda_summary.csv");
      write_svg(lambda_plot(res.samples), out_dir / "lambda.svg");
      std::cout << "M,d,trials,overflow,median_log10,p05_log10,p95_log10\n";
      for (const auto& r : res.rows) {
        std::cout << r.m << ',' << r.d << ',' << r.trials << ',' << r.overflow << ','
                  << r.median_log10 << ',' << r.p05_log10 << ',' << r.p95_log10 << '\n';
      }
      return 0;
    }

    if (*lrfind) {
      const Gamma gamma{lf.d, lf.m, lf.sigma};
      RandomSource rng(global.seed.value_or(1));
      RandomSource teacher_rng = rng.child(0);
      RandomSource data_rng = rng.child(1);
      RandomSource init_rng = rng.child(2);
      RandomSource finder_rng = rng.child(3);
      const TeacherNet g = sample_teacher(gamma, teacher_rng);
      const Dataset data = generate_dataset(g, lf.n, data_rng);
      auto [train_part, val_part] = split_dataset(data, data_rng);
      const StudentNet net = init_student(gamma.d, lf.depth, lr_width, init_rng);
      const auto res = lr_find(net, train_part, finder_rng);
      const auto out_dir = resolve_out_dir(global, {}, "results/lrfind");
      std::filesystem::create_directories(out_dir);
      write_lr_trace_csv(res, out_dir / "lr_trace.csv");
      std::cout << "steep=" << res.lr_steep << " minimum=" << res.lr_minimum
                << " valley=" << res.lr_valley << " chosen=" << res.chosen
                << (res.fallback ? " (fallback)" : "") << " steps=" << res.steps
                << " queries=" << res.queries << '\n'
                << "trace: " << (out_dir / "lr_trace.csv").string() << '\n';
      return 0;
    }

    if (*report) {
      if (report_in.empty() && lambda_in.empty()) {
        std::cerr << "report: pass --in and/or --lambda\n" << report->help();
        return 2;
      }
      const auto out_dir = resolve_out_dir(global, {}, "results/report");
      std::vector<std::filesystem::path> written;
      if (!report_in.empty()) {
        ropts.results = report_in;
        ropts.out_dir = out_dir;
        written = make_report(ropts);
      }
      if (!lambda_in.empty()) {
        std::filesystem::create_directories(out_dir);
        const auto path = out_dir / "lambda.svg";
        write_svg(lambda_plot(read_lambda_samples_csv(lambda_in)), path);
        written.push_back(path);
      }
      for (const auto& p : written) std::cout << "wrote " << p.string() << '\n';
      if (!report_in.empty() && written.size() == 1 && lambda_in.empty()) {
        std::cerr << "report: no cell reached the requested eps, so no figure had points; "
                     "only report.txt was written\n";
      }
      return 0;
    }

    if (*selftest) return run_selftest(std::cout) ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

int cli_main(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("tsbench");
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace tsbench
