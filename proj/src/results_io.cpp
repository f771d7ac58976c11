#include "tsbench/results_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "tsbench/format.hpp"

namespace tsbench {

double parse_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  return v;
}

long long parse_int(std::string_view s) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
  return v;
}

namespace {

std::uint64_t parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument("not an unsigned integer: '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::string format_trial_row(const TrialResult& r) {
  std::ostringstream os;
  os << r.gamma.d << ',' << r.gamma.m << ',' << format_double(r.gamma.sigma) << ',' << r.depth
     << ',' << to_string(r.scheme) << ',' << r.n << ',' << r.trial << ',' << r.seed << ','
     << format_double(r.error) << ',' << r.queries << ',' << r.width << ',' << r.flag;
  return os.str();
}

TrialResult parse_trial_row(const std::string& line) {
  const auto f = split_fields(line);
  if (f.size() != 12) throw std::invalid_argument("results row needs 12 fields: " + line);
  TrialResult r;
  r.gamma.d = static_cast<std::size_t>(parse_int(f[0]));
  r.gamma.m = static_cast<std::size_t>(parse_int(f[1]));
  r.gamma.sigma = parse_double(f[2]);
  r.depth = static_cast<int>(parse_int(f[3]));
  r.scheme = parse_width_variant(f[4]);
  r.n = static_cast<std::size_t>(parse_int(f[5]));
  r.trial = static_cast<std::size_t>(parse_int(f[6]));
  r.seed = parse_u64(f[7]);
  r.error = parse_double(f[8]);
  r.queries = static_cast<std::size_t>(parse_u64(f[9]));
  r.width = static_cast<std::size_t>(parse_int(f[10]));
  r.flag = std::string(f[11]);
  return r;
}

std::vector<TrialResult> read_results_csv(const std::filesystem::path& path) {
  std::vector<TrialResult> rows;
  std::ifstream in(path);
  if (!in) return rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line != kResultsHeader)
        throw std::runtime_error(path.string() + ": unexpected header '" + line + "'");
      continue;
    }
    rows.push_back(parse_trial_row(line));
  }
  return rows;
}

void append_results_csv(const std::filesystem::path& path, const std::vector<TrialResult>& rows) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot append to " + path.string());
  if (fresh) out << kResultsHeader << '\n';
  for (const auto& r : rows) out << format_trial_row(r) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void append_evaluations_csv(const std::filesystem::path& path, const TrialResult& trial,
                            const std::vector<WidthEvaluation>& evaluations) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot append to " + path.string());
  if (fresh) out << kEvaluationsHeader << '\n';
  for (const auto& e : evaluations) {
    out << trial.gamma.d << ',' << trial.gamma.m << ',' << format_double(trial.gamma.sigma) << ','
        << trial.depth << ',' << to_string(trial.scheme) << ',' << trial.n << ',' << trial.trial
        << ',' << e.width << ',' << format_double(e.val_loss) << ',' << e.queries << ','
        << (e.flagged ? 1 : 0) << '\n';
  }
}

void write_summary_json(const std::filesystem::path& path, const SweepConfig& config,
                        const SweepResult& result) {
  using nlohmann::json;
  json j;
  json cfg;
  cfg["d"] = config.d_list;
  cfg["M"] = config.m_list;
  cfg["sigma"] = config.sigmas;
  cfg["depth"] = config.depths;
  std::vector<std::string> schemes;
  for (auto s : config.schemes) schemes.emplace_back(to_string(s));
  cfg["scheme"] = schemes;
  cfg["epsilon"] = config.epsilons;
  cfg["trials"] = config.trials;
  cfg["n0"] = config.n0;
  cfg["n_cap"] = config.n_cap;
  cfg["n_list"] = config.n_list;
  cfg["seed"] = config.seed;
  cfg["n_mc"] = config.n_mc;
  j["config"] = cfg;

  json cells = json::array();
  for (const auto& c : result.cells) {
    cells.push_back({{"d", c.gamma.d},
                     {"M", c.gamma.m},
                     {"sigma", c.gamma.sigma},
                     {"depth", c.depth},
                     {"scheme", to_string(c.scheme)},
                     {"N", c.n},
                     {"trials", c.trials},
                     {"mean_error", std::isfinite(c.mean_error) ? json(c.mean_error) : json("inf")},
                     {"mean_queries", c.mean_queries}});
  }
  j["cells"] = cells;

  json table = json::array();
  for (const auto& s : result.n_eps) {
    table.push_back({{"d", s.gamma.d},
                     {"M", s.gamma.m},
                     {"sigma", s.gamma.sigma},
                     {"depth", s.depth},
                     {"scheme", to_string(s.scheme)},
                     {"epsilon", s.epsilon},
                     {"reached", s.n_eps.has_value()},
                     {"n_eps", s.n_eps ? json(*s.n_eps) : json(nullptr)},
                     {"largest_n_tested", s.largest_n}});
  }
  j["n_eps"] = table;

  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << j.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace tsbench
