#include "tsbench/lambda_study.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "tsbench/errors.hpp"
#include "tsbench/format.hpp"
#include "tsbench/singular_values.hpp"

namespace tsbench {

Matrix sample_weight_matrix(std::size_t d, std::size_t m, RandomSource& rng) {
  if (d < 1 || m < 1) throw ValidationError("sample_weight_matrix: d and M must be >= 1");
  Matrix w(d, m);
  rng.fill_normal(w.data(), 1.0 / std::sqrt(static_cast<double>(d)));
  std::vector<double> h(m);
  rng.fill_normal(h, 1.0 / std::sqrt(static_cast<double>(m)));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < m; ++j) w(i, j) *= h[j];
  return w;
}

LambdaSample compute_lambda(const Matrix& w) {
  LambdaSample s;
  s.d = w.rows();
  s.m = w.cols();
  s.singular_values = singular_values(w);
  const std::size_t k = s.singular_values.size();
  s.overflow = s.singular_values.back() < kSingularValueFloor;
  double sum_log = 0.0;
  for (double v : s.singular_values) sum_log += std::log(std::max(v, kSingularValueFloor));
  s.log_lambda = sum_log - static_cast<double>(k) * std::log(std::max(s.singular_values.back(), kSingularValueFloor));
  return s;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ValidationError("quantile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

LambdaSweep lambda_sweep(const std::vector<std::size_t>& m_list, std::size_t trials,
                         std::uint64_t seed) {
  if (trials < 1) throw ValidationError("lambda_sweep: trials must be >= 1");
  LambdaSweep sweep;
  const RandomSource root(seed);
  for (std::size_t m : m_list) {
    const std::size_t d = 2 * m;
    std::vector<LambdaSample> batch(trials);
    std::vector<std::exception_ptr> errors(trials);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t t = 0; t < trials; ++t) {
      try {
        RandomSource rng = root.child(m).child(t);
        batch[t] = compute_lambda(sample_weight_matrix(d, m, rng));
        batch[t].trial = t;
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
    LambdaRow row{m, d, trials, 0, 0.0, 0.0, 0.0};
    std::vector<double> log10s;
    for (const auto& s : batch) {
      if (s.overflow) {
        ++row.overflow;
        continue;
      }
      log10s.push_back(s.log_lambda / std::numbers::ln10);
    }
    if (!log10s.empty()) {
      row.median_log10 = quantile(log10s, 0.5);
      row.p05_log10 = quantile(log10s, 0.05);
      row.p95_log10 = quantile(log10s, 0.95);
    } else {
      row.median_log10 = row.p05_log10 = row.p95_log10 = std::nan("");
    }
    sweep.rows.push_back(row);
    sweep.samples.insert(sweep.samples.end(), batch.begin(), batch.end());
  }
  return sweep;
}

void write_lambda_samples_csv(const LambdaSweep& sweep, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "M,d,trial,log10_lambda\n";
  for (const auto& s : sweep.samples) {
    out << s.m << ',' << s.d << ',' << s.trial << ','
        << (s.overflow ? std::string("overflow") : format_double(s.log_lambda / std::numbers::ln10))
        << '\n';
  }
}

void write_lambda_summary_csv(const LambdaSweep& sweep, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "M,d,trials,overflow,median_log10,p05_log10,p95_log10\n";
  for (const auto& r : sweep.rows) {
    out << r.m << ',' << r.d << ',' << r.trials << ',' << r.overflow << ','
        << format_double(r.median_log10) << ',' << format_double(r.p05_log10) << ','
        << format_double(r.p95_log10) << '\n';
  }
}

std::vector<LambdaSample> read_lambda_samples_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<LambdaSample> out;
  std::string line;
  std::getline(in, line);
  if (line != "M,d,trial,log10_lambda") throw std::runtime_error(path.string() + ": unexpected header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (std::size_t c; (c = line.find(',', start)) != std::string::npos; start = c + 1)
      f.push_back(line.substr(start, c - start));
    f.push_back(line.substr(start));
    if (f.size() != 4) throw std::runtime_error(path.string() + ": bad row '" + line + "'");
    LambdaSample s;
    s.m = static_cast<std::size_t>(parse_int(f[0]));
    s.d = static_cast<std::size_t>(parse_int(f[1]));
    s.trial = static_cast<std::size_t>(parse_int(f[2]));
    if (f[3] == "overflow") {
      s.overflow = true;
    } else {
      s.log_lambda = parse_double(f[3]) * std::numbers::ln10;
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace tsbench
