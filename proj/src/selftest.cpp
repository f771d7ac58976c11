#include "tsbench/selftest.hpp"

#include <cmath>
#include <ostream>

#include "tsbench/optimizer.hpp"
#include "tsbench/singular_values.hpp"
#include "tsbench/student.hpp"
#include "tsbench/width_search.hpp"

namespace tsbench {

namespace {

bool gradient_suite(std::ostream& out) {
  RandomSource rng(20240607);
  std::size_t failures = 0, checked = 0, skipped = 0;
  for (int c = 0; c < 100; ++c) {
    const int depth = 1 + c % 3;
    const std::size_t d = 1 + rng.uniform_index(16);
    const std::size_t width = 1 + rng.uniform_index(16);
    const std::size_t batch = 1 + rng.uniform_index(8);
    StudentNet net = init_student(d, depth, width, rng);
    for (double& b : net.parameters()) b += 0.1 * rng.normal();
    Matrix xs(batch, d);
    rng.fill_normal(xs.data());
    std::vector<double> ys(batch);
    rng.fill_normal(ys);
    const auto rep = gradient_check(net, xs, ys);
    failures += rep.failures;
    checked += rep.checked;
    skipped += rep.skipped_kinks;
  }
  out << (failures == 0 ? "PASS" : "FAIL") << " gradients: " << checked << " entries checked, "
      << skipped << " skipped at relu kinks, " << failures << " failures\n";
  return failures == 0;
}

bool adam_suite(std::ostream& out) {
  AdamState st(1, 0.1);
  std::vector<double> p{1.0};
  const std::vector<double> g{0.5};
  double m = 0.0, v = 0.0, q = 1.0;
  bool ok = true;
  for (int t = 1; t <= 5; ++t) {
    adam_step(st, p, g);
    m = 0.9 * m + 0.1 * 0.5;
    v = 0.999 * v + 0.001 * 0.25;
    q -= 0.1 * (m / (1.0 - std::pow(0.9, t))) / (std::sqrt(v / (1.0 - std::pow(0.999, t))) + 1e-8);
    ok = ok && std::abs(p[0] - q) <= 1e-12;
  }
  out << (ok ? "PASS" : "FAIL") << " adam: 5 steps against the recurrence\n";
  return ok;
}

bool golden_suite(std::ostream& out) {
  const auto r = golden_section_minimize([](double u) { return (u - 3) * (u - 3); }, 1.0, 5.0, 0.25);
  const bool ok = std::abs(r.best_point - 3.0) <= 0.25 && r.evaluations.size() <= 10;
  out << (ok ? "PASS" : "FAIL") << " golden-section: best u=" << r.best_point << " after "
      << r.evaluations.size() << " evaluations\n";
  return ok;
}

bool singular_value_suite(std::ostream& out) {
  RandomSource rng(7);
  bool ok = true;
  for (std::size_t n : {2u, 5u, 17u, 40u}) {
    Matrix w(n, n + 3);
    rng.fill_normal(w.data());
    const auto sv = singular_values(w);
    double s2 = 0.0;
    for (double s : sv) s2 += s * s;
    const double f2 = w.frobenius_norm() * w.frobenius_norm();
    ok = ok && std::abs(s2 - f2) <= 1e-9 * f2;
  }
  out << (ok ? "PASS" : "FAIL") << " singular values: sum of squares equals Frobenius norm\n";
  return ok;
}

}  // namespace

bool run_selftest(std::ostream& out) {
  bool ok = gradient_suite(out);
  ok = adam_suite(out) && ok;
  ok = golden_suite(out) && ok;
  ok = singular_value_suite(out) && ok;
  return ok;
}

}  // namespace tsbench
