#include "tsbench/student.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include <json.hpp>

#include "tsbench/errors.hpp"
#include "tsbench/kernels.hpp"
#include "tsbench/teacher.hpp"

namespace tsbench {

StudentNet::StudentNet(std::size_t d, int depth, std::size_t width)
    : d_(d), depth_(depth), width_(width) {
  if (depth < 1 || depth > 3) throw ValidationError("student depth must be 1, 2 or 3");
  if (d < 1 || width < 1) throw ValidationError("student d and width must be >= 1");
  std::size_t offset = 0;
  std::size_t in = d;
  for (int l = 0; l <= depth; ++l) {
    const std::size_t out = l < depth ? width : 1;
    layers_.push_back({in, out, offset, offset + in * out});
    offset += in * out + out;
    in = out;
  }
  params_.assign(offset, 0.0);
}

std::span<double> StudentNet::weights(std::size_t l) {
  const auto& s = layers_.at(l);
  return {params_.data() + s.weight_offset, s.in * s.out};
}
std::span<const double> StudentNet::weights(std::size_t l) const {
  const auto& s = layers_.at(l);
  return {params_.data() + s.weight_offset, s.in * s.out};
}
std::span<double> StudentNet::bias(std::size_t l) {
  const auto& s = layers_.at(l);
  return {params_.data() + s.bias_offset, s.out};
}
std::span<const double> StudentNet::bias(std::size_t l) const {
  const auto& s = layers_.at(l);
  return {params_.data() + s.bias_offset, s.out};
}

bool StudentNet::all_finite() const noexcept {
  return std::all_of(params_.begin(), params_.end(), [](double v) { return std::isfinite(v); });
}

StudentNet init_student(std::size_t d, int depth, std::size_t width, RandomSource& rng) {
  StudentNet net(d, depth, width);
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const double stddev = 1.0 / std::sqrt(static_cast<double>(net.layer(l).in));
    rng.fill_normal(net.weights(l), stddev);
  }
  return net;
}

StudentNet student_from_teacher(const TeacherNet& g) {
  const std::size_t d = g.a.cols();
  const std::size_t m = g.a.rows();
  StudentNet net(d, 1, m);
  auto w0 = net.weights(0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < d; ++j) w0[j * m + i] = g.a(i, j);
  std::copy(g.b.begin(), g.b.end(), net.bias(0).begin());
  std::copy(g.theta.begin(), g.theta.end(), net.weights(1).begin());
  return net;
}

void forward(const StudentNet& net, std::span<const double> xs, std::size_t batch,
             ForwardCache& cache) {
  if (xs.size() != batch * net.input_dim()) {
    throw ShapeError("forward: input has " + std::to_string(xs.size()) + " values, expected " +
                     std::to_string(batch) + "x" + std::to_string(net.input_dim()));
  }
  const auto hidden = static_cast<std::size_t>(net.depth());
  cache.batch = batch;
  cache.input.assign(xs.begin(), xs.end());
  cache.preact.resize(hidden);
  cache.activation.resize(hidden);
  cache.output.resize(batch);

  std::span<const double> in = cache.input;
  for (std::size_t l = 0; l < hidden; ++l) {
    const auto& s = net.layer(l);
    cache.preact[l].resize(batch * s.out);
    cache.activation[l].resize(batch * s.out);
    kernels::dense_forward(in, net.weights(l), net.bias(l), cache.preact[l], batch, s.in, s.out);
    kernels::relu(cache.preact[l], cache.activation[l]);
    in = cache.activation[l];
  }
  const auto& last = net.layer(hidden);
  kernels::dense_forward(in, net.weights(hidden), net.bias(hidden), cache.output, batch, last.in,
                         last.out);
}

std::vector<double> forward(const StudentNet& net, const Matrix& xs) {
  if (xs.cols() != net.input_dim()) throw ShapeError("forward: xs.cols != d");
  ForwardCache cache;
  forward(net, xs.data(), xs.rows(), cache);
  return cache.output;
}

double backward(const StudentNet& net, const ForwardCache& cache,
                std::span<const double> targets, GradientSet& grads,
                BackwardWorkspace& work) {
  const std::size_t batch = cache.batch;
  if (targets.size() != batch || batch == 0) {
    throw ShapeError("backward: predictions and targets must have the same nonzero length");
  }
  grads.values.resize(net.parameter_count());
  auto grad_w = [&](std::size_t l) {
    const auto& s = net.layer(l);
    return std::span<double>(grads.values.data() + s.weight_offset, s.in * s.out);
  };
  auto grad_b = [&](std::size_t l) {
    const auto& s = net.layer(l);
    return std::span<double>(grads.values.data() + s.bias_offset, s.out);
  };

  const double scale = 2.0 / static_cast<double>(batch);
  double loss = 0.0;
  work.delta.resize(batch);
  for (std::size_t r = 0; r < batch; ++r) {
    const double diff = cache.output[r] - targets[r];
    loss += diff * diff;
    work.delta[r] = scale * diff;
  }
  loss /= static_cast<double>(batch);

  // Walk from the output layer back to the first hidden layer. `delta` holds
  // dLoss/dz for the layer being processed.
  for (std::size_t l = net.num_layers(); l-- > 0;) {
    const auto& s = net.layer(l);
    std::span<const double> in = l == 0 ? std::span<const double>(cache.input)
                                        : std::span<const double>(cache.activation[l - 1]);
    kernels::dense_grad_params(in, work.delta, grad_w(l), grad_b(l), batch, s.in, s.out);
    if (l == 0) break;
    work.delta_prev.resize(batch * s.in);
    kernels::dense_grad_input(work.delta, net.weights(l), cache.preact[l - 1], work.delta_prev,
                              batch, s.in, s.out);
    std::swap(work.delta, work.delta_prev);
  }
  return loss;
}

double backward(const StudentNet& net, const ForwardCache& cache,
                std::span<const double> targets, GradientSet& grads) {
  BackwardWorkspace work;
  return backward(net, cache, targets, grads, work);
}

std::vector<double> predict(const StudentNet& net, const Matrix& xs) {
  if (xs.cols() != net.input_dim()) throw ShapeError("predict: xs.cols != d");
  constexpr std::size_t kChunk = 1024;
  std::vector<double> out(xs.rows());
  ForwardCache cache;
  const std::size_t d = xs.cols();
  for (std::size_t start = 0; start < xs.rows(); start += kChunk) {
    const std::size_t n = std::min(kChunk, xs.rows() - start);
    forward(net, xs.data().subspan(start * d, n * d), n, cache);
    std::copy(cache.output.begin(), cache.output.end(), out.begin() + start);
  }
  return out;
}

double mean_squared_error(const StudentNet& net, const Matrix& xs, std::span<const double> ys) {
  if (ys.size() != xs.rows() || ys.empty()) throw ShapeError("mean_squared_error: size mismatch");
  const auto pred = predict(net, xs);
  double s = 0.0;
  for (std::size_t r = 0; r < ys.size(); ++r) s += (pred[r] - ys[r]) * (pred[r] - ys[r]);
  return s / static_cast<double>(ys.size());
}

void save_snapshot(const StudentNet& net, const std::filesystem::path& path) {
  nlohmann::json j;
  j["d"] = net.input_dim();
  j["depth"] = net.depth();
  j["width"] = net.width();
  j["params"] = std::vector<double>(net.parameters().begin(), net.parameters().end());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump() << '\n';
}

StudentNet load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  const auto j = nlohmann::json::parse(in);
  StudentNet net(j.at("d").get<std::size_t>(), j.at("depth").get<int>(),
                 j.at("width").get<std::size_t>());
  const auto params = j.at("params").get<std::vector<double>>();
  if (params.size() != net.parameter_count()) {
    throw ShapeError("snapshot has " + std::to_string(params.size()) + " parameters, expected " +
                     std::to_string(net.parameter_count()));
  }
  std::copy(params.begin(), params.end(), net.parameters().begin());
  return net;
}

namespace {

std::vector<bool> activation_pattern(const ForwardCache& cache) {
  std::vector<bool> pattern;
  for (const auto& z : cache.preact)
    for (double v : z) pattern.push_back(v > 0.0);
  return pattern;
}

double batch_loss(const ForwardCache& cache, std::span<const double> targets) {
  double s = 0.0;
  for (std::size_t r = 0; r < targets.size(); ++r)
    s += (cache.output[r] - targets[r]) * (cache.output[r] - targets[r]);
  return s / static_cast<double>(targets.size());
}

}  // namespace

GradCheckReport gradient_check(const StudentNet& net, const Matrix& xs,
                               std::span<const double> targets, double h, double rel_tol,
                               double abs_tol) {
  ForwardCache cache;
  forward(net, xs.data(), xs.rows(), cache);
  GradientSet grads;
  backward(net, cache, targets, grads);

  GradCheckReport report;
  StudentNet probe = net;
  ForwardCache plus_cache;
  ForwardCache minus_cache;
  for (std::size_t p = 0; p < net.parameter_count(); ++p) {
    const double original = net.parameters()[p];
    probe.parameters()[p] = original + h;
    forward(probe, xs.data(), xs.rows(), plus_cache);
    probe.parameters()[p] = original - h;
    forward(probe, xs.data(), xs.rows(), minus_cache);
    probe.parameters()[p] = original;

    // The loss is not differentiable across a relu kink; a central
    // difference straddling one says nothing about the analytic gradient.
    if (activation_pattern(plus_cache) != activation_pattern(minus_cache)) {
      ++report.skipped_kinks;
      continue;
    }
    const double numeric = (batch_loss(plus_cache, targets) - batch_loss(minus_cache, targets)) /
                           (2.0 * h);
    const double analytic = grads.values[p];
    const double abs_err = std::abs(numeric - analytic);
    const double scale = std::max(std::abs(numeric), std::abs(analytic));
    const double rel = scale > 0.0 ? abs_err / scale : 0.0;
    ++report.checked;
    if (abs_err > abs_tol) report.worst_relative = std::max(report.worst_relative, rel);
    if (abs_err > abs_tol && rel > rel_tol) ++report.failures;
  }
  return report;
}

}  // namespace tsbench
