#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "tsbench/matrix.hpp"
#include "tsbench/random.hpp"

namespace tsbench {

struct TeacherNet;

/// Shape of one dense layer inside the flat parameter buffer.
struct LayerShape {
  std::size_t in = 0;
  std::size_t out = 0;
  std::size_t weight_offset = 0;  // in x out, row-major
  std::size_t bias_offset = 0;    // out
  bool operator==(const LayerShape&) const = default;
};

/// ReLU MLP with `depth` equal-width hidden layers and a scalar linear output.
///
/// Parameters live in one flat buffer, layer by layer (weights row-major,
/// then bias), which is also the snapshot order.
class StudentNet {
 public:
  StudentNet() = default;
  /// Zero-initialized network. depth in {1, 2, 3}, width >= 1.
  StudentNet(std::size_t d, int depth, std::size_t width);

  std::size_t input_dim() const noexcept { return d_; }
  int depth() const noexcept { return depth_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t num_layers() const noexcept { return layers_.size(); }
  const LayerShape& layer(std::size_t l) const { return layers_[l]; }
  const std::vector<LayerShape>& layers() const noexcept { return layers_; }

  std::size_t parameter_count() const noexcept { return params_.size(); }
  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }

  std::span<double> weights(std::size_t l);
  std::span<const double> weights(std::size_t l) const;
  std::span<double> bias(std::size_t l);
  std::span<const double> bias(std::size_t l) const;

  bool all_finite() const noexcept;
  bool operator==(const StudentNet&) const = default;

 private:
  std::size_t d_ = 0;
  int depth_ = 1;
  std::size_t width_ = 0;
  std::vector<LayerShape> layers_;
  std::vector<double> params_;
};

/// Gradient buffer laid out exactly like StudentNet::parameters().
struct GradientSet {
  std::vector<double> values;
};

/// Per-layer buffers from one forward pass; reused across batches.
struct ForwardCache {
  std::size_t batch = 0;
  std::vector<double> input;                     // batch x d
  std::vector<std::vector<double>> preact;       // per hidden layer, batch x width
  std::vector<std::vector<double>> activation;   // per hidden layer, batch x width
  std::vector<double> output;                    // batch
};

/// Scratch space for backward(); reused across batches.
struct BackwardWorkspace {
  std::vector<double> delta;
  std::vector<double> delta_prev;
};

/// Weights ~ N(0, 1/fan_in), biases zero.
StudentNet init_student(std::size_t d, int depth, std::size_t width, RandomSource& rng);

/// Depth-1 student carrying the teacher's parameters (output bias zero).
StudentNet student_from_teacher(const TeacherNet& g);

/// Forward pass on xs (batch x d). Fills the cache; predictions are
/// cache.output.
void forward(const StudentNet& net, std::span<const double> xs, std::size_t batch,
             ForwardCache& cache);
std::vector<double> forward(const StudentNet& net, const Matrix& xs);

/// Mean squared error of the cached predictions against targets and its exact
/// gradient (relu'(0) = 0). `grads` is resized as needed. Returns the loss.
double backward(const StudentNet& net, const ForwardCache& cache,
                std::span<const double> targets, GradientSet& grads,
                BackwardWorkspace& work);
double backward(const StudentNet& net, const ForwardCache& cache,
                std::span<const double> targets, GradientSet& grads);

/// Predictions for arbitrarily many rows, evaluated in fixed-size chunks.
std::vector<double> predict(const StudentNet& net, const Matrix& xs);

/// Mean squared error of predict(net, xs) against ys.
double mean_squared_error(const StudentNet& net, const Matrix& xs, std::span<const double> ys);

void save_snapshot(const StudentNet& net, const std::filesystem::path& path);
StudentNet load_snapshot(const std::filesystem::path& path);

/// Central-difference check of backward() on one batch.
struct GradCheckReport {
  std::size_t checked = 0;
  std::size_t skipped_kinks = 0;  // entries whose +-h probe flips a relu
  std::size_t failures = 0;
  double worst_relative = 0.0;
};
GradCheckReport gradient_check(const StudentNet& net, const Matrix& xs,
                               std::span<const double> targets, double h = 1e-5,
                               double rel_tol = 1e-4, double abs_tol = 1e-7);

}  // namespace tsbench
