#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace tsbench {

/// Bias-corrected Adam with PyTorch defaults (eps added outside the sqrt).
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t t = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  AdamState() = default;
  AdamState(std::size_t n, double learning_rate) : m(n, 0.0), v(n, 0.0), lr(learning_rate) {}
};

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads);

/// Divides the learning rate by 10 once the validation loss has gone more
/// than `patience` epochs without a relative improvement of `threshold`.
class PlateauScheduler {
 public:
  explicit PlateauScheduler(double initial_lr, int patience = 12, double threshold = 1e-4)
      : lr_(initial_lr), patience_(patience), threshold_(threshold) {}

  /// Feed one epoch's validation loss; returns the learning rate to use next.
  double update(double val_loss);

  double lr() const noexcept { return lr_; }
  double best() const noexcept { return best_; }
  int epochs_since_improve() const noexcept { return bad_epochs_; }
  int reductions() const noexcept { return reductions_; }

 private:
  double lr_;
  int patience_;
  double threshold_;
  double best_ = std::numeric_limits<double>::infinity();
  int bad_epochs_ = 0;
  int reductions_ = 0;
};

}  // namespace tsbench
