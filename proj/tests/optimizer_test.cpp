#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "tsbench/optimizer.hpp"

namespace tsbench {
namespace {

// Plain recomputation of the Adam recurrences for one scalar.
std::vector<double> reference_adam(double p, double g, double lr, int steps) {
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  double m = 0.0, v = 0.0;
  std::vector<double> out;
  for (int t = 1; t <= steps; ++t) {
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const double mhat = m / (1 - std::pow(b1, t));
    const double vhat = v / (1 - std::pow(b2, t));
    p -= lr * mhat / (std::sqrt(vhat) + eps);
    out.push_back(p);
  }
  return out;
}

TEST(AdamTest, ZeroGradientLeavesParamsAlone) {
  std::vector<double> p{1.0, -2.0, 3.5};
  const std::vector<double> g(3, 0.0);
  AdamState s(3, 0.1);
  for (int i = 0; i < 4; ++i) adam_step(s, p, g);
  EXPECT_EQ(p, (std::vector<double>{1.0, -2.0, 3.5}));
}

TEST(AdamTest, FirstStepIsLrTimesSign) {
  std::vector<double> p{1.0};
  AdamState s(1, 0.1);
  adam_step(s, p, std::vector<double>{0.5});
  // eps sits outside the sqrt, so the step is lr * 0.5 / (0.5 + 1e-8).
  EXPECT_NEAR(p[0], 1.0 - 0.1 * (1.0 - 2e-8), 1e-12);
  EXPECT_NEAR((1.0 - p[0]) / 0.1, 1.0, 1e-6);

  std::vector<double> q{1.0};
  AdamState s2(1, 0.1);
  adam_step(s2, q, std::vector<double>{-3.0});
  EXPECT_NEAR(q[0], 1.0 + 0.1 * 3.0 / (3.0 + 1e-8), 1e-12);
}

TEST(AdamTest, ConstantGradientMatchesRecurrence) {
  for (int steps : {2, 5}) {
    std::vector<double> p{1.0};
    AdamState s(1, 0.05);
    const auto expect = reference_adam(1.0, 0.5, 0.05, steps);
    for (int t = 0; t < steps; ++t) {
      adam_step(s, p, std::vector<double>{0.5});
      EXPECT_NEAR(p[0], expect[t], 1e-12);
    }
    EXPECT_EQ(s.t, static_cast<std::uint64_t>(steps));
  }
}

TEST(AdamTest, LrChangeTakesEffectNextStep) {
  std::vector<double> p{0.0};
  AdamState s(1, 0.1);
  adam_step(s, p, std::vector<double>{1.0});
  s.lr = 0.01;
  const double before = p[0];
  adam_step(s, p, std::vector<double>{1.0});
  EXPECT_NEAR(before - p[0], 0.01, 1e-9);
}

TEST(PlateauTest, StrictlyDecreasingNeverDecays) {
  PlateauScheduler sched(1e-3);
  double loss = 1.0;
  for (int e = 0; e < 200; ++e) {
    sched.update(loss);
    loss *= 0.99;
  }
  EXPECT_EQ(sched.lr(), 1e-3);
  EXPECT_EQ(sched.reductions(), 0);
}

TEST(PlateauTest, ConstantLossDecaysAtEpochFourteen) {
  // Epoch 1 sets the best; epochs 2..13 are 12 bad epochs (not yet more
  // than the patience); epoch 14 is the 13th and triggers the cut.
  PlateauScheduler sched(1e-3);
  for (int e = 1; e <= 13; ++e) {
    sched.update(0.5);
    EXPECT_EQ(sched.lr(), 1e-3) << "epoch " << e;
  }
  sched.update(0.5);
  EXPECT_DOUBLE_EQ(sched.lr(), 1e-4);
  EXPECT_EQ(sched.reductions(), 1);
  EXPECT_EQ(sched.epochs_since_improve(), 0);
}

TEST(PlateauTest, ImprovementAtBoundaryResetsCounter) {
  PlateauScheduler sched(1e-3);
  sched.update(1.0);
  for (int e = 0; e < 12; ++e) sched.update(1.0);
  EXPECT_EQ(sched.epochs_since_improve(), 12);
  sched.update(0.5);
  EXPECT_EQ(sched.epochs_since_improve(), 0);
  EXPECT_EQ(sched.lr(), 1e-3);
  EXPECT_EQ(sched.best(), 0.5);
}

TEST(PlateauTest, TinyImprovementIsNotImprovement) {
  PlateauScheduler sched(1e-3);
  sched.update(1.0);
  sched.update(1.0 - 1e-6);  // below the 1e-4 relative threshold
  EXPECT_EQ(sched.epochs_since_improve(), 1);
}

TEST(PlateauTest, EachCutIsExactlyTenfold) {
  PlateauScheduler sched(2e-2);
  double prev = sched.lr();
  for (int e = 0; e < 100; ++e) {
    sched.update(1.0);
    if (sched.lr() != prev) {
      EXPECT_DOUBLE_EQ(prev / sched.lr(), 10.0);
      prev = sched.lr();
    }
  }
  EXPECT_GE(sched.reductions(), 7);
}

}  // namespace
}  // namespace tsbench
